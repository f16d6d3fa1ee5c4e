#include "jarzmle/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace jarzmle {

double gamma_draw(RngStream& rng, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument("gamma_draw requires positive shape and scale");
  }
  if (shape < 1.0) {
    // boost to shape + 1, then scale back by u^{1/shape}
    const double u = 1.0 - rng.uniform();
    return gamma_draw(rng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double z;
    double v;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - rng.uniform();  // (0, 1]
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) {
      return d * v * scale;
    }
  }
}

}  // namespace jarzmle
