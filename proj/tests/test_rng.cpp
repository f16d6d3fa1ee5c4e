#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jarzmle/rng.hpp"

using namespace jarzmle;

TEST_CASE("streams are deterministic per key and distinct across keys") {
  RngStream a(stream_key(42, 1, 2, 3));
  RngStream b(stream_key(42, 1, 2, 3));
  RngStream c(stream_key(42, 1, 2, 4));
  bool identical = true;
  bool all_same_as_c = true;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    identical = identical && (va == b.next_u64());
    all_same_as_c = all_same_as_c && (va == c.next_u64());
  }
  CHECK(identical);
  CHECK_FALSE(all_same_as_c);
}

TEST_CASE("uniform and normal moments") {
  RngStream rng(stream_key(7, 0xabc));
  const int n = 100000;
  double u_sum = 0.0, z_sum = 0.0, z_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    u_sum += u;
    const double z = rng.normal();
    z_sum += z;
    z_sq += z * z;
  }
  CHECK(u_sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(z_sum / n) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(z_sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma_draw moments") {
  RngStream rng(stream_key(11, 0xdef));
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = gamma_draw(rng, 2.5, 2.0);
    CHECK(g > 0.0);
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(mean == doctest::Approx(5.0).epsilon(0.02));   // k * theta
  CHECK(var == doctest::Approx(10.0).epsilon(0.06));   // k * theta^2

  // shape < 1 path (chi-squared with one degree of freedom)
  double chi_sum = 0.0;
  for (int i = 0; i < n; ++i) chi_sum += gamma_draw(rng, 0.5, 2.0);
  CHECK(chi_sum / n == doctest::Approx(1.0).epsilon(0.03));
  CHECK_THROWS(gamma_draw(rng, -1.0, 1.0));
}

TEST_CASE("normal_vector fills the requested length deterministically") {
  RngStream a(stream_key(3, 1));
  RngStream b(stream_key(3, 1));
  const Vector va = a.normal_vector(9);
  const Vector vb = b.normal_vector(9);
  CHECK(va.size() == 9);
  CHECK(va == vb);
}
