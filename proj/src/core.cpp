#include "jarzmle/core.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "jarzmle/csv.hpp"
#include "jarzmle/numerics.hpp"

namespace jarzmle {

namespace {

double rel_err(double analytic, double fd) {
  return std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
}

}  // namespace

GradientCheckReport check_gradients(const LatentModel& model,
                                    const Vector& theta, const Vector& x,
                                    double fd_step) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step must be > 0");
  if (!all_finite(theta) || !all_finite(x)) {
    throw std::invalid_argument("non-finite probe point");
  }

  const auto probe = [&](const Vector& th, const Vector& xx) {
    const double u = model.potential(th, xx);
    if (!std::isfinite(u)) {
      throw std::runtime_error("potential undefined at probe");
    }
    return u;
  };

  GradientCheckReport report;

  const Vector gx = model.grad_x(theta, x);
  for (Index j = 0; j < x.size(); ++j) {
    Vector xp = x, xm = x;
    xp[j] += fd_step;
    xm[j] -= fd_step;
    const double fd = (probe(theta, xp) - probe(theta, xm)) / (2.0 * fd_step);
    report.max_rel_err_x = std::max(report.max_rel_err_x, rel_err(gx[j], fd));
  }

  const Vector gt = model.grad_theta(theta, x);
  for (Index j = 0; j < theta.size(); ++j) {
    Vector tp = theta, tm = theta;
    tp[j] += fd_step;
    tm[j] -= fd_step;
    const double fd = (probe(tp, x) - probe(tm, x)) / (2.0 * fd_step);
    report.max_rel_err_theta =
        std::max(report.max_rel_err_theta, rel_err(gt[j], fd));
  }

  return report;
}

ParticleCloud ParticleCloud::from_positions(Matrix pos) {
  ParticleCloud cloud;
  cloud.log_weights = Vector::Zero(pos.rows());
  cloud.positions = std::move(pos);
  return cloud;
}

double ParticleCloud::log_evidence_offset() const {
  double total = log_mean_exp(log_weights);
  for (const double seg : evidence_segments) total += seg;
  return total;
}

void ParticleCloud::write_csv(std::ostream& out) const {
  out << "# evidence_segments=";
  for (std::size_t i = 0; i < evidence_segments.size(); ++i) {
    if (i > 0) out << ';';
    out << format_double(evidence_segments[i]);
  }
  out << '\n';
  const Index d = positions.cols();
  for (Index j = 0; j < d; ++j) out << 'x' << j << ',';
  out << "log_weight\n";
  for (Index i = 0; i < positions.rows(); ++i) {
    for (Index j = 0; j < d; ++j) out << format_double(positions(i, j)) << ',';
    out << format_double(log_weights[i]) << '\n';
  }
}

ParticleCloud ParticleCloud::read_csv(std::istream& in) {
  const CsvContent content = jarzmle::read_csv(in);
  ParticleCloud cloud;
  for (const auto& comment : content.comments) {
    constexpr std::string_view kKey = "evidence_segments=";
    if (comment.rfind(kKey, 0) == 0) {
      std::string_view rest(comment);
      rest.remove_prefix(kKey.size());
      while (!rest.empty()) {
        const std::size_t semi = rest.find(';');
        const std::string_view field = rest.substr(0, semi);
        if (!field.empty()) {
          cloud.evidence_segments.push_back(parse_double(field));
        }
        if (semi == std::string_view::npos) break;
        rest.remove_prefix(semi + 1);
      }
    }
  }
  if (content.rows.empty()) throw std::runtime_error("empty particle file");
  const std::size_t n_fields = content.rows.front().size();
  if (n_fields < 2) throw std::runtime_error("particle file needs >= 2 columns");
  const Index n = static_cast<Index>(content.rows.size()) - 1;  // minus header
  const Index d = static_cast<Index>(n_fields) - 1;
  cloud.positions.resize(n, d);
  cloud.log_weights.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = content.rows[static_cast<std::size_t>(i) + 1];
    if (row.size() != n_fields) {
      throw std::runtime_error("ragged particle file at data row " +
                               std::to_string(i));
    }
    for (Index j = 0; j < d; ++j) cloud.positions(i, j) = parse_double(row[j]);
    cloud.log_weights[i] = parse_double(row[n_fields - 1]);
  }
  return cloud;
}

void RunConfig::validate() const {
  if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
  if (n_iterations < 0) throw std::invalid_argument("n_iterations must be >= 0");
  if (!(langevin_step > 0.0)) {
    throw std::invalid_argument("langevin_step must be > 0");
  }
  if (!(ess_threshold_fraction >= 0.0) || !(ess_threshold_fraction <= 1.0)) {
    throw std::invalid_argument("ess_threshold_fraction must be in [0, 1]");
  }
  if (theta_init.size() == 0) throw std::invalid_argument("theta_init is empty");
  if (!all_finite(theta_init)) {
    throw std::invalid_argument("theta_init must be finite");
  }
  if (!(gradient_clip_norm > 0.0)) {
    throw std::invalid_argument("gradient_clip_norm must be > 0");
  }
  optimizer.validate();
}

void Trajectory::write_csv(
    std::ostream& out, const std::vector<std::string>& header_comments) const {
  for (const auto& comment : header_comments) out << "# " << comment << '\n';
  const Index d = rows.empty() ? 0 : rows.front().theta.size();
  out << 'k';
  for (Index j = 0; j < d; ++j) out << ",theta_" << j;
  out << ",ess,log_evidence,grad_norm,resampled\n";
  for (const auto& row : rows) {
    out << row.k;
    for (Index j = 0; j < d; ++j) out << ',' << format_double(row.theta[j]);
    out << ',' << format_double(row.ess) << ',';
    if (std::isfinite(row.log_evidence)) out << format_double(row.log_evidence);
    out << ',' << format_double(row.grad_norm) << ','
        << (row.resampled ? '1' : '0') << '\n';
  }
}

}  // namespace jarzmle
