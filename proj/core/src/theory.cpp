#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "dtsfd/error.hpp"
#include "dtsfd/evaluation.hpp"

namespace dtsfd {

namespace {

struct SpectralBounds {
  double b_xy = 0.0;
  double b_d = 0.0;
  double phi_min = std::numeric_limits<double>::infinity();
  double sigma_xy = 0.0;
};

double smallest_eigenvalue(const HermitianMatrix& s, const char* label,
                           double f) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s.values(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError(std::string("theory_diagnostics: eigen routine failed for ") +
                         label + " at f = " + std::to_string(f));
  }
  const double v = es.eigenvalues()(0);
  if (!(v > 0.0)) {
    throw NumericalError(std::string("theory_diagnostics: ") + label +
                         " is singular at f = " + std::to_string(f));
  }
  return v;
}

void accumulate(SpectralBounds& b, const SynthModel& x, const SynthModel& y,
                double f) {
  const HermitianMatrix sx = true_psd(x, f);
  const HermitianMatrix sy = true_psd(y, f);
  b.b_xy = std::max({b.b_xy, max_abs(sx.values()), max_abs(sy.values())});
  b.b_d = std::max(b.b_d, max_abs(CMatrix(inverse_psd(y, f) - inverse_psd(x, f))));
  b.phi_min = std::min(b.phi_min, smallest_eigenvalue(sx, "S_x", f) *
                                      smallest_eigenvalue(sy, "S_y", f));
  b.sigma_xy = std::max({b.sigma_xy, sx.values().diagonal().real().maxCoeff(),
                         sy.values().diagonal().real().maxCoeff()});
}

// Smallest even n whose grid (fixed M) has a span satisfying `ok`; the span
// is non-decreasing in n, and the smallest n with span >= K is 2MK + 2.
std::int64_t min_sample_size(int blocks, const std::function<bool(double)>& ok,
                             bool& saturated) {
  // odd K = 2i + 1 with i in [1, i_max]
  const std::int64_t i_max = ((kSampleSizeCap - 2) / (2 * blocks) - 1) / 2;
  auto n_for = [blocks](std::int64_t i) { return 2 * blocks * (2 * i + 1) + 2; };
  if (ok(3.0)) return n_for(1);
  if (!ok(static_cast<double>(2 * i_max + 1))) {
    saturated = true;
    return kSampleSizeCap;
  }
  std::int64_t lo = 1;
  std::int64_t hi = i_max;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (ok(static_cast<double>(2 * mid + 1))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return n_for(hi);
}

}  // namespace

std::vector<CMatrix> population_difference(const SynthModel& x,
                                           const SynthModel& y,
                                           const FrequencyGrid& grid) {
  std::vector<CMatrix> out;
  out.reserve(grid.blocks);
  for (double f : grid.center_frequencies()) {
    out.push_back(inverse_psd(y, f) - inverse_psd(x, f));
  }
  return out;
}

TheoryConstants theory_diagnostics(const SynthModel& x, const SynthModel& y,
                                   const TheoryInputs& in) {
  if (x.p != y.p) throw InvalidArgument("theory_diagnostics: p mismatch");
  if (x.p < 2) throw InvalidArgument("theory_diagnostics: p must be >= 2");
  if (!(in.tau > 2.0)) throw InvalidArgument("theory_diagnostics: tau must exceed 2");
  if (in.s < 0) throw InvalidArgument("theory_diagnostics: s must be >= 0");
  const FrequencyGrid grid = FrequencyGrid::make(in.n, in.blocks, in.span);
  const int m = grid.blocks;
  const double k = grid.span;
  const double lnp = std::log(static_cast<double>(x.p));

  SpectralBounds sb;
  for (int i = 0; i <= 50; ++i) accumulate(sb, x, y, 0.01 * i);
  for (double f : grid.center_frequencies()) accumulate(sb, x, y, f);

  const std::vector<CMatrix> diff = population_difference(x, y, grid);
  const RMatrix norms = group_norms(diff);

  TheoryConstants c;
  c.b_xy = sb.b_xy;
  c.b_d = sb.b_d;
  c.phi_min = sb.phi_min;
  c.sigma_xy = sb.sigma_xy;
  const double log_term = std::log(16.0) + in.tau * lnp + std::log(double(m));
  c.c0 = 80.0 * c.sigma_xy * std::sqrt(2.0 * log_term / lnp);

  if (in.penalty.kind == PenaltyKind::kLogSum) {
    const double init =
        in.init_max_group_norm >= 0.0 ? in.init_max_group_norm : norms.maxCoeff();
    c.b_init = 1.0 + init / in.penalty.epsilon;
  } else {
    c.b_init = 1.0;
  }

  // nu over the pairs with a nonzero population group norm
  const double support_tol = 1e-12 * std::max(1.0, norms.maxCoeff());
  int support = 0;
  c.nu = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < norms.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (norms(i, j) > support_tol) {
        ++support;
        c.nu = std::min(c.nu, norms(i, j));
      }
    }
  }
  if (support == 0) c.nu = 0.0;
  c.gamma = 0.5 * c.nu;
  const double s = in.s > 0 ? in.s : support;

  auto lambda_at = [&](double span) {
    return 2.0 * c.b_init * std::sqrt(double(m)) *
           (6.0 * c.b_xy * c.b_d * s + 4.0) * c.c0 * std::sqrt(lnp / span);
  };
  auto sigma_bar_at = [&](double span) {
    return 4.0 * std::sqrt(s) * lambda_at(span) / c.phi_min;
  };
  c.lambda_lower = lambda_at(k);
  c.error_bound = sigma_bar_at(k);

  bool sat = false;
  c.n1 = min_sample_size(m, [&](double kk) { return kk > 2.0 * log_term; }, sat);
  c.n2 = min_sample_size(
      m, [&](double kk) { return kk > c.c0 * c.c0 * lnp / c.b_xy; }, sat);
  const double n3_rhs = 768.0 * c.b_xy * c.b_init * c.b_init * s * c.c0 *
                        std::sqrt(lnp) / c.phi_min;
  c.n3 = min_sample_size(
      m, [&](double kk) { return std::sqrt(kk) / m >= n3_rhs; }, sat);
  if (c.nu > 0.0) {
    c.n4 = min_sample_size(
        m, [&](double kk) { return sigma_bar_at(kk) <= 0.4 * c.nu; }, sat);
  } else {
    c.n4 = kSampleSizeCap;
    sat = true;
  }
  c.saturated = sat;
  return c;
}

}  // namespace dtsfd
