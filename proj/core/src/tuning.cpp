#include "dtsfd/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dtsfd/error.hpp"

namespace dtsfd {

namespace {

double max_group_norm(const FactoredStatistics& fs, bool off_diagonal_only) {
  const RMatrix norms = group_norms(fs.difference);
  double best = 0.0;
  for (Eigen::Index j = 0; j < norms.cols(); ++j) {
    for (Eigen::Index i = 0; i < norms.rows(); ++i) {
      if (off_diagonal_only && i == j) continue;
      best = std::max(best, norms(i, j));
    }
  }
  return best;
}

bool is_empty_model(const FactoredStatistics& fs, const PenaltySpec& penalty,
                    const SolverConfig& cfg, double lambda) {
  return estimate(fs, penalty.with_lambda(lambda), cfg).edges.empty();
}

}  // namespace

double bic(const DifferentialEstimate& est, const SpectralStatistics& stats,
           const RVector& scale, BicScaling mode) {
  const int m = stats.frequencies();
  const Eigen::Index p = stats.p();
  if (est.frequencies() != m || est.p() != p) {
    throw InvalidArgument("bic: estimate does not match statistics");
  }
  if (scale.size() != 0 && scale.size() != p) {
    throw InvalidArgument("bic: scale must have p entries");
  }
  if (scale.size() != 0 && (scale.array() <= 0.0).any()) {
    throw InvalidArgument("bic: scale entries must be positive");
  }
  const double span = stats.grid.time_domain
                          ? static_cast<double>(stats.grid.n)
                          : static_cast<double>(stats.grid.span);

  RVector left = RVector::Ones(p);   // applied to S from the left
  RVector right = RVector::Ones(p);  // applied to S from the right
  RVector dleft = RVector::Ones(p);  // applied to Delta from the left
  RVector dright = RVector::Ones(p);
  if (scale.size() != 0) {
    if (mode == BicScaling::kSymmetric) {
      left = scale.cwiseSqrt().cwiseInverse();
      right = left;
      dleft = scale.cwiseSqrt();
      dright = dleft;
    } else {
      left = scale.cwiseInverse();
      dright = scale;
    }
  }

  double residual = 0.0;
  double count = 0.0;
  for (int k = 0; k < m; ++k) {
    const CMatrix sx = left.asDiagonal() * stats.sx[k].values() * right.asDiagonal();
    const CMatrix sy = left.asDiagonal() * stats.sy[k].values() * right.asDiagonal();
    const CMatrix d =
        dleft.asDiagonal() * est.delta[k].values() * dright.asDiagonal();
    residual += (sx * d * sy - (sx - sy)).norm();
    const CMatrix& w = est.sparse[k].values();
    for (Eigen::Index j = 0; j < p; ++j) {
      for (Eigen::Index i = 0; i < p; ++i) {
        if (w(i, j) != Complex(0.0, 0.0)) count += 1.0;
      }
    }
  }
  return 4.0 * span * residual + std::log(4.0 * span) * count;
}

double zero_solution_bound(const FactoredStatistics& fs) {
  return 2.0 * max_group_norm(fs, false);
}

double zero_solution_bound(const SpectralStatistics& stats) {
  return zero_solution_bound(factorize(stats));
}

std::vector<double> geometric_grid(double lower, double upper, int points) {
  if (points < 1 || !(lower > 0.0) || !(upper >= lower)) {
    throw InvalidArgument("geometric_grid: need points >= 1, 0 < lower <= upper");
  }
  std::vector<double> out(points);
  if (points == 1) {
    out[0] = upper;
    return out;
  }
  const double step = std::log(upper / lower) / (points - 1);
  for (int i = 0; i < points; ++i) out[i] = lower * std::exp(step * i);
  out.back() = upper;
  return out;
}

LambdaGrid lambda_grid(const FactoredStatistics& fs, const PenaltySpec& penalty,
                       const SolverConfig& cfg, const LambdaSearchOptions& opts) {
  if (!(opts.bracket_low > 0.0) || !(opts.bracket_high > opts.bracket_low)) {
    throw InvalidArgument("lambda_grid: invalid search bracket");
  }
  LambdaGrid grid;
  const double full_bound = zero_solution_bound(fs);

  double lambda_sm = 0.0;
  if (full_bound < opts.bracket_low) {
    grid.degenerate = true;
    lambda_sm = opts.bracket_low;
  } else {
    // Off-diagonal bound as the starting point; the full bound (diagonal
    // included) always yields the zero solution.
    double start = std::max(2.0 * max_group_norm(fs, true), opts.bracket_low);
    start = std::min(start, full_bound);
    double lo = 0.0;
    double hi = 0.0;
    if (is_empty_model(fs, penalty, cfg, start)) {
      hi = start;
      double probe = start / 2.0;
      while (probe >= opts.bracket_low && is_empty_model(fs, penalty, cfg, probe)) {
        hi = probe;
        probe /= 2.0;
      }
      lo = probe;
    } else {
      lo = start;
      double probe = std::min(start * 2.0, full_bound * (1.0 + 1e-12));
      while (!is_empty_model(fs, penalty, cfg, probe)) {
        lo = probe;
        probe *= 2.0;
        if (probe > opts.bracket_high) {
          throw NumericalError(
              "lambda_grid: no empty model found below the search bracket " +
              std::to_string(opts.bracket_high));
        }
      }
      hi = probe;
    }
    if (lo < opts.bracket_low) {
      // Empty model down to the bottom of the bracket.
      grid.degenerate = true;
      lambda_sm = opts.bracket_low;
    } else {
      while (hi / lo > 1.0 + opts.relative_precision) {
        const double mid = std::sqrt(lo * hi);
        if (is_empty_model(fs, penalty, cfg, mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      lambda_sm = hi;
    }
  }
  if (lambda_sm > opts.bracket_high) {
    throw NumericalError("lambda_grid: lambda_sm outside search bracket");
  }
  grid.lambda_sm = lambda_sm;
  grid.upper = lambda_sm / 2.0;
  grid.lower = grid.upper / 10.0;
  grid.values = geometric_grid(grid.lower, grid.upper, opts.points);
  return grid;
}

LambdaGrid lambda_grid(const SpectralStatistics& stats,
                       const PenaltySpec& penalty, const SolverConfig& cfg,
                       const LambdaSearchOptions& opts) {
  return lambda_grid(factorize(stats), penalty, cfg, opts);
}

Selection select_lambda(const SpectralStatistics& stats,
                        const PenaltySpec& penalty, const SolverConfig& cfg,
                        const std::vector<double>& grid, BicScaling mode,
                        bool warm_path) {
  if (grid.empty()) throw InvalidArgument("select_lambda: empty lambda grid");
  const FactoredStatistics fs = factorize(stats);
  Selection out;
  out.bic_trace.reserve(grid.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });
  out.bic_trace.assign(grid.size(), 0.0);
  AdmmState warm = AdmmState::zeros(fs.p(), fs.frequencies(), cfg.rho);
  for (std::size_t i : order) {
    const double lambda = grid[i];
    DifferentialEstimate est =
        warm_path ? estimate(fs, penalty.with_lambda(lambda), cfg, std::move(warm))
                  : estimate(fs, penalty.with_lambda(lambda), cfg);
    if (warm_path) warm = est.first_pass;
    const double value = bic(est, stats, stats.x_variance, mode);
    out.bic_trace[i] = value;
    if (value < best || (value == best && lambda > out.lambda_star)) {
      best = value;
      out.lambda_star = lambda;
      out.estimate = std::move(est);
    }
  }
  return out;
}

}  // namespace dtsfd
