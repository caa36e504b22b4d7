#pragma once

#include <vector>

#include "dtsfd/penalty.hpp"
#include "dtsfd/solver.hpp"
#include "dtsfd/spectral.hpp"

namespace dtsfd {

// How the diagonal time-domain variances rescale the statistics before the
// BIC residual is formed.
enum class BicScaling {
  // S -> D^{-1/2} S D^{-1/2}, Delta -> D^{1/2} Delta D^{1/2}
  kSymmetric,
  // S -> D^{-1} S, Delta -> Delta D
  kOneSided,
};

// 4K sum_k ||S~xk Delta~k S~yk - (S~xk - S~yk)||_F + ln(4K) sum_k |W_k|_0,
// with the residual on the Hermitian estimate and the count on the
// thresholded (exactly sparse) one. An empty `scale` means no rescaling.
double bic(const DifferentialEstimate& est, const SpectralStatistics& stats,
           const RVector& scale, BicScaling mode = BicScaling::kSymmetric);

struct LambdaGrid {
  double lambda_sm = 0.0;  // smallest lambda found with an empty edge set
  double upper = 0.0;      // lambda_sm / 2
  double lower = 0.0;      // upper / 10
  std::vector<double> values;  // geometric, ascending
  // Sx == Sy at every frequency: every lambda gives an empty model.
  bool degenerate = false;
};

struct LambdaSearchOptions {
  int points = 10;
  double bracket_low = 1e-6;
  double bracket_high = 1e6;
  // Bisection stops when hi / lo <= 1 + relative_precision.
  double relative_precision = 0.02;
};

// 2 max_ij ||(Sx_k - Sy_k)^(ij)||: at or above this lambda, Delta = 0
// satisfies the optimality conditions of the lasso-weighted problem.
double zero_solution_bound(const SpectralStatistics& stats);
double zero_solution_bound(const FactoredStatistics& fs);

// Searches for lambda_sm, then lays a geometric grid over
// [lambda_sm / 20, lambda_sm / 2]. Throws NumericalError if no empty model is
// found below bracket_high.
LambdaGrid lambda_grid(const SpectralStatistics& stats,
                       const PenaltySpec& penalty, const SolverConfig& cfg,
                       const LambdaSearchOptions& opts = {});
LambdaGrid lambda_grid(const FactoredStatistics& fs, const PenaltySpec& penalty,
                       const SolverConfig& cfg,
                       const LambdaSearchOptions& opts = {});

// Geometric grid of `points` values between lower and upper, ascending.
std::vector<double> geometric_grid(double lower, double upper, int points);

struct Selection {
  double lambda_star = 0.0;
  DifferentialEstimate estimate;
  std::vector<double> bic_trace;  // aligned with the grid values
};

// Minimises BIC over the grid; ties go to the larger lambda. With warm_path
// the grid is fitted from the largest lambda down, each fit warm-started from
// the previous one.
Selection select_lambda(const SpectralStatistics& stats,
                        const PenaltySpec& penalty, const SolverConfig& cfg,
                        const std::vector<double>& grid,
                        BicScaling mode = BicScaling::kSymmetric,
                        bool warm_path = true);

}  // namespace dtsfd
