#pragma once

#include <vector>

#include "dtsfd/graph.hpp"
#include "dtsfd/matrix.hpp"
#include "dtsfd/penalty.hpp"
#include "dtsfd/spectral.hpp"

namespace dtsfd {

struct SolverConfig {
  double rho = 2.0;        // initial ADMM penalty parameter
  double mu = 10.0;        // residual ratio that triggers a rho change
  double tau_abs = 1e-4;
  double tau_rel = 1e-4;
  int max_iterations = 200;
  // LLA passes; 0 selects 1 for lasso and 2 for log-sum / SCAD.
  int lla_passes = 0;
  double rho_min = 1e-4;
  double rho_max = 1e6;
  // Start each LLA pass from the previous pass's (Delta, W, U, rho);
  // otherwise only Delta is carried over and W = U = 0, rho = rho_initial.
  bool warm_start = true;

  void validate() const;
  int passes_for(PenaltyKind kind) const;
};

// Splitting variables for the M frequencies.
struct AdmmState {
  std::vector<CMatrix> delta;
  std::vector<CMatrix> w;
  std::vector<CMatrix> u;
  double rho = 2.0;
  int iteration = 0;

  static AdmmState zeros(Eigen::Index p, int frequencies, double rho);
  // Delta set to `initial`, W = U = 0.
  static AdmmState from_initial(std::vector<CMatrix> initial, double rho);
};

struct AdmmDiagnostics {
  bool converged = false;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double tau_primal = 0.0;
  double tau_dual = 0.0;
  double rho = 0.0;  // value used in the last completed iteration
};

struct AdmmResult {
  AdmmState state;
  AdmmDiagnostics diagnostics;
};

// Eigenfactorizations and Sx - Sy per frequency, computed once and reused
// across ADMM runs on the same statistics.
struct FactoredStatistics {
  std::vector<CMatrix> sx;
  std::vector<CMatrix> sy;
  std::vector<CMatrix> difference;
  std::vector<EigenFactorization> ex;
  std::vector<EigenFactorization> ey;

  Eigen::Index p() const { return sx.empty() ? 0 : sx.front().rows(); }
  int frequencies() const { return static_cast<int>(sx.size()); }
};

FactoredStatistics factorize(const SpectralStatistics& stats);

struct DifferentialEstimate {
  // (Delta_k + Delta_k^H) / 2 from the final pass.
  std::vector<HermitianMatrix> delta;
  // (W_k + W_k^H) / 2; carries the exact zeros produced by thresholding.
  std::vector<HermitianMatrix> sparse;
  // ||[sparse_1]_ij, ..., [sparse_M]_ij|| for every (i, j).
  RMatrix group_norms;
  EdgeSet edges;
  bool converged = false;
  std::vector<int> inner_iterations;  // one entry per LLA pass
  std::vector<AdmmDiagnostics> passes;
  RMatrix weights;  // lambda_ij used in the final pass
  PenaltySpec penalty;
  // Terminal ADMM state of the first (lasso-weighted) pass; a warm start for
  // a nearby lambda.
  AdmmState first_pass;

  Eigen::Index p() const { return group_norms.rows(); }
  int frequencies() const { return static_cast<int>(delta.size()); }
};

// Re tr(Sx D Sy D^H) - 2 Re tr(D (Sx - Sy)): the complex D-trace loss with
// its conjugate half folded in.
double dtrace_loss(const CMatrix& delta, const HermitianMatrix& sx,
                   const HermitianMatrix& sy);

// Wirtinger derivative with respect to conj(Delta): Sx D Sy - (Sx - Sy).
CMatrix dtrace_gradient(const CMatrix& delta, const HermitianMatrix& sx,
                        const HermitianMatrix& sy);

// Closed-form minimiser of L(D) + (rho/2) ||D - W + U||_F^2 in the
// eigenbases of Sx and Sy.
CMatrix delta_update(const EigenFactorization& ex, const EigenFactorization& ey,
                     const HermitianMatrix& sx, const HermitianMatrix& sy,
                     const CMatrix& w_minus_u, double rho);

// [W_k]_ij = (1 - lambda_ij / (rho ||A^(ij)||))_+ [A_k]_ij
std::vector<CMatrix> group_soft_threshold(const std::vector<CMatrix>& stack,
                                          const RMatrix& weights, double rho);

// ||[A_1]_ij, ..., [A_M]_ij|| for every (i, j).
RMatrix group_norms(const std::vector<CMatrix>& stack);
RMatrix group_norms(const std::vector<HermitianMatrix>& stack);

// sum_k L(D_k) + sum_ij lambda_ij ||D^(ij)||
double lla_objective(const FactoredStatistics& fs,
                     const std::vector<CMatrix>& stack, const RMatrix& weights);

// Distance of 0 from the subdifferential of the LLA objective at `stack`,
// in the Wirtinger convention: g_k + xi_k with g_k = Sx D Sy - (Sx - Sy) and
// xi^(ij) in (lambda_ij / 2) d||.||. Zero groups use the best xi in the ball.
double kkt_residual(const FactoredStatistics& fs,
                    const std::vector<CMatrix>& stack, const RMatrix& weights);

// Algorithm: Delta-update, group thresholding, dual ascent, with the
// residual-balancing rho schedule. Stops when both residuals are below their
// tolerances or after max_iterations (converged = false, not an error).
// Throws NumericalError on a non-finite iterate.
AdmmResult admm_solve(const FactoredStatistics& fs, const RMatrix& weights,
                      const SolverConfig& cfg, AdmmState init);
AdmmResult admm_solve(const SpectralStatistics& stats, const RMatrix& weights,
                      const SolverConfig& cfg, AdmmState init);

// One lasso-weighted pass, then (for log-sum / SCAD) LLA re-weighting from
// the previous pass's symmetrized W (its exactly sparse iterate), warm-started.
DifferentialEstimate estimate(const SpectralStatistics& stats,
                              const PenaltySpec& penalty,
                              const SolverConfig& cfg);
DifferentialEstimate estimate(const FactoredStatistics& fs,
                              const PenaltySpec& penalty,
                              const SolverConfig& cfg);
// Same, with the first pass started from `init` (e.g. the first_pass state of
// an estimate at a neighbouring lambda). The iteration counter restarts.
DifferentialEstimate estimate(const FactoredStatistics& fs,
                              const PenaltySpec& penalty,
                              const SolverConfig& cfg, AdmmState init);

// Time-domain baseline: sample covariances, one "frequency", element-wise
// penalty. Uses the same complex kernel with zero imaginary parts.
DifferentialEstimate estimate_iid(const TimeSeries& x, const TimeSeries& y,
                                  const PenaltySpec& penalty,
                                  const SolverConfig& cfg);

// {(i, j), i < j : group_norms(i, j) > threshold}
EdgeSet edges_above(const RMatrix& group_norms, double threshold = 0.0);

}  // namespace dtsfd
