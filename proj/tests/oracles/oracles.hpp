#pragma once

// Independent reference implementations used only by the tests. Nothing in
// here calls the library's numerical kernels.

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

// d(f_m) = n^{-1/2} sum_t x(t) exp(-i 2 pi m t / n), t = 0 .. n-1, direct sum.
CMat naive_dft(const RMat& x);

// Solves Sx D Sy + (rho/2) D = rhs through the explicit p^2 x p^2 system,
// assembled entry by entry (column-major vec).
CMat kron_solve(const CMat& sx, const CMat& sy, const CMat& rhs, double rho);

// Re(theta^H H theta) - 2 Re(b^H theta) with H = Sy^T kron Sx, b = vec(D^H),
// theta = vec(Delta), D = Sx - Sy.
double dtrace_quadratic(const CMat& delta, const CMat& sx, const CMat& sy);

// (df/dRe + i df/dIm) / 2 entry by entry, central differences with step h.
CMat wirtinger_fd(const std::function<double(const CMat&)>& f, const CMat& at,
                  double h);

// Random Hermitian positive definite matrix with eigenvalues in [lo, hi].
CMat random_hpd(int p, std::mt19937_64& rng, double lo = 0.5, double hi = 3.0);
RMat random_spd(int p, std::mt19937_64& rng, double lo = 0.5, double hi = 3.0);
CMat random_complex(int rows, int cols, std::mt19937_64& rng);

// sum_k [Re tr(Sx D Sy D^H) - 2 Re tr(D (Sx - Sy))] + sum_ij w_ij ||D^(ij)||
double penalized_objective(const std::vector<CMat>& sx,
                           const std::vector<CMat>& sy,
                           const std::vector<CMat>& d, const RMat& weights);

// Accelerated proximal gradient on the penalized objective, fixed step from
// the spectral norms, run for a fixed number of iterations.
std::vector<CMat> fista_reference(const std::vector<CMat>& sx,
                                  const std::vector<CMat>& sy,
                                  const RMat& weights, int iterations);

struct RealAdmmConfig {
  double rho = 2.0;
  double mu = 10.0;
  double tau_abs = 1e-4;
  double tau_rel = 1e-4;
  int max_iterations = 200;
  double rho_min = 1e-4;
  double rho_max = 1e6;
};

struct RealAdmmResult {
  RMat delta;  // (D + D^T) / 2
  RMat w;      // (W + W^T) / 2
  std::vector<int> iterations;
  bool converged = false;
};

enum class Kind { kLasso, kLogSum, kScad };

// Real-valued one-frequency version of the splitting method: dense Kronecker
// Delta-step, element-wise soft threshold, scaled dual, rho doubling/halving.
// Lasso runs one pass; log-sum and SCAD re-weight once from the symmetrized W
// of the first pass and continue from its terminal state.
RealAdmmResult real_admm(const RMat& sx, const RMat& sy, Kind kind,
                         double lambda, double epsilon, double scad_a,
                         const RealAdmmConfig& cfg);

// 4K sum_k ||Sx~ D~ Sy~ - (Sx~ - Sy~)||_F + ln(4K) sum_k nnz(W_k) with
// S~ = V^{-1/2} S V^{-1/2}, D~ = V^{1/2} D V^{1/2}, V = diag(var).
double bic_transliteration(const std::vector<CMat>& sx,
                           const std::vector<CMat>& sy,
                           const std::vector<CMat>& delta,
                           const std::vector<CMat>& w, double k,
                           const Eigen::VectorXd& var);

// Autocovariance-sum PSD of a VAR(1) x(t) = A x(t-1) + e(t), cov(e) = sigma:
// R(h) from the impulse response (truncated), then sum_{|h|<=lags} R(h)
// exp(-i 2 pi f h).
CMat var1_autocov_psd(const RMat& a, const RMat& sigma, double f, int lags);

// sigma2 / |1 - a exp(-i 2 pi f)|^2
double ar1_psd(double a, double sigma2, double f);

// Largest odd K with M K <= n/2 - 1 and K <= n / (2M), by scanning down.
int grid_span(std::int64_t n, int m);

// Smallest even n >= 4 (scanned one by one up to `limit`) whose grid span K
// for M blocks satisfies ok(K); -1 if none.
std::int64_t scan_sample_size(int m, const std::function<bool(int)>& ok,
                              std::int64_t limit);

}  // namespace oracle
