#include "dtsfd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dtsfd/error.hpp"

namespace dtsfd {

namespace {

// Entry-wise 1 / (Dx_j Dy_k + rho/2).
RMatrix inverse_spectrum(const EigenFactorization& ex,
                         const EigenFactorization& ey, double rho) {
  RMatrix d = ex.eigenvalues * ey.eigenvalues.transpose();
  d.array() += rho / 2.0;
  return d.cwiseInverse();
}

// Scratch buffers for the per-frequency Delta update.
struct DeltaWorkspace {
  CMatrix rhs;
  CMatrix rotated;
  CMatrix tmp;
};

void delta_update_into(const CMatrix& difference, const EigenFactorization& ex,
                       const EigenFactorization& ey, const RMatrix& inv,
                       const CMatrix& w, const CMatrix& u, double rho,
                       DeltaWorkspace& ws, CMatrix& out) {
  ws.rhs = difference + (rho / 2.0) * (w - u);
  ws.tmp.noalias() = ex.unitary.adjoint() * ws.rhs;
  ws.rotated.noalias() = ws.tmp * ey.unitary;
  ws.rotated.array() *= inv.array().cast<Complex>();
  ws.tmp.noalias() = ex.unitary * ws.rotated;
  out.noalias() = ws.tmp * ey.unitary.adjoint();
}

void check_stack_shape(const std::vector<CMatrix>& stack, Eigen::Index p,
                       int m, const char* what) {
  if (static_cast<int>(stack.size()) != m) {
    throw InvalidArgument(std::string(what) + ": expected " +
                          std::to_string(m) + " matrices");
  }
  for (const auto& a : stack) {
    if (a.rows() != p || a.cols() != p) {
      throw InvalidArgument(std::string(what) + ": matrix dimension mismatch");
    }
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(rho > 0.0) || !(mu > 0.0) || !(tau_abs > 0.0) || !(tau_rel > 0.0)) {
    throw InvalidArgument("solver config: rho, mu, tau_abs, tau_rel must be > 0");
  }
  if (max_iterations < 1) {
    throw InvalidArgument("solver config: max_iterations must be >= 1");
  }
  if (lla_passes < 0) {
    throw InvalidArgument("solver config: lla_passes must be >= 0");
  }
  if (!(rho_min > 0.0) || !(rho_max >= rho_min)) {
    throw InvalidArgument("solver config: invalid rho bounds");
  }
}

int SolverConfig::passes_for(PenaltyKind kind) const {
  if (kind == PenaltyKind::kLasso) return 1;
  return lla_passes > 0 ? lla_passes : 2;
}

AdmmState AdmmState::zeros(Eigen::Index p, int frequencies, double rho) {
  AdmmState s;
  s.delta.assign(frequencies, CMatrix::Zero(p, p));
  s.w = s.delta;
  s.u = s.delta;
  s.rho = rho;
  return s;
}

AdmmState AdmmState::from_initial(std::vector<CMatrix> initial, double rho) {
  AdmmState s;
  s.w.reserve(initial.size());
  for (const auto& d : initial) s.w.push_back(CMatrix::Zero(d.rows(), d.cols()));
  s.u = s.w;
  s.delta = std::move(initial);
  s.rho = rho;
  return s;
}

FactoredStatistics factorize(const SpectralStatistics& stats) {
  if (stats.sx.size() != stats.sy.size() || stats.sx.empty()) {
    throw InvalidArgument("factorize: need matching, non-empty Sx and Sy lists");
  }
  const Eigen::Index p = stats.p();
  FactoredStatistics fs;
  const int m = stats.frequencies();
  fs.sx.reserve(m);
  fs.sy.reserve(m);
  fs.difference.reserve(m);
  fs.ex.reserve(m);
  fs.ey.reserve(m);
  for (int k = 0; k < m; ++k) {
    if (stats.sx[k].dim() != p || stats.sy[k].dim() != p) {
      throw InvalidArgument("factorize: inconsistent matrix dimensions");
    }
    fs.sx.push_back(stats.sx[k].values());
    fs.sy.push_back(stats.sy[k].values());
    fs.difference.push_back(fs.sx.back() - fs.sy.back());
    fs.ex.push_back(eigendecompose(stats.sx[k], "Sx[" + std::to_string(k) + "]"));
    fs.ey.push_back(eigendecompose(stats.sy[k], "Sy[" + std::to_string(k) + "]"));
  }
  return fs;
}

double dtrace_loss(const CMatrix& delta, const HermitianMatrix& sx,
                   const HermitianMatrix& sy) {
  const Eigen::Index p = sx.dim();
  if (sy.dim() != p || delta.rows() != p || delta.cols() != p) {
    throw InvalidArgument("dtrace_loss: dimension mismatch");
  }
  const CMatrix sxds = sx.values() * delta * sy.values();
  // tr(A B^H) = sum_ij A_ij conj(B_ij); the conjugated half of the loss
  // equals the conjugate of the first, so the pair sums to twice its real part.
  const Complex quad = (sxds.array() * delta.array().conjugate()).sum();
  const CMatrix diff = sx.values() - sy.values();
  const Complex lin = (delta.array() * diff.transpose().array()).sum();
  return quad.real() - 2.0 * lin.real();
}

CMatrix dtrace_gradient(const CMatrix& delta, const HermitianMatrix& sx,
                        const HermitianMatrix& sy) {
  const Eigen::Index p = sx.dim();
  if (sy.dim() != p || delta.rows() != p || delta.cols() != p) {
    throw InvalidArgument("dtrace_gradient: dimension mismatch");
  }
  return sx.values() * delta * sy.values() - (sx.values() - sy.values());
}

CMatrix delta_update(const EigenFactorization& ex, const EigenFactorization& ey,
                     const HermitianMatrix& sx, const HermitianMatrix& sy,
                     const CMatrix& w_minus_u, double rho) {
  const Eigen::Index p = sx.dim();
  if (!(rho > 0.0)) throw InvalidArgument("delta_update: rho must be > 0");
  if (sy.dim() != p || w_minus_u.rows() != p || w_minus_u.cols() != p ||
      ex.unitary.rows() != p || ey.unitary.rows() != p) {
    throw InvalidArgument("delta_update: dimension mismatch");
  }
  DeltaWorkspace ws;
  CMatrix out(p, p);
  const CMatrix zero = CMatrix::Zero(p, p);
  delta_update_into(sx.values() - sy.values(), ex, ey,
                    inverse_spectrum(ex, ey, rho), w_minus_u, zero, rho, ws,
                    out);
  return out;
}

RMatrix group_norms(const std::vector<CMatrix>& stack) {
  if (stack.empty()) return RMatrix();
  RMatrix sq = RMatrix::Zero(stack.front().rows(), stack.front().cols());
  for (const auto& a : stack) sq += a.cwiseAbs2();
  return sq.cwiseSqrt();
}

RMatrix group_norms(const std::vector<HermitianMatrix>& stack) {
  if (stack.empty()) return RMatrix();
  RMatrix sq = RMatrix::Zero(stack.front().dim(), stack.front().dim());
  for (const auto& a : stack) sq += a.values().cwiseAbs2();
  return sq.cwiseSqrt();
}

std::vector<CMatrix> group_soft_threshold(const std::vector<CMatrix>& stack,
                                          const RMatrix& weights, double rho) {
  if (!(rho > 0.0)) {
    throw InvalidArgument("group_soft_threshold: rho must be > 0");
  }
  if (stack.empty()) return {};
  const Eigen::Index p = stack.front().rows();
  check_stack_shape(stack, p, static_cast<int>(stack.size()),
                    "group_soft_threshold");
  if (weights.rows() != p || weights.cols() != stack.front().cols()) {
    throw InvalidArgument("group_soft_threshold: weight matrix shape mismatch");
  }
  const RMatrix norms = group_norms(stack);
  RMatrix scale(norms.rows(), norms.cols());
  for (Eigen::Index j = 0; j < norms.cols(); ++j) {
    for (Eigen::Index i = 0; i < norms.rows(); ++i) {
      const double nrm = norms(i, j);
      const double thr = weights(i, j);
      // Groups with rho ||A|| <= lambda_ij are set to exactly zero.
      scale(i, j) = (rho * nrm <= thr) ? 0.0 : 1.0 - thr / (rho * nrm);
    }
  }
  std::vector<CMatrix> out;
  out.reserve(stack.size());
  for (const auto& a : stack) {
    out.push_back(a.array() * scale.array().cast<Complex>());
  }
  return out;
}

double lla_objective(const FactoredStatistics& fs,
                     const std::vector<CMatrix>& stack,
                     const RMatrix& weights) {
  check_stack_shape(stack, fs.p(), fs.frequencies(), "lla_objective");
  double value = 0.0;
  for (int k = 0; k < fs.frequencies(); ++k) {
    const CMatrix& d = stack[k];
    const Complex quad =
        ((fs.sx[k] * d * fs.sy[k]).array() * d.array().conjugate()).sum();
    const Complex lin = (d.array() * fs.difference[k].transpose().array()).sum();
    value += quad.real() - 2.0 * lin.real();
  }
  value += (weights.array() * group_norms(stack).array()).sum();
  return value;
}

double kkt_residual(const FactoredStatistics& fs,
                    const std::vector<CMatrix>& stack,
                    const RMatrix& weights) {
  check_stack_shape(stack, fs.p(), fs.frequencies(), "kkt_residual");
  const int m = fs.frequencies();
  std::vector<CMatrix> grad(m);
  for (int k = 0; k < m; ++k) {
    grad[k] = fs.sx[k] * stack[k] * fs.sy[k] - fs.difference[k];
  }
  const RMatrix norms = group_norms(stack);
  const RMatrix grad_norms = group_norms(grad);
  double total = 0.0;
  for (Eigen::Index j = 0; j < norms.cols(); ++j) {
    for (Eigen::Index i = 0; i < norms.rows(); ++i) {
      const double half_weight = weights(i, j) / 2.0;
      if (norms(i, j) > 0.0) {
        const double s = half_weight / norms(i, j);
        for (int k = 0; k < m; ++k) {
          total += std::norm(grad[k](i, j) + s * stack[k](i, j));
        }
      } else {
        const double r = std::max(0.0, grad_norms(i, j) - half_weight);
        total += r * r;
      }
    }
  }
  return std::sqrt(total);
}

AdmmResult admm_solve(const FactoredStatistics& fs, const RMatrix& weights,
                      const SolverConfig& cfg, AdmmState init) {
  cfg.validate();
  const Eigen::Index p = fs.p();
  const int m = fs.frequencies();
  if (weights.rows() != p || weights.cols() != p) {
    throw InvalidArgument("admm_solve: weight matrix must be p x p");
  }
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw InvalidArgument("admm_solve: weights must be finite and >= 0");
  }
  check_stack_shape(init.delta, p, m, "admm_solve (Delta)");
  check_stack_shape(init.w, p, m, "admm_solve (W)");
  check_stack_shape(init.u, p, m, "admm_solve (U)");
  if (!(init.rho > 0.0)) throw InvalidArgument("admm_solve: rho must be > 0");

  AdmmResult result;
  AdmmState& st = result.state;
  st = std::move(init);
  AdmmDiagnostics& diag = result.diagnostics;

  const double abs_scale = static_cast<double>(p) * std::sqrt(static_cast<double>(m));
  std::vector<RMatrix> inv(m);
  auto refresh_inverse = [&](double rho) {
    for (int k = 0; k < m; ++k) inv[k] = inverse_spectrum(fs.ex[k], fs.ey[k], rho);
  };
  refresh_inverse(st.rho);

  DeltaWorkspace ws;
  std::vector<CMatrix> stacked(m);
  std::vector<CMatrix> w_prev(m);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double rho = st.rho;
    for (int k = 0; k < m; ++k) {
      delta_update_into(fs.difference[k], fs.ex[k], fs.ey[k], inv[k], st.w[k],
                        st.u[k], rho, ws, st.delta[k]);
      stacked[k] = st.delta[k] + st.u[k];
    }
    w_prev.swap(st.w);
    st.w = group_soft_threshold(stacked, weights, rho);

    double e1 = 0.0, e2 = 0.0, e3 = 0.0, rp = 0.0, rd = 0.0;
    for (int k = 0; k < m; ++k) {
      st.u[k] += st.delta[k] - st.w[k];
      e1 += st.delta[k].squaredNorm();
      e2 += st.w[k].squaredNorm();
      e3 += st.u[k].squaredNorm();
      rp += (st.delta[k] - st.w[k]).squaredNorm();
      rd += (st.w[k] - w_prev[k]).squaredNorm();
    }
    ++st.iteration;
    if (!std::isfinite(e1) || !std::isfinite(e2) || !std::isfinite(e3)) {
      throw NumericalError("admm_solve: non-finite iterate at iteration " +
                           std::to_string(it + 1));
    }
    diag.iterations = it + 1;
    diag.rho = rho;
    diag.primal_residual = std::sqrt(rp);
    diag.dual_residual = rho * std::sqrt(rd);
    diag.tau_primal =
        abs_scale * cfg.tau_abs + cfg.tau_rel * std::max(std::sqrt(e1), std::sqrt(e2));
    diag.tau_dual = abs_scale * cfg.tau_abs + cfg.tau_rel * std::sqrt(e3) / rho;

    if (diag.primal_residual <= diag.tau_primal &&
        diag.dual_residual <= diag.tau_dual) {
      diag.converged = true;
      break;
    }

    // U is the scaled dual, so it moves inversely to rho.
    if (diag.primal_residual > cfg.mu * diag.dual_residual &&
        2.0 * rho <= cfg.rho_max) {
      st.rho = 2.0 * rho;
      for (auto& u : st.u) u /= 2.0;
      refresh_inverse(st.rho);
    } else if (diag.dual_residual > cfg.mu * diag.primal_residual &&
               rho / 2.0 >= cfg.rho_min) {
      st.rho = rho / 2.0;
      for (auto& u : st.u) u *= 2.0;
      refresh_inverse(st.rho);
    }
  }
  return result;
}

AdmmResult admm_solve(const SpectralStatistics& stats, const RMatrix& weights,
                      const SolverConfig& cfg, AdmmState init) {
  return admm_solve(factorize(stats), weights, cfg, std::move(init));
}

EdgeSet edges_above(const RMatrix& norms, double threshold) {
  EdgeSet edges;
  const int p = static_cast<int>(norms.rows());
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (norms(i, j) > threshold) edges.insert(Edge{i, j});
    }
  }
  return edges;
}

DifferentialEstimate estimate(const FactoredStatistics& fs,
                              const PenaltySpec& penalty,
                              const SolverConfig& cfg) {
  return estimate(fs, penalty, cfg, AdmmState::zeros(fs.p(), fs.frequencies(), cfg.rho));
}

DifferentialEstimate estimate(const FactoredStatistics& fs,
                              const PenaltySpec& penalty,
                              const SolverConfig& cfg, AdmmState init) {
  penalty.validate();
  cfg.validate();
  const Eigen::Index p = fs.p();
  const int m = fs.frequencies();

  DifferentialEstimate out;
  out.penalty = penalty;
  RMatrix weights = RMatrix::Constant(p, p, penalty.lambda);
  AdmmState state = std::move(init);
  state.iteration = 0;
  out.converged = true;

  const int passes = cfg.passes_for(penalty.kind);
  for (int pass = 0; pass < passes; ++pass) {
    if (pass > 0) {
      // The thresholded iterate carries the exact zeros of the previous pass.
      std::vector<CMatrix> previous(m);
      for (int k = 0; k < m; ++k) previous[k] = hermitian_part(state.w[k]);
      weights = lla_weights(penalty, group_norms(previous));
      if (!cfg.warm_start) {
        // Restart from the previous estimate as the initial guess only.
        std::vector<CMatrix> guess(m);
        for (int k = 0; k < m; ++k) guess[k] = hermitian_part(state.delta[k]);
        state = AdmmState::from_initial(std::move(guess), cfg.rho);
      }
      state.iteration = 0;
    }
    AdmmResult r = admm_solve(fs, weights, cfg, std::move(state));
    state = std::move(r.state);
    if (pass == 0) out.first_pass = state;
    out.converged = out.converged && r.diagnostics.converged;
    out.inner_iterations.push_back(r.diagnostics.iterations);
    out.passes.push_back(r.diagnostics);
  }

  out.weights = std::move(weights);
  out.delta.reserve(m);
  out.sparse.reserve(m);
  for (int k = 0; k < m; ++k) {
    out.delta.emplace_back(hermitian_part(state.delta[k]));
    out.sparse.emplace_back(hermitian_part(state.w[k]));
  }
  out.group_norms = group_norms(out.sparse);
  out.edges = edges_above(out.group_norms, 0.0);
  return out;
}

DifferentialEstimate estimate(const SpectralStatistics& stats,
                              const PenaltySpec& penalty,
                              const SolverConfig& cfg) {
  return estimate(factorize(stats), penalty, cfg);
}

DifferentialEstimate estimate_iid(const TimeSeries& x, const TimeSeries& y,
                                  const PenaltySpec& penalty,
                                  const SolverConfig& cfg) {
  if (x.p() != y.p()) {
    throw InvalidArgument("estimate_iid: x and y must have the same dimension");
  }
  return estimate(covariance_statistics(x, y), penalty, cfg);
}

}  // namespace dtsfd
