#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CMat expi(double angle) {
  CMat z(1, 1);
  z(0, 0) = std::polar(1.0, angle);
  return z;
}

// Dense system for X -> Sx X Sy + (rho/2) X, column-major vec of X.
template <typename Mat>
Mat sylvester_system(const Mat& sx, const Mat& sy, double rho) {
  const Eigen::Index p = sx.rows();
  Mat a = Mat::Zero(p * p, p * p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index b = 0; b < p; ++b)
        for (Eigen::Index q = 0; q < p; ++q)
          a(i + p * j, q + p * b) += sx(i, q) * sy(b, j);
  for (Eigen::Index r = 0; r < p * p; ++r) a(r, r) += 0.5 * rho;
  return a;
}

}  // namespace

CMat naive_dft(const RMat& x) {
  const Eigen::Index p = x.rows();
  const Eigen::Index n = x.cols();
  CMat d = CMat::Zero(p, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index t = 0; t < n; ++t) {
      // reduce m t mod n first to keep the angle small and exact-ish
      const double ang = -kTwoPi * static_cast<double>((m * t) % n) / n;
      const Complex w = std::polar(1.0, ang);
      for (Eigen::Index i = 0; i < p; ++i) d(i, m) += x(i, t) * w;
    }
  }
  return d * scale;
}

CMat kron_solve(const CMat& sx, const CMat& sy, const CMat& rhs, double rho) {
  const Eigen::Index p = sx.rows();
  const CMat a = sylvester_system(sx, sy, rho);
  Eigen::VectorXcd b(p * p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < p; ++i) b(i + p * j) = rhs(i, j);
  const Eigen::VectorXcd v = a.fullPivLu().solve(b);
  CMat out(p, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < p; ++i) out(i, j) = v(i + p * j);
  return out;
}

double dtrace_quadratic(const CMat& delta, const CMat& sx, const CMat& sy) {
  const Eigen::Index p = sx.rows();
  const CMat h = sylvester_system(sx, sy, 0.0);
  const CMat dmat = sx - sy;
  Eigen::VectorXcd theta(p * p), b(p * p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) {
      theta(i + p * j) = delta(i, j);
      b(i + p * j) = std::conj(dmat(j, i));
    }
  }
  const Complex quad = theta.dot(h * theta);  // theta^H H theta
  const Complex lin = b.dot(theta);           // b^H theta
  return quad.real() - 2.0 * lin.real();
}

CMat wirtinger_fd(const std::function<double(const CMat&)>& f, const CMat& at,
                  double h) {
  CMat g(at.rows(), at.cols());
  for (Eigen::Index j = 0; j < at.cols(); ++j) {
    for (Eigen::Index i = 0; i < at.rows(); ++i) {
      CMat a = at, b = at;
      a(i, j) += h;
      b(i, j) -= h;
      const double dre = (f(a) - f(b)) / (2.0 * h);
      a = at;
      b = at;
      a(i, j) += Complex(0.0, h);
      b(i, j) -= Complex(0.0, h);
      const double dim = (f(a) - f(b)) / (2.0 * h);
      g(i, j) = 0.5 * Complex(dre, dim);
    }
  }
  return g;
}

CMat random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  CMat a(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) a(i, j) = Complex(n01(rng), n01(rng));
  return a;
}

CMat random_hpd(int p, std::mt19937_64& rng, double lo, double hi) {
  const CMat q = random_complex(p, p, rng).householderQr().householderQ();
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd ev(p);
  for (int i = 0; i < p; ++i) ev(i) = u(rng);
  CMat a = q * ev.asDiagonal() * q.adjoint();
  return 0.5 * (a + a.adjoint());
}

RMat random_spd(int p, std::mt19937_64& rng, double lo, double hi) {
  std::normal_distribution<double> n01;
  RMat g(p, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i) g(i, j) = n01(rng);
  const RMat q = g.householderQr().householderQ();
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd ev(p);
  for (int i = 0; i < p; ++i) ev(i) = u(rng);
  RMat a = q * ev.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

double penalized_objective(const std::vector<CMat>& sx,
                           const std::vector<CMat>& sy,
                           const std::vector<CMat>& d, const RMat& weights) {
  double v = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    v += (sx[k] * d[k] * sy[k] * d[k].adjoint()).trace().real();
    v -= 2.0 * (d[k] * (sx[k] - sy[k])).trace().real();
  }
  const Eigen::Index p = weights.rows();
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      double s = 0.0;
      for (const auto& dk : d) s += std::norm(dk(i, j));
      v += weights(i, j) * std::sqrt(s);
    }
  }
  return v;
}

std::vector<CMat> fista_reference(const std::vector<CMat>& sx,
                                  const std::vector<CMat>& sy,
                                  const RMat& weights, int iterations) {
  const std::size_t m = sx.size();
  const Eigen::Index p = weights.rows();
  double lip = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double a = Eigen::SelfAdjointEigenSolver<CMat>(sx[k]).eigenvalues().maxCoeff();
    const double b = Eigen::SelfAdjointEigenSolver<CMat>(sy[k]).eigenvalues().maxCoeff();
    lip = std::max(lip, 2.0 * a * b);
  }
  const double step = 1.0 / lip;
  std::vector<CMat> x(m, CMat::Zero(p, p)), y = x, x_prev = x;
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<CMat> z(m);
    for (std::size_t k = 0; k < m; ++k) {
      // gradient in the (Re, Im) sense is twice the conjugate derivative
      const CMat grad = 2.0 * (sx[k] * y[k] * sy[k] - (sx[k] - sy[k]));
      z[k] = y[k] - step * grad;
    }
    x_prev = x;
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += std::norm(z[k](i, j));
        const double nrm = std::sqrt(s);
        const double keep = nrm > 0.0 ? std::max(0.0, 1.0 - step * weights(i, j) / nrm) : 0.0;
        for (std::size_t k = 0; k < m; ++k) x[k](i, j) = keep * z[k](i, j);
      }
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t k = 0; k < m; ++k)
      y[k] = x[k] + ((t - 1.0) / t_next) * (x[k] - x_prev[k]);
    t = t_next;
  }
  return x;
}

RealAdmmResult real_admm(const RMat& sx, const RMat& sy, Kind kind,
                         double lambda, double epsilon, double scad_a,
                         const RealAdmmConfig& cfg) {
  const Eigen::Index p = sx.rows();
  RMat delta = RMat::Zero(p, p), w = delta, u = delta;
  double rho = cfg.rho;
  const RMat d = sx - sy;
  RMat weights = RMat::Constant(p, p, lambda);
  RealAdmmResult out;
  out.converged = true;
  const int passes = kind == Kind::kLasso ? 1 : 2;

  for (int pass = 0; pass < passes; ++pass) {
    if (pass == 1) {
      const RMat ws = 0.5 * (w + w.transpose());
      for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) {
          const double a = std::abs(ws(i, j));
          if (kind == Kind::kLogSum) {
            weights(i, j) = lambda * epsilon / (epsilon + a);
          } else if (a <= lambda) {
            weights(i, j) = lambda;
          } else if (a <= scad_a * lambda) {
            weights(i, j) = (scad_a * lambda - a) / (scad_a - 1.0);
          } else {
            weights(i, j) = 0.0;
          }
        }
      }
    }
    Eigen::FullPivLU<RMat> lu(sylvester_system(sx, sy, rho));
    bool conv = false;
    int it = 0;
    for (; it < cfg.max_iterations; ++it) {
      const RMat rhs = d + 0.5 * rho * (w - u);
      const Eigen::VectorXd v =
          lu.solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), p * p));
      delta = Eigen::Map<const RMat>(v.data(), p, p);
      const RMat a = delta + u;
      const RMat w_old = w;
      for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) {
          const double mag = std::abs(a(i, j));
          const double keep =
              mag > 0.0 ? std::max(0.0, 1.0 - weights(i, j) / (rho * mag)) : 0.0;
          w(i, j) = keep * a(i, j);
        }
      }
      u += delta - w;
      const double r_primal = (delta - w).norm();
      const double r_dual = rho * (w - w_old).norm();
      const double eps_primal = p * cfg.tau_abs + cfg.tau_rel * std::max(delta.norm(), w.norm());
      const double eps_dual = p * cfg.tau_abs + cfg.tau_rel * u.norm() / rho;
      if (r_primal <= eps_primal && r_dual <= eps_dual) {
        conv = true;
        ++it;
        break;
      }
      if (r_primal > cfg.mu * r_dual && 2.0 * rho <= cfg.rho_max) {
        rho *= 2.0;
        u /= 2.0;
        lu.compute(sylvester_system(sx, sy, rho));
      } else if (r_dual > cfg.mu * r_primal && rho / 2.0 >= cfg.rho_min) {
        rho /= 2.0;
        u *= 2.0;
        lu.compute(sylvester_system(sx, sy, rho));
      }
    }
    out.iterations.push_back(it);
    out.converged = out.converged && conv;
  }
  out.delta = 0.5 * (delta + delta.transpose());
  out.w = 0.5 * (w + w.transpose());
  return out;
}

double bic_transliteration(const std::vector<CMat>& sx,
                           const std::vector<CMat>& sy,
                           const std::vector<CMat>& delta,
                           const std::vector<CMat>& w, double k,
                           const Eigen::VectorXd& var) {
  const Eigen::Index p = var.size();
  RMat half = RMat::Zero(p, p), inv_half = RMat::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    half(i, i) = std::sqrt(var(i));
    inv_half(i, i) = 1.0 / std::sqrt(var(i));
  }
  double fit = 0.0;
  int nnz = 0;
  for (std::size_t q = 0; q < sx.size(); ++q) {
    const CMat a = inv_half * sx[q] * inv_half;
    const CMat b = inv_half * sy[q] * inv_half;
    const CMat dd = half * delta[q] * half;
    const CMat r = a * dd * b - (a - b);
    double s = 0.0;
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index i = 0; i < p; ++i) s += std::norm(r(i, j));
    fit += std::sqrt(s);
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index i = 0; i < p; ++i)
        if (w[q](i, j) != Complex(0.0, 0.0)) ++nnz;
  }
  return 4.0 * k * fit + std::log(4.0 * k) * nnz;
}

CMat var1_autocov_psd(const RMat& a, const RMat& sigma, double f, int lags) {
  const Eigen::Index p = a.rows();
  // impulse responses Psi_j = A^j until negligible
  std::vector<RMat> psi{RMat::Identity(p, p)};
  while (psi.size() < 4000 && psi.back().norm() > 1e-18) psi.push_back(a * psi.back());
  auto acov = [&](int h) {
    RMat r = RMat::Zero(p, p);
    for (std::size_t j = 0; j + h < psi.size(); ++j)
      r += psi[j + h] * sigma * psi[j].transpose();
    return r;
  };
  CMat s = acov(0).cast<Complex>();
  for (int h = 1; h <= lags; ++h) {
    const RMat r = acov(h);
    const Complex z = expi(-kTwoPi * f * h)(0, 0);
    // R(-h) = R(h)^T
    s += z * r.cast<Complex>() + std::conj(z) * r.transpose().cast<Complex>();
  }
  return s;
}

double ar1_psd(double a, double sigma2, double f) {
  const Complex z = 1.0 - a * std::polar(1.0, -kTwoPi * f);
  return sigma2 / std::norm(z);
}

int grid_span(std::int64_t n, int m) {
  for (std::int64_t k = n / (2 * m); k >= 1; --k) {
    if (k % 2 == 1 && m * k <= n / 2 - 1) return static_cast<int>(k);
  }
  return 0;
}

std::int64_t scan_sample_size(int m, const std::function<bool(int)>& ok,
                              std::int64_t limit) {
  for (std::int64_t n = 4; n <= limit; n += 2) {
    const int k = grid_span(n, m);
    if (k >= 3 && ok(k)) return n;
  }
  return -1;
}

}  // namespace oracle
