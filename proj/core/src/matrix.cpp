#include "dtsfd/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "dtsfd/error.hpp"

namespace dtsfd {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr Eigen::Index kOracleMaxDim = 8;

}  // namespace

HermitianMatrix::HermitianMatrix(CMatrix values) {
  if (values.rows() != values.cols()) {
    throw InvalidArgument("HermitianMatrix: matrix must be square, got " +
                          std::to_string(values.rows()) + "x" +
                          std::to_string(values.cols()));
  }
  if (!values.allFinite()) {
    throw InvalidArgument("HermitianMatrix: non-finite entry");
  }
  const double scale = std::max(1.0, max_abs(values));
  const double asym = max_abs(CMatrix(values - values.adjoint()));
  if (asym > kHermitianTolerance * scale) {
    std::ostringstream msg;
    msg << "HermitianMatrix: asymmetry " << asym << " exceeds tolerance";
    throw InvalidArgument(msg.str());
  }
  values_ = hermitian_part(values);
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index p) {
  return HermitianMatrix(CMatrix::Identity(p, p));
}

HermitianMatrix HermitianMatrix::from_real(const RMatrix& values) {
  return HermitianMatrix(CMatrix(values.cast<Complex>()));
}

EigenFactorization eigendecompose(const HermitianMatrix& a,
                                  std::string_view label) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.values());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition did not converge for " +
                         std::string(label));
  }
  // Eigen returns ascending order.
  EigenFactorization out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.unitary = solver.eigenvectors().rowwise().reverse();
  return out;
}

CMatrix kronecker_solve_oracle(const HermitianMatrix& sx,
                               const HermitianMatrix& sy, const CMatrix& rhs,
                               double rho) {
  const Eigen::Index p = sx.dim();
  if (sy.dim() != p || rhs.rows() != p || rhs.cols() != p) {
    throw InvalidArgument("kronecker_solve_oracle: dimension mismatch");
  }
  if (p > kOracleMaxDim) {
    throw InvalidArgument("kronecker_solve_oracle: p must be <= 8");
  }
  if (!(rho > 0.0)) {
    throw InvalidArgument("kronecker_solve_oracle: rho must be positive");
  }
  const Eigen::Index n = p * p;
  // vec(Sx D Sy) = (Sy^T kron Sx) vec(D), and Sy^T = conj(Sy).
  CMatrix system(n, n);
  const CMatrix sy_conj = sy.values().conjugate();
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = 0; b < p; ++b) {
      system.block(a * p, b * p, p, p) = sy_conj(a, b) * sx.values();
    }
  }
  system.diagonal().array() += rho / 2.0;

  const Eigen::Map<const Eigen::VectorXcd> b(rhs.data(), n);
  Eigen::FullPivLU<CMatrix> lu(system);
  if (!lu.isInvertible()) {
    throw NumericalError("kronecker_solve_oracle: singular system");
  }
  Eigen::VectorXcd x = lu.solve(b);
  const double rel = (system * x - b).norm() / std::max(b.norm(), 1e-300);
  if (b.norm() > 0.0 && rel > 1e-10) {
    throw NumericalError("kronecker_solve_oracle: residual too large");
  }
  return Eigen::Map<CMatrix>(x.data(), p, p);
}

double max_abs(const CMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double max_abs(const RMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double min_eigenvalue(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.values(),
                                                Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("min_eigenvalue: eigen routine did not converge");
  }
  return solver.eigenvalues()(0);
}

double stacked_frobenius(const std::vector<CMatrix>& stack) {
  double sum = 0.0;
  for (const auto& m : stack) sum += m.squaredNorm();
  return std::sqrt(sum);
}

CMatrix hermitian_part(const CMatrix& a) {
  return (a + a.adjoint()) / 2.0;
}

}  // namespace dtsfd
