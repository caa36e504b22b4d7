#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace dtsfd {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Dense complex matrix that is Hermitian by construction.
//
// Inputs whose asymmetry max|A - A^H| is within 1e-12 (scaled by
// max(1, max|A_ij|)) are projected onto (A + A^H) / 2, which also zeroes the
// imaginary part of the diagonal. Larger asymmetry is rejected.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(CMatrix values);

  static HermitianMatrix identity(Eigen::Index p);
  static HermitianMatrix from_real(const RMatrix& values);

  Eigen::Index dim() const { return values_.rows(); }
  const CMatrix& values() const { return values_; }
  operator const CMatrix&() const { return values_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const {
    return values_(i, j);
  }

 private:
  CMatrix values_;
};

// A = Q diag(D) Q^H with eigenvalues in descending order.
struct EigenFactorization {
  CMatrix unitary;
  RVector eigenvalues;
};

// Throws NumericalError naming `label` if the eigen routine fails.
EigenFactorization eigendecompose(const HermitianMatrix& a,
                                  std::string_view label = "matrix");

// Solves (conj(Sy) kron Sx + (rho/2) I) vec(D) = vec(rhs) with a dense LU of
// the p^2 x p^2 system. Meant as an independent check of the eigenbasis
// update, so only small p (<= 8) is accepted.
CMatrix kronecker_solve_oracle(const HermitianMatrix& sx,
                               const HermitianMatrix& sy, const CMatrix& rhs,
                               double rho);

// max_ij |A_ij|
double max_abs(const CMatrix& a);
double max_abs(const RMatrix& a);

double min_eigenvalue(const HermitianMatrix& a);

// Frobenius norm of a stack of equally sized matrices.
double stacked_frobenius(const std::vector<CMatrix>& stack);

// (A + A^H) / 2 without any tolerance check.
CMatrix hermitian_part(const CMatrix& a);

}  // namespace dtsfd
