#include <random>

#include <gtest/gtest.h>

#include "dtsfd/error.hpp"
#include "dtsfd/matrix.hpp"
#include "oracles.hpp"

using namespace dtsfd;

namespace {

double rel_err(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

}  // namespace

TEST(HermitianMatrix, SymmetrizesTinyAsymmetry) {
  CMatrix a(2, 2);
  a << Complex(1, 1e-14), Complex(2, 1),
       Complex(2, -1 + 1e-13), Complex(3, 0);
  const HermitianMatrix h(a);
  EXPECT_DOUBLE_EQ(h(0, 0).imag(), 0.0);
  EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
}

TEST(HermitianMatrix, RejectsAsymmetry) {
  CMatrix a(2, 2);
  a << 1.0, 2.0, 2.1, 1.0;
  EXPECT_THROW(HermitianMatrix{a}, InvalidArgument);
  EXPECT_THROW(HermitianMatrix{CMatrix(2, 3)}, InvalidArgument);
}

TEST(Eigendecompose, Identity) {
  const EigenFactorization f = eigendecompose(HermitianMatrix::identity(4));
  EXPECT_TRUE(f.eigenvalues.isApprox(RVector::Ones(4)));
  EXPECT_LT((f.unitary * f.unitary.adjoint() - CMatrix::Identity(4, 4)).norm(), 1e-12);
}

TEST(Eigendecompose, DiagonalIsDescendingPermutation) {
  RMatrix d = RMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 3.0;
  const EigenFactorization f = eigendecompose(HermitianMatrix::from_real(d));
  EXPECT_DOUBLE_EQ(f.eigenvalues(0), 3.0);
  EXPECT_DOUBLE_EQ(f.eigenvalues(1), 1.0);
  // columns of a permutation, up to phase
  EXPECT_NEAR(std::abs(f.unitary(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(f.unitary(0, 1)), 1.0, 1e-14);
}

TEST(Eigendecompose, RandomReconstruction) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const CMatrix r = oracle::random_complex(4, 4, rng);
    const HermitianMatrix a(hermitian_part(r));
    const EigenFactorization f = eigendecompose(a);
    const CMatrix back = f.unitary * f.eigenvalues.asDiagonal() * f.unitary.adjoint();
    EXPECT_LT(rel_err(back, a.values()), 1e-10);
    EXPECT_LT((f.unitary * f.unitary.adjoint() - CMatrix::Identity(4, 4)).norm(), 1e-10);
    for (int i = 1; i < 4; ++i) EXPECT_GE(f.eigenvalues(i - 1), f.eigenvalues(i));
  }
}

TEST(KroneckerOracle, ZeroRhs) {
  const auto id = HermitianMatrix::identity(3);
  EXPECT_EQ(kronecker_solve_oracle(id, id, CMatrix::Zero(3, 3), 1.7).norm(), 0.0);
}

TEST(KroneckerOracle, Scalar) {
  CMatrix a(1, 1), b(1, 1), c(1, 1);
  a << 2.0;
  b << 3.0;
  c << Complex(1.0, 2.0);
  const double rho = 0.5;
  const CMatrix d = kronecker_solve_oracle(HermitianMatrix(a), HermitianMatrix(b), c, rho);
  EXPECT_NEAR(std::abs(d(0, 0) - c(0, 0) / (6.0 + rho / 2.0)), 0.0, 1e-15);
}

TEST(KroneckerOracle, MatchesTestSideSolveAndResidual) {
  std::mt19937_64 rng(5);
  for (int p = 1; p <= 5; ++p) {
    const CMatrix sx = oracle::random_hpd(p, rng);
    const CMatrix sy = oracle::random_hpd(p, rng);
    const CMatrix rhs = oracle::random_complex(p, p, rng);
    const double rho = 0.3 + p;
    const CMatrix d = kronecker_solve_oracle(HermitianMatrix(sx), HermitianMatrix(sy), rhs, rho);
    EXPECT_LT(rel_err(d, oracle::kron_solve(sx, sy, rhs, rho)), 1e-10);
    EXPECT_LT(rel_err(sx * d * sy + 0.5 * rho * d, rhs), 1e-10);
  }
}

TEST(KroneckerOracle, RejectsLargeP) {
  const auto id = HermitianMatrix::identity(9);
  EXPECT_THROW(kronecker_solve_oracle(id, id, CMatrix::Zero(9, 9), 1.0), InvalidArgument);
}

TEST(MatrixHelpers, Norms) {
  CMatrix a(2, 2);
  a << Complex(3, 4), 1.0, -2.0, 0.0;
  EXPECT_DOUBLE_EQ(max_abs(a), 5.0);
  EXPECT_DOUBLE_EQ(stacked_frobenius({a, a}), std::sqrt(2.0 * (25 + 1 + 4)));
  EXPECT_NEAR(min_eigenvalue(HermitianMatrix::identity(3)), 1.0, 1e-14);
  const CMatrix h = hermitian_part(a);
  EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
}
