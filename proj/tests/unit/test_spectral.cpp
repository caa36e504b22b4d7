#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dtsfd/error.hpp"
#include "dtsfd/spectral.hpp"
#include "oracles.hpp"

using namespace dtsfd;

namespace {

TimeSeries random_series(int p, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  TimeSeries s;
  s.values.resize(p, n);
  for (int t = 0; t < n; ++t)
    for (int i = 0; i < p; ++i) s.values(i, t) = z(rng);
  return s;
}

double parseval_gap(const TimeSeries& s, const CMatrix& d) {
  const double time = s.values.squaredNorm();
  return std::abs(d.squaredNorm() - time) / std::max(1.0, time);
}

}  // namespace

TEST(Dft, Impulse) {
  TimeSeries s;
  s.values = RMatrix::Zero(1, 4);
  s.values(0, 0) = 2.0;
  const CMatrix d = compute_dft(s);
  for (int m = 0; m < 4; ++m) EXPECT_NEAR(std::abs(d(0, m) - Complex(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Dft, Constant) {
  TimeSeries s;
  s.values = RMatrix::Constant(2, 8, 1.5);
  const CMatrix d = compute_dft(s);
  EXPECT_NEAR(std::abs(d(0, 0) - std::sqrt(8.0) * 1.5), 0.0, 1e-13);
  for (int m = 1; m < 8; ++m) EXPECT_LT(std::abs(d(1, m)), 1e-13);
}

TEST(Dft, MatchesDirectSumAndParseval) {
  std::mt19937_64 rng(3);
  for (int n : {6, 16, 30, 64}) {
    const TimeSeries s = random_series(3, n, rng);
    const CMatrix d = compute_dft(s);
    EXPECT_LT((d - oracle::naive_dft(s.values)).norm(), 1e-10 * d.norm());
    EXPECT_LT(parseval_gap(s, d), 1e-10);
    EXPECT_LT((inverse_dft(d) - s.values).norm(), 1e-10 * s.values.norm());
  }
}

TEST(FrequencyGrid, ReferenceSpans) {
  const FrequencyGrid a = FrequencyGrid::from_blocks(512, 2);
  EXPECT_EQ(a.span, 127);
  EXPECT_EQ(a.half_span, 63);
  const FrequencyGrid b = FrequencyGrid::from_blocks(4096, 6);
  EXPECT_EQ(b.span, 341);
  EXPECT_EQ(FrequencyGrid::from_blocks(2048, 4).span, 255);
  EXPECT_EQ(FrequencyGrid::from_blocks(4096, 5).span, 409);
}

TEST(FrequencyGrid, SmallCase) {
  const FrequencyGrid g = FrequencyGrid::from_blocks(8, 1);
  EXPECT_EQ(g.span, 3);
  EXPECT_EQ(g.half_span, 1);
  EXPECT_DOUBLE_EQ(g.center_frequency(0), 2.0 / 8.0);
  const std::vector<std::int64_t> idx = g.block_indices(0);
  EXPECT_EQ(idx, (std::vector<std::int64_t>{1, 2, 3}));
}

TEST(FrequencyGrid, RuleMatchesOracleAndInvariants) {
  for (std::int64_t n = 16; n <= 1200; n += 2) {
    for (int m = 1; m <= 6; ++m) {
      const int k = oracle::grid_span(n, m);
      if (k < 3) {
        EXPECT_THROW(FrequencyGrid::from_blocks(n, m), InvalidArgument);
        continue;
      }
      const FrequencyGrid g = FrequencyGrid::from_blocks(n, m);
      ASSERT_EQ(g.span, k) << n << " " << m;
      EXPECT_EQ(g.span % 2, 1);
      EXPECT_LE(g.blocks * static_cast<std::int64_t>(g.span), n / 2 - 1);
      for (int b = 0; b < m; ++b) {
        EXPECT_DOUBLE_EQ(g.center_frequency(b),
                         static_cast<double>(b * k + g.half_span + 1) / n);
      }
    }
  }
}

TEST(FrequencyGrid, TooManyBlocks) {
  EXPECT_THROW(FrequencyGrid::from_blocks(64, 20), InvalidArgument);
  EXPECT_THROW(FrequencyGrid::from_blocks(63, 2), InvalidArgument);
}

TEST(SmoothedPsd, SpanOneIsRankOneOuterProduct) {
  std::mt19937_64 rng(8);
  const TimeSeries s = random_series(3, 64, rng);
  const CMatrix d = compute_dft(s);
  const FrequencyGrid g = FrequencyGrid::from_span(64, 1);
  const std::vector<HermitianMatrix> psd = smoothed_psd(d, g);
  const CMatrix expect = d.col(g.center_index(0)) * d.col(g.center_index(0)).adjoint();
  EXPECT_LT((psd[0].values() - expect).norm(), 1e-12);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(psd[0].values());
  EXPECT_GT(es.eigenvalues()(0), -1e-10);
  EXPECT_LT(es.eigenvalues()(1), 1e-10);
}

TEST(SmoothedPsd, HermitianPsdAndMatchesAverage) {
  std::mt19937_64 rng(9);
  const TimeSeries x = random_series(4, 256, rng);
  const TimeSeries y = random_series(4, 256, rng);
  const FrequencyGrid g = FrequencyGrid::from_blocks(256, 3);
  const SpectralStatistics st = spectral_statistics(x, y, g);
  const CMatrix d = oracle::naive_dft(x.values);
  for (int k = 0; k < g.blocks; ++k) {
    EXPECT_GE(min_eigenvalue(st.sx[k]), -1e-10);
    CMatrix avg = CMatrix::Zero(4, 4);
    for (std::int64_t m : g.block_indices(k)) avg += d.col(m) * d.col(m).adjoint();
    avg /= g.span;
    EXPECT_LT((st.sx[k].values() - avg).norm(), 1e-10 * avg.norm());
  }
  ASSERT_EQ(st.x_variance.size(), 4);
  EXPECT_NEAR(st.x_variance(2), x.values.row(2).squaredNorm() / 256.0, 1e-12);
}

TEST(CovarianceStatistics, TimeDomainWrapper) {
  std::mt19937_64 rng(10);
  const TimeSeries x = random_series(3, 40, rng);
  const TimeSeries y = random_series(3, 40, rng);
  const SpectralStatistics st = covariance_statistics(x, y);
  ASSERT_EQ(st.frequencies(), 1);
  EXPECT_TRUE(st.grid.time_domain);
  const RMatrix c = x.values * x.values.transpose() / 40.0;
  EXPECT_LT((st.sx[0].values().real() - c).norm(), 1e-12);
  EXPECT_EQ(st.sx[0].values().imag().norm(), 0.0);
  EXPECT_LT((sample_covariance(y) - y.values * y.values.transpose() / 40.0).norm(), 1e-12);
}

TEST(SpectralStatistics, RejectsMismatchedPair) {
  std::mt19937_64 rng(1);
  const TimeSeries x = random_series(3, 64, rng);
  const TimeSeries y = random_series(2, 64, rng);
  EXPECT_THROW(spectral_statistics(x, y, FrequencyGrid::from_blocks(64, 2)), InvalidArgument);
}

// White noise: flat spectrum, so every block estimate is unbiased for Sigma.
TEST(SmoothedPsd, WhiteNoiseMonteCarlo) {
  std::mt19937_64 rng(12);
  const int p = 3, n = 128, draws = 500;
  RMatrix chol(p, p);
  chol << 1.0, 0.0, 0.0, 0.5, 1.0, 0.0, -0.3, 0.2, 0.8;
  const RMatrix sigma = chol * chol.transpose();
  const FrequencyGrid g = FrequencyGrid::from_blocks(n, 2);
  std::vector<CMatrix> sum(g.blocks, CMatrix::Zero(p, p)), sq = sum;
  std::normal_distribution<double> z;
  for (int r = 0; r < draws; ++r) {
    TimeSeries s;
    s.values.resize(p, n);
    for (int t = 0; t < n; ++t) {
      Eigen::Vector3d e(z(rng), z(rng), z(rng));
      s.values.col(t) = chol * e;
    }
    const std::vector<HermitianMatrix> est = smoothed_psd(compute_dft(s), g);
    for (int k = 0; k < g.blocks; ++k) {
      sum[k] += est[k].values();
      sq[k].real() += est[k].values().real().cwiseAbs2();
      sq[k].imag() += est[k].values().imag().cwiseAbs2();
    }
  }
  for (int k = 0; k < g.blocks; ++k) {
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        const Complex mean = sum[k](i, j) / double(draws);
        const double var_re = sq[k](i, j).real() / draws - mean.real() * mean.real();
        const double var_im = sq[k](i, j).imag() / draws - mean.imag() * mean.imag();
        EXPECT_LE(std::abs(mean.real() - sigma(i, j)), 3.0 * std::sqrt(var_re / draws) + 1e-12);
        EXPECT_LE(std::abs(mean.imag()), 3.0 * std::sqrt(var_im / draws) + 1e-12);
      }
    }
  }
}
