#pragma once

#include <cstdint>
#include <vector>

#include "dtsfd/matrix.hpp"

namespace dtsfd {

// p variables by n samples; column t holds x(t).
struct TimeSeries {
  RMatrix values;

  Eigen::Index p() const { return values.rows(); }
  Eigen::Index n() const { return values.cols(); }
};

// Partition of the DFT indices 1 .. M*K into M contiguous blocks of K = 2*m_t+1
// frequencies. Block k (0-based) spans indices k*K+1 .. (k+1)*K and is centred
// on index k*K + m_t + 1.
struct FrequencyGrid {
  std::int64_t n = 0;
  int blocks = 0;     // M
  int span = 0;       // K
  int half_span = 0;  // m_t
  bool time_domain = false;

  // Largest odd K <= n / (2M) that also keeps every index below n/2.
  // Throws InvalidArgument if that K is below 3.
  static FrequencyGrid from_blocks(std::int64_t n, int blocks);
  // Expert mode: K given, M = floor((n/2 - m_t - 1) / K).
  static FrequencyGrid from_span(std::int64_t n, int span);
  // Validates an explicit (M, K) pair against n.
  static FrequencyGrid make(std::int64_t n, int blocks, int span);
  // Single "frequency" carrying time-domain covariances (M = 1, K = 1).
  static FrequencyGrid time_domain_grid(std::int64_t n);

  double center_frequency(int k) const;
  std::int64_t center_index(int k) const;
  std::int64_t first_index(int k) const;
  std::vector<std::int64_t> block_indices(int k) const;
  std::vector<double> center_frequencies() const;
};

// Smoothed PSD estimates at the M block centres. For time-domain grids the
// single entry holds the sample covariance.
struct SpectralStatistics {
  FrequencyGrid grid;
  std::vector<HermitianMatrix> sx;
  std::vector<HermitianMatrix> sy;
  // diag of the time-domain covariance of x; empty when unknown.
  RVector x_variance;

  Eigen::Index p() const { return sx.empty() ? 0 : sx.front().dim(); }
  int frequencies() const { return static_cast<int>(sx.size()); }
};

// d(f_m) = n^{-1/2} sum_t x(t) exp(-i 2 pi m (t-1) / n), m = 0 .. n-1, as the
// columns of a p x n matrix.
CMatrix compute_dft(const TimeSeries& series);

// Inverse of compute_dft; returns the real part of the reconstruction.
RMatrix inverse_dft(const CMatrix& dft);

// (1/K) sum over the block of d d^H for each block of the grid.
std::vector<HermitianMatrix> smoothed_psd(const CMatrix& dft,
                                          const FrequencyGrid& grid);
SpectralStatistics smoothed_psd(const CMatrix& dft_x, const CMatrix& dft_y,
                                const FrequencyGrid& grid);

// (1/n) sum_t x(t) x(t)^T, no centring.
RMatrix sample_covariance(const TimeSeries& series);

// DFT + smoothing for a pair of equally long series, with x_variance filled.
SpectralStatistics spectral_statistics(const TimeSeries& x,
                                       const TimeSeries& y,
                                       const FrequencyGrid& grid);

// Time-domain covariances wrapped as a one-frequency statistic.
SpectralStatistics covariance_statistics(const TimeSeries& x,
                                         const TimeSeries& y);

}  // namespace dtsfd
