#include "dtsfd/spectral.hpp"

#include <cmath>
#include <mutex>
#include <string>

#include <fftw3.h>

#include "dtsfd/error.hpp"

namespace dtsfd {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_block(const FrequencyGrid& g, int k) {
  if (k < 0 || k >= g.blocks) {
    throw InvalidArgument("FrequencyGrid: block index out of range");
  }
}

void validate_series(const TimeSeries& s, const char* what) {
  if (s.n() < 2) {
    throw InvalidArgument(std::string(what) + ": need at least 2 samples");
  }
  if (s.p() < 1) {
    throw InvalidArgument(std::string(what) + ": no variables");
  }
  if (!s.values.allFinite()) {
    throw InvalidArgument(std::string(what) + ": non-finite sample");
  }
}

}  // namespace

FrequencyGrid FrequencyGrid::from_blocks(std::int64_t n, int blocks) {
  if (n < 2 || n % 2 != 0) {
    throw InvalidArgument("frequency grid: n must be even and >= 2, got " +
                          std::to_string(n));
  }
  if (blocks < 1) {
    throw InvalidArgument("frequency grid: M must be >= 1");
  }
  std::int64_t span = n / (2 * static_cast<std::int64_t>(blocks));
  if (span % 2 == 0) --span;
  while (span >= 1 && blocks * span > n / 2 - 1) span -= 2;
  if (span < 3) {
    throw InvalidArgument("frequency grid: M = " + std::to_string(blocks) +
                          " is too large for n = " + std::to_string(n) +
                          " (smoothing span below 3); use a smaller M");
  }
  return make(n, blocks, static_cast<int>(span));
}

FrequencyGrid FrequencyGrid::from_span(std::int64_t n, int span) {
  if (span < 1 || span % 2 == 0) {
    throw InvalidArgument("frequency grid: K must be a positive odd integer");
  }
  const std::int64_t half = (span - 1) / 2;
  const std::int64_t blocks = (n / 2 - half - 1) / span;
  if (n / 2 - half - 1 < 0 || blocks < 1) {
    throw InvalidArgument("frequency grid: K = " + std::to_string(span) +
                          " leaves no complete block for n = " +
                          std::to_string(n));
  }
  return make(n, static_cast<int>(blocks), span);
}

FrequencyGrid FrequencyGrid::make(std::int64_t n, int blocks, int span) {
  if (n < 2 || n % 2 != 0) {
    throw InvalidArgument("frequency grid: n must be even and >= 2");
  }
  if (blocks < 1 || span < 1 || span % 2 == 0) {
    throw InvalidArgument("frequency grid: need M >= 1 and odd K >= 1");
  }
  if (static_cast<std::int64_t>(blocks) * span > n / 2 - 1) {
    throw InvalidArgument("frequency grid: M*K = " +
                          std::to_string(blocks * span) +
                          " exceeds n/2 - 1 = " + std::to_string(n / 2 - 1));
  }
  FrequencyGrid g;
  g.n = n;
  g.blocks = blocks;
  g.span = span;
  g.half_span = (span - 1) / 2;
  return g;
}

FrequencyGrid FrequencyGrid::time_domain_grid(std::int64_t n) {
  FrequencyGrid g;
  g.n = n;
  g.blocks = 1;
  g.span = 1;
  g.half_span = 0;
  g.time_domain = true;
  return g;
}

std::int64_t FrequencyGrid::first_index(int k) const {
  check_block(*this, k);
  return static_cast<std::int64_t>(k) * span + 1;
}

std::int64_t FrequencyGrid::center_index(int k) const {
  return first_index(k) + half_span;
}

double FrequencyGrid::center_frequency(int k) const {
  if (time_domain) return 0.0;
  return static_cast<double>(center_index(k)) / static_cast<double>(n);
}

std::vector<std::int64_t> FrequencyGrid::block_indices(int k) const {
  std::vector<std::int64_t> out(span);
  const std::int64_t first = first_index(k);
  for (int l = 0; l < span; ++l) out[l] = first + l;
  return out;
}

std::vector<double> FrequencyGrid::center_frequencies() const {
  std::vector<double> out(blocks);
  for (int k = 0; k < blocks; ++k) out[k] = center_frequency(k);
  return out;
}

CMatrix compute_dft(const TimeSeries& series) {
  validate_series(series, "compute_dft");
  const int p = static_cast<int>(series.p());
  const int n = static_cast<int>(series.n());
  const int half = n / 2 + 1;

  // Row-major copy: each variable is a contiguous length-n signal.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> in =
      series.values;
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(
      p, half);

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_many_dft_r2c(
        1, &n, p, in.data(), nullptr, 1, n,
        reinterpret_cast<fftw_complex*>(out.data()), nullptr, 1, half,
        FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("compute_dft: FFTW plan failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CMatrix dft(p, n);
  dft.leftCols(half) = out * scale;
  // Real input: d(f_{n-m}) = conj(d(f_m)).
  for (int m = half; m < n; ++m) dft.col(m) = dft.col(n - m).conjugate();
  return dft;
}

RMatrix inverse_dft(const CMatrix& dft) {
  const int p = static_cast<int>(dft.rows());
  const int n = static_cast<int>(dft.cols());
  if (n < 1) throw InvalidArgument("inverse_dft: empty input");
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> buf =
      dft;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_many_dft(1, &n, p,
                              reinterpret_cast<fftw_complex*>(buf.data()),
                              nullptr, 1, n,
                              reinterpret_cast<fftw_complex*>(buf.data()),
                              nullptr, 1, n, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("inverse_dft: FFTW plan failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  return buf.real() * scale;
}

std::vector<HermitianMatrix> smoothed_psd(const CMatrix& dft,
                                          const FrequencyGrid& grid) {
  if (grid.time_domain) {
    throw InvalidArgument("smoothed_psd: time-domain grid has no DFT blocks");
  }
  if (dft.cols() != grid.n) {
    throw InvalidArgument("smoothed_psd: DFT length " +
                          std::to_string(dft.cols()) +
                          " does not match grid n = " +
                          std::to_string(grid.n));
  }
  std::vector<HermitianMatrix> out;
  out.reserve(grid.blocks);
  for (int k = 0; k < grid.blocks; ++k) {
    const auto block = dft.middleCols(grid.first_index(k), grid.span);
    CMatrix s = block * block.adjoint() / static_cast<double>(grid.span);
    out.emplace_back(hermitian_part(s));
  }
  return out;
}

SpectralStatistics smoothed_psd(const CMatrix& dft_x, const CMatrix& dft_y,
                                const FrequencyGrid& grid) {
  if (dft_x.rows() != dft_y.rows()) {
    throw InvalidArgument("smoothed_psd: x and y have different dimension");
  }
  SpectralStatistics stats;
  stats.grid = grid;
  stats.sx = smoothed_psd(dft_x, grid);
  stats.sy = smoothed_psd(dft_y, grid);
  return stats;
}

RMatrix sample_covariance(const TimeSeries& series) {
  validate_series(series, "sample_covariance");
  RMatrix cov = series.values * series.values.transpose() /
                static_cast<double>(series.n());
  return (cov + cov.transpose()) / 2.0;
}

SpectralStatistics spectral_statistics(const TimeSeries& x,
                                       const TimeSeries& y,
                                       const FrequencyGrid& grid) {
  if (x.p() != y.p()) {
    throw InvalidArgument("spectral_statistics: x has " +
                          std::to_string(x.p()) + " variables, y has " +
                          std::to_string(y.p()));
  }
  if (x.n() != grid.n || y.n() != grid.n) {
    throw InvalidArgument("spectral_statistics: series length must equal n");
  }
  SpectralStatistics stats = smoothed_psd(compute_dft(x), compute_dft(y), grid);
  stats.x_variance = sample_covariance(x).diagonal();
  return stats;
}

SpectralStatistics covariance_statistics(const TimeSeries& x,
                                         const TimeSeries& y) {
  if (x.p() != y.p()) {
    throw InvalidArgument("covariance_statistics: dimension mismatch");
  }
  SpectralStatistics stats;
  stats.grid = FrequencyGrid::time_domain_grid(std::min(x.n(), y.n()));
  const RMatrix cx = sample_covariance(x);
  stats.sx.push_back(HermitianMatrix::from_real(cx));
  stats.sy.push_back(HermitianMatrix::from_real(sample_covariance(y)));
  stats.x_variance = cx.diagonal();
  return stats;
}

}  // namespace dtsfd
