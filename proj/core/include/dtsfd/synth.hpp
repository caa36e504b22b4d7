#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "dtsfd/graph.hpp"
#include "dtsfd/matrix.hpp"
#include "dtsfd/spectral.hpp"

namespace dtsfd {

using Rng = std::mt19937_64;

enum class ModelKind { kVar3, kMa3 };

std::string_view to_string(ModelKind kind);
// Accepts "ar"/"var3" and "ma"/"ma3".
ModelKind parse_model_kind(std::string_view name);

// Block-diagonal VAR(3) or VMA(3) model driven by Gaussian innovations with
// precision matrix omega.
//   VAR: x(t) = sum_i A_i x(t-i) + w(t)
//   MA:  x(t) = 0.5 w(t) + sum_i (B_i / i) w(t-i)
struct SynthModel {
  ModelKind kind = ModelKind::kVar3;
  int p = 0;
  int block_size = 0;
  std::array<RMatrix, 3> coefficients;
  RMatrix omega;
  std::uint64_t seed = 0;

  int blocks() const { return block_size > 0 ? p / block_size : 0; }
};

struct ModelPair {
  SynthModel x;
  SynthModel y;
  int replaced_block = -1;
};

struct ErPrecisionOptions {
  double diagonal = 0.5;
  double magnitude_low = 0.1;
  double magnitude_high = 0.4;
  double min_eigenvalue = 1e-6;
  int max_attempts = 100;
};

// Diagonal `diagonal`; each off-diagonal pair connected with probability
// p_er and drawn uniformly from +-[low, high]. Redrawn until positive
// definite; throws NumericalError after max_attempts failures.
RMatrix gen_er_precision(int p, double p_er, Rng& rng,
                         const ErPrecisionOptions& opts = {});

// 60 -> 10, 120 -> 15, 240 -> 30; otherwise throws unless p is given with an
// explicit block size.
int default_block_size(int p);

// Spectral radius of the VAR(3) companion matrix.
double companion_spectral_radius(const std::array<RMatrix, 3>& coefficients);

// Draws x, then y as a copy of x with one cluster (the same diagonal block
// in all three lag matrices) independently redrawn. Omega is shared.
ModelPair gen_model_pair(ModelKind kind, int p, Rng& rng, int block_size = 0);

// n samples after discarding 100 burn-in samples; deterministic given rng.
TimeSeries simulate(const SynthModel& model, std::int64_t n, Rng& rng);

// Transfer-function PSD, S(f) = H(f) Omega^{-1} H(f)^H.
HermitianMatrix true_psd(const SynthModel& model, double f);
// S(f)^{-1} without forming S(f) for VAR models.
CMatrix inverse_psd(const SynthModel& model, double f);

struct GroundTruth {
  EdgeSet edges;
  RMatrix d;   // frequency-averaged |Delta(f)_ij|
  double b = 0.0;    // max_ij frequency-averaged |S_x^{-1}(f)_ij|
  double tau = 0.0;  // 0.01 (AR) or 0.001 (MA)
  int frequency_points = 51;
  bool needs_redraw = false;  // b above the peaky-inverse guard
};

inline constexpr double kPeakyInverseGuard = 50000.0;

// Averages over f = 0, 0.01, ..., 0.5; edge iff d_ij > tau * b.
GroundTruth ground_truth_edges(const SynthModel& x, const SynthModel& y);

struct BenchmarkInstance {
  ModelPair models;
  GroundTruth truth;
  int redraws = 0;
};

// gen_model_pair + ground_truth_edges, redrawing the whole pair (Omega
// included) while the peaky-inverse guard fires.
BenchmarkInstance draw_benchmark_instance(ModelKind kind, int p, Rng& rng,
                                          int block_size = 0,
                                          int max_redraws = 1000);

}  // namespace dtsfd
