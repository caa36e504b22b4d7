#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtsfd/graph.hpp"
#include "dtsfd/penalty.hpp"
#include "dtsfd/solver.hpp"
#include "dtsfd/spectral.hpp"
#include "dtsfd/synth.hpp"
#include "dtsfd/tuning.hpp"

namespace dtsfd {

struct MetricReport {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::int64_t hamming = 0;
  double normalized_hamming = 0.0;  // percent of p(p-1)/2 pairs
  std::int64_t true_positives = 0;
  std::int64_t false_positives = 0;
  std::int64_t false_negatives = 0;
};

// Precision / recall / F1 on unordered pairs, 0/0 read as 0.
MetricReport score_edges(const EdgeSet& estimated, const EdgeSet& truth, int p);

struct RocPoint {
  double lambda = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  std::size_t edges = 0;
};

// One estimate per lambda. Throws InvalidArgument on an empty truth set.
std::vector<RocPoint> roc_sweep(const SpectralStatistics& stats,
                                const PenaltySpec& penalty,
                                const SolverConfig& cfg, const EdgeSet& truth,
                                const std::vector<double>& lambdas);
std::vector<RocPoint> roc_sweep(const FactoredStatistics& fs,
                                const PenaltySpec& penalty,
                                const SolverConfig& cfg, const EdgeSet& truth,
                                const std::vector<double>& lambdas);

// {(i, j), i < j : group norm > gamma}
EdgeSet thresholded_recovery(const DifferentialEstimate& est, double gamma);

enum class Method { kLogSum, kLasso, kScad, kIidLasso };

std::string_view to_string(Method m);
// "logsum", "lasso", "scad", "iid-lasso"
Method parse_method(std::string_view name);

enum class LambdaMode { kOracle, kBic, kBoth };

std::string_view to_string(LambdaMode m);
LambdaMode parse_lambda_mode(std::string_view name);

struct BenchmarkSpec {
  ModelKind kind = ModelKind::kVar3;
  int p = 60;
  int block_size = 0;  // 0: default layout for p
  std::int64_t n = 2048;
  int blocks = 4;  // M
  std::vector<Method> methods{Method::kLogSum, Method::kLasso,
                              Method::kIidLasso};
  int runs = 20;
  std::uint64_t seed = 1;
  LambdaMode mode = LambdaMode::kOracle;
  int threads = 1;
  double epsilon = 1e-3;
  double scad_a = 3.7;
  SolverConfig solver;
  LambdaSearchOptions search;
  BicScaling scaling = BicScaling::kSymmetric;
  // Walk the lambda grid downwards, warm-starting each fit.
  bool warm_path = true;
  // Null experiment: y is simulated from x's model, so every run has an
  // empty truth set and is reported as degenerate.
  bool null_pair = false;

  void validate() const;
};

struct SelectionOutcome {
  double lambda = 0.0;
  MetricReport metrics;
};

struct MethodRun {
  Method method = Method::kLogSum;
  bool ok = false;
  std::string error;
  SelectionOutcome oracle;  // filled for kOracle / kBoth
  SelectionOutcome bic;     // filled for kBic / kBoth
  double seconds = 0.0;
};

struct BenchmarkRun {
  int index = 0;
  std::uint64_t seed = 0;
  std::size_t true_edges = 0;
  int redraws = 0;
  bool degenerate = false;  // empty truth set
  std::string error;        // generation / simulation failure
  std::vector<MethodRun> methods;
};

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double median = 0.0;
  int count = 0;
};

Summary summarize(const std::vector<double>& values);

struct MethodAggregate {
  Method method = Method::kLogSum;
  int completed = 0;
  int failures = 0;
  Summary oracle_f1;
  Summary oracle_hamming;
  Summary oracle_normalized_hamming;
  Summary bic_f1;
  Summary bic_hamming;
  Summary bic_normalized_hamming;
  Summary seconds;
};

struct BenchmarkReport {
  BenchmarkSpec spec;
  int grid_span = 0;  // K used for every run
  std::vector<BenchmarkRun> runs;
  std::vector<MethodAggregate> methods;
  int degenerate_runs = 0;
  int failed_runs = 0;
};

// Per-replicate seed from the master seed and the run index.
std::uint64_t replicate_seed(std::uint64_t master, int run);

// Monte Carlo over model draws. Each run: draw a model pair (guarded), simulate
// x and y, estimate every method on the same data, score against the ground
// truth. Oracle mode keeps the best F1 on the lambda grid; BIC mode keeps the
// BIC minimiser on the same grid. Failed or degenerate runs are excluded from
// the aggregates and counted.
BenchmarkReport run_benchmark(const BenchmarkSpec& spec);

// Everything a single run does, exposed for callers that want to reuse it.
BenchmarkRun run_replicate(const BenchmarkSpec& spec, int index);

struct TheoryInputs {
  std::int64_t n = 0;
  int blocks = 0;  // M
  int span = 0;    // K
  int s = 0;       // number of differential edges
  double tau = 3.0;
  PenaltySpec penalty;
  // max_ij of the LLA initialiser's group norm, for log-sum B_init. A
  // negative value uses the population difference on the block centres.
  double init_max_group_norm = -1.0;
};

struct TheoryConstants {
  double b_xy = 0.0;
  double b_d = 0.0;
  double phi_min = 0.0;
  double sigma_xy = 0.0;
  double c0 = 0.0;
  double b_init = 1.0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t n3 = 0;
  std::int64_t n4 = 0;
  double lambda_lower = 0.0;
  double error_bound = 0.0;  // sigma_bar at the given n
  double nu = 0.0;
  double gamma = 0.0;
  // true when a sample-size search reached the cap; the N value is then the cap
  bool saturated = false;
};

inline constexpr std::int64_t kSampleSizeCap = std::int64_t{1} << 60;

// Computable constants of the consistency and recovery results from the true
// PSDs. Maxima / minima over f in [0, 0.5] use f = 0, 0.01, ..., 0.5 plus the
// block centres. Sample-size thresholds are searched over even n with K_n
// from the grid rule at the given M. Throws NumericalError on singular spectra.
TheoryConstants theory_diagnostics(const SynthModel& x, const SynthModel& y,
                                   const TheoryInputs& in);

// Population difference S_y^{-1} - S_x^{-1} at the grid centres.
std::vector<CMatrix> population_difference(const SynthModel& x,
                                           const SynthModel& y,
                                           const FrequencyGrid& grid);

}  // namespace dtsfd
