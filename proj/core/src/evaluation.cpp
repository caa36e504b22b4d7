#include "dtsfd/evaluation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <thread>

#include "dtsfd/error.hpp"

namespace dtsfd {

MetricReport score_edges(const EdgeSet& estimated, const EdgeSet& truth,
                         int p) {
  if (p < 2) throw InvalidArgument("score_edges: p must be >= 2");
  auto check = [p](const EdgeSet& s) {
    for (const Edge& e : s) {
      if (e.i < 0 || e.j >= p || e.i >= e.j) {
        throw InvalidArgument("score_edges: edge (" + std::to_string(e.i) +
                              ", " + std::to_string(e.j) +
                              ") is not a valid pair i < j < p");
      }
    }
  };
  check(estimated);
  check(truth);

  MetricReport r;
  for (const Edge& e : estimated) {
    if (truth.count(e)) {
      ++r.true_positives;
    } else {
      ++r.false_positives;
    }
  }
  r.false_negatives =
      static_cast<std::int64_t>(truth.size()) - r.true_positives;
  const double tp = static_cast<double>(r.true_positives);
  r.precision = estimated.empty() ? 0.0 : tp / estimated.size();
  r.recall = truth.empty() ? 0.0 : tp / truth.size();
  const double denom = r.precision + r.recall;
  r.f1 = denom > 0.0 ? 2.0 * r.precision * r.recall / denom : 0.0;
  r.hamming = r.false_positives + r.false_negatives;
  const double pairs = 0.5 * p * (p - 1.0);
  r.normalized_hamming = 100.0 * r.hamming / pairs;
  return r;
}

std::vector<RocPoint> roc_sweep(const FactoredStatistics& fs,
                                const PenaltySpec& penalty,
                                const SolverConfig& cfg, const EdgeSet& truth,
                                const std::vector<double>& lambdas) {
  if (truth.empty()) {
    throw InvalidArgument("roc_sweep: empty true edge set, TPR is undefined");
  }
  const int p = static_cast<int>(fs.p());
  const double negatives = 0.5 * p * (p - 1.0) - truth.size();
  std::vector<RocPoint> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) {
    const DifferentialEstimate est = estimate(fs, penalty.with_lambda(lambda), cfg);
    const MetricReport m = score_edges(est.edges, truth, p);
    RocPoint pt;
    pt.lambda = lambda;
    pt.edges = est.edges.size();
    pt.tpr = static_cast<double>(m.true_positives) / truth.size();
    pt.fpr = negatives > 0.0 ? m.false_positives / negatives : 0.0;
    out.push_back(pt);
  }
  return out;
}

std::vector<RocPoint> roc_sweep(const SpectralStatistics& stats,
                                const PenaltySpec& penalty,
                                const SolverConfig& cfg, const EdgeSet& truth,
                                const std::vector<double>& lambdas) {
  return roc_sweep(factorize(stats), penalty, cfg, truth, lambdas);
}

EdgeSet thresholded_recovery(const DifferentialEstimate& est, double gamma) {
  if (!(gamma >= 0.0)) {
    throw InvalidArgument("thresholded_recovery: gamma must be >= 0");
  }
  return edges_above(est.group_norms, gamma);
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kLogSum:
      return "logsum";
    case Method::kLasso:
      return "lasso";
    case Method::kScad:
      return "scad";
    case Method::kIidLasso:
      return "iid-lasso";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "logsum" || name == "log-sum") return Method::kLogSum;
  if (name == "lasso") return Method::kLasso;
  if (name == "scad") return Method::kScad;
  if (name == "iid-lasso" || name == "iid") return Method::kIidLasso;
  throw InvalidArgument("unknown method '" + std::string(name) +
                        "' (expected logsum, lasso, scad or iid-lasso)");
}

std::string_view to_string(LambdaMode m) {
  switch (m) {
    case LambdaMode::kOracle:
      return "oracle";
    case LambdaMode::kBic:
      return "bic";
    case LambdaMode::kBoth:
      return "both";
  }
  return "?";
}

LambdaMode parse_lambda_mode(std::string_view name) {
  if (name == "oracle") return LambdaMode::kOracle;
  if (name == "bic") return LambdaMode::kBic;
  if (name == "both") return LambdaMode::kBoth;
  throw InvalidArgument("unknown lambda mode '" + std::string(name) +
                        "' (expected oracle, bic or both)");
}

void BenchmarkSpec::validate() const {
  if (p < 2) throw InvalidArgument("benchmark: p must be >= 2");
  if (n < 4) throw InvalidArgument("benchmark: n must be >= 4");
  if (runs < 1) throw InvalidArgument("benchmark: runs must be >= 1");
  if (threads < 1) throw InvalidArgument("benchmark: threads must be >= 1");
  if (methods.empty()) throw InvalidArgument("benchmark: no methods given");
  if (search.points < 1) throw InvalidArgument("benchmark: grid needs points");
  solver.validate();
  PenaltySpec{PenaltyKind::kLogSum, 1.0, epsilon, scad_a}.validate();
  (void)FrequencyGrid::from_blocks(n, blocks);
  if (block_size == 0) (void)default_block_size(p);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / values.size();
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (values.size() - 1));
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

std::uint64_t replicate_seed(std::uint64_t master, int run) {
  std::seed_seq seq{static_cast<std::uint32_t>(master),
                    static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(run)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

namespace {

PenaltySpec penalty_for(Method m, const BenchmarkSpec& spec) {
  PenaltySpec pen;
  pen.epsilon = spec.epsilon;
  pen.scad_a = spec.scad_a;
  switch (m) {
    case Method::kLogSum:
      pen.kind = PenaltyKind::kLogSum;
      break;
    case Method::kScad:
      pen.kind = PenaltyKind::kScad;
      break;
    case Method::kLasso:
    case Method::kIidLasso:
      pen.kind = PenaltyKind::kLasso;
      break;
  }
  return pen;
}

// Walks the lambda grid once and keeps both the best-F1 and the minimum-BIC
// points; ties go to the larger lambda in both cases.
void sweep(const SpectralStatistics& stats, const FactoredStatistics& fs,
           const PenaltySpec& penalty, const BenchmarkSpec& spec,
           const EdgeSet& truth, MethodRun& out) {
  const LambdaGrid grid = lambda_grid(fs, penalty, spec.solver, spec.search);
  const bool want_oracle = spec.mode != LambdaMode::kBic;
  const bool want_bic = spec.mode != LambdaMode::kOracle;
  double best_f1 = -1.0;
  double best_bic = std::numeric_limits<double>::infinity();
  const int p = static_cast<int>(fs.p());
  // Largest lambda first; each fit starts from the previous first pass.
  AdmmState warm = AdmmState::zeros(fs.p(), fs.frequencies(), spec.solver.rho);
  for (auto it = grid.values.rbegin(); it != grid.values.rend(); ++it) {
    const double lambda = *it;
    DifferentialEstimate est =
        spec.warm_path
            ? estimate(fs, penalty.with_lambda(lambda), spec.solver, std::move(warm))
            : estimate(fs, penalty.with_lambda(lambda), spec.solver);
    if (spec.warm_path) warm = std::move(est.first_pass);
    const MetricReport m = score_edges(est.edges, truth, p);
    if (want_oracle && m.f1 > best_f1) {
      best_f1 = m.f1;
      out.oracle = {lambda, m};
    }
    if (want_bic) {
      const double value = bic(est, stats, stats.x_variance, spec.scaling);
      if (value < best_bic) {
        best_bic = value;
        out.bic = {lambda, m};
      }
    }
  }
}

}  // namespace

BenchmarkRun run_replicate(const BenchmarkSpec& spec, int index) {
  BenchmarkRun run;
  run.index = index;
  run.seed = replicate_seed(spec.seed, index);
  Rng rng(run.seed);
  const FrequencyGrid grid = FrequencyGrid::from_blocks(spec.n, spec.blocks);

  BenchmarkInstance inst;
  TimeSeries x;
  TimeSeries y;
  try {
    inst = draw_benchmark_instance(spec.kind, spec.p, rng, spec.block_size);
    if (spec.null_pair) {
      inst.models.y = inst.models.x;
      inst.truth = ground_truth_edges(inst.models.x, inst.models.y);
    }
    x = simulate(inst.models.x, spec.n, rng);
    y = simulate(inst.models.y, spec.n, rng);
  } catch (const std::exception& e) {
    run.error = e.what();
    return run;
  }
  run.redraws = inst.redraws;
  run.true_edges = inst.truth.edges.size();
  if (inst.truth.edges.empty()) {
    run.degenerate = true;
    return run;
  }

  std::optional<SpectralStatistics> freq_stats;
  std::optional<FactoredStatistics> freq_fs;
  std::optional<SpectralStatistics> iid_stats;
  std::optional<FactoredStatistics> iid_fs;

  for (Method m : spec.methods) {
    MethodRun mr;
    mr.method = m;
    const auto start = std::chrono::steady_clock::now();
    try {
      const PenaltySpec pen = penalty_for(m, spec);
      if (m == Method::kIidLasso) {
        if (!iid_stats) {
          iid_stats = covariance_statistics(x, y);
          iid_fs = factorize(*iid_stats);
        }
        sweep(*iid_stats, *iid_fs, pen, spec, inst.truth.edges, mr);
      } else {
        if (!freq_stats) {
          freq_stats = spectral_statistics(x, y, grid);
          freq_fs = factorize(*freq_stats);
        }
        sweep(*freq_stats, *freq_fs, pen, spec, inst.truth.edges, mr);
      }
      mr.ok = true;
    } catch (const std::exception& e) {
      mr.error = e.what();
    }
    mr.seconds = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - start)
                     .count();
    run.methods.push_back(std::move(mr));
  }
  return run;
}

BenchmarkReport run_benchmark(const BenchmarkSpec& spec) {
  spec.validate();
  BenchmarkReport report;
  report.spec = spec;
  report.grid_span = FrequencyGrid::from_blocks(spec.n, spec.blocks).span;
  report.runs.resize(spec.runs);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < spec.runs; i = next++) {
      report.runs[i] = run_replicate(spec, i);
    }
  };
  const int nthreads = std::min(spec.threads, spec.runs);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const BenchmarkRun& r : report.runs) {
    if (!r.error.empty()) ++report.failed_runs;
    if (r.degenerate) ++report.degenerate_runs;
  }
  const bool want_oracle = spec.mode != LambdaMode::kBic;
  const bool want_bic = spec.mode != LambdaMode::kOracle;
  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    MethodAggregate agg;
    agg.method = spec.methods[mi];
    std::vector<double> of1, oh, onh, bf1, bh, bnh, secs;
    for (const BenchmarkRun& r : report.runs) {
      if (!r.error.empty() || r.degenerate) continue;
      const MethodRun& mr = r.methods[mi];
      if (!mr.ok) {
        ++agg.failures;
        continue;
      }
      ++agg.completed;
      secs.push_back(mr.seconds);
      if (want_oracle) {
        of1.push_back(mr.oracle.metrics.f1);
        oh.push_back(static_cast<double>(mr.oracle.metrics.hamming));
        onh.push_back(mr.oracle.metrics.normalized_hamming);
      }
      if (want_bic) {
        bf1.push_back(mr.bic.metrics.f1);
        bh.push_back(static_cast<double>(mr.bic.metrics.hamming));
        bnh.push_back(mr.bic.metrics.normalized_hamming);
      }
    }
    agg.oracle_f1 = summarize(of1);
    agg.oracle_hamming = summarize(oh);
    agg.oracle_normalized_hamming = summarize(onh);
    agg.bic_f1 = summarize(bf1);
    agg.bic_hamming = summarize(bh);
    agg.bic_normalized_hamming = summarize(bnh);
    agg.seconds = summarize(secs);
    report.methods.push_back(agg);
  }
  return report;
}

}  // namespace dtsfd
