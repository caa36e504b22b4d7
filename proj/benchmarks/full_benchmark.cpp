// Full-scale Monte Carlo: p = 120, both models, n = 512 / 2048 / 4096.
// usage: full_benchmark [runs=100] [seed=1] [threads=1]
// Reference F1 values (where known) are printed alongside with a +-0.10 band.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include "dtsfd/evaluation.hpp"

using namespace dtsfd;

namespace {

struct Setting {
  ModelKind kind;
  std::int64_t n;
  int blocks;
  std::optional<double> ref_logsum, ref_lasso, ref_iid;
};

const Setting kSettings[] = {
    {ModelKind::kMa3, 512, 2, 0.46, 0.28, 0.21},
    {ModelKind::kMa3, 2048, 4, 0.81, std::nullopt, std::nullopt},
    {ModelKind::kMa3, 4096, 5, 0.91, 0.58, 0.43},
    {ModelKind::kVar3, 512, 2, 0.54, 0.40, std::nullopt},
    {ModelKind::kVar3, 2048, 4, std::nullopt, std::nullopt, std::nullopt},
    {ModelKind::kVar3, 4096, 6, 0.82, 0.69, std::nullopt},
};

std::optional<double> reference(const Setting& s, Method m) {
  switch (m) {
    case Method::kLogSum: return s.ref_logsum;
    case Method::kLasso: return s.ref_lasso;
    case Method::kIidLasso: return s.ref_iid;
    default: return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  const int runs = argc > 1 ? std::atoi(argv[1]) : 100;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  const int threads = argc > 3 ? std::atoi(argv[3]) : 1;
  int outside = 0;
  for (const Setting& s : kSettings) {
    BenchmarkSpec spec;
    spec.kind = s.kind;
    spec.p = 120;
    spec.n = s.n;
    spec.blocks = s.blocks;
    spec.runs = runs;
    spec.seed = seed;
    spec.threads = threads;
    spec.mode = LambdaMode::kOracle;
    const auto t0 = std::chrono::steady_clock::now();
    const BenchmarkReport r = run_benchmark(spec);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s n=%lld M=%d K=%d (%.0f s, %d degenerate, %d failed)\n",
                std::string(to_string(s.kind)).c_str(), static_cast<long long>(s.n), s.blocks,
                r.grid_span, secs, r.degenerate_runs, r.failed_runs);
    for (const auto& a : r.methods) {
      const auto ref = reference(s, a.method);
      std::printf("  %-9s F1 %.3f +- %.3f  Hamming %.1f  %.3f s/run",
                  std::string(to_string(a.method)).c_str(), a.oracle_f1.mean,
                  a.oracle_f1.stddev, a.oracle_hamming.mean, a.seconds.mean);
      if (ref) {
        const bool ok = std::abs(a.oracle_f1.mean - *ref) <= 0.10;
        outside += !ok;
        std::printf("  reference %.2f %s", *ref, ok ? "(within 0.10)" : "(outside 0.10)");
      }
      std::printf("\n");
    }
    std::fflush(stdout);
  }
  return outside == 0 ? 0 : 1;
}
