#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtsfd/evaluation.hpp"
#include "dtsfd/graph.hpp"
#include "dtsfd/solver.hpp"
#include "dtsfd/spectral.hpp"
#include "dtsfd/synth.hpp"

namespace dtsfd {

using Json = nlohmann::ordered_json;

struct LoadOptions {
  bool transpose = false;  // rows = variables instead of rows = time
  bool header = false;     // skip a single header row
};

struct LoadedSeries {
  TimeSeries series;
  std::vector<std::string> warnings;
};

// CSV, comma separated, '.' decimal. Rows are time points unless transposed.
// Ragged rows, non-numeric cells and p < 2 raise InvalidArgument naming the
// 1-based row / column. An odd sample count drops the last sample.
LoadedSeries load_timeseries(const std::filesystem::path& path,
                             const LoadOptions& opts = {});
LoadedSeries read_timeseries(std::istream& in, const LoadOptions& opts = {},
                             const std::string& source = "<stream>");

// Truncates both series to the shorter (even) length; appends a warning when
// anything was dropped. Throws if p differs.
void align_pair(TimeSeries& x, TimeSeries& y,
                std::vector<std::string>& warnings);

struct PreprocessOptions {
  bool log_return = false;
  bool center = false;
  bool standardize = false;
};

// log-return (strictly positive input), then centring, then division by the
// per-variable sample standard deviation (n - 1). Log-returns shorten the
// series by one and are re-truncated to even length.
TimeSeries preprocess(const TimeSeries& series, const PreprocessOptions& opts,
                      std::vector<std::string>* warnings = nullptr);

// Rows = time, one column per variable, 17 significant digits.
void write_timeseries(const std::filesystem::path& path,
                      const TimeSeries& series);

// {"edges": [{"i", "j", "weight"}], "p", "M", "K", "penalty", "lambda",
// "converged"}; indices are 0-based.
Json edges_json(const DifferentialEstimate& est, const FrequencyGrid& grid);
EdgeSet edges_from_json(const Json& doc);
EdgeSet load_edges(const std::filesystem::path& path);

Json to_json(const PenaltySpec& p);
Json to_json(const SolverConfig& c);
Json to_json(const MetricReport& m);
Json to_json(const GroundTruth& t);
Json to_json(const BenchmarkReport& r);
Json to_json(const TheoryConstants& c);
Json to_json(const std::vector<RocPoint>& roc);

struct EmitOptions {
  bool dump_delta = false;  // delta_<k>.csv per frequency
};

// Writes edges.json, optional metrics.json, run_config.json and, on request,
// the per-frequency Hermitian estimates as CSV with re/im columns
// interleaved. Creates `dir` if needed; throws InvalidArgument when it cannot
// be written.
void emit_results(const DifferentialEstimate& est, const FrequencyGrid& grid,
                  const std::optional<Json>& metrics, const Json& run_config,
                  const std::filesystem::path& dir,
                  const EmitOptions& opts = {});

void write_json(const std::filesystem::path& path, const Json& doc);
Json read_json(const std::filesystem::path& path);

}  // namespace dtsfd
