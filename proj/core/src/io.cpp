#include "dtsfd/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dtsfd/error.hpp"

namespace dtsfd {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col,
                  const std::string& source) {
  const std::string_view t = trim(cell);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() ||
      !std::isfinite(v)) {
    throw InvalidArgument(source + ": row " + std::to_string(row) +
                          ", column " + std::to_string(col) +
                          ": not a finite number: '" + std::string(t) + "'");
  }
  return v;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void truncate_even(TimeSeries& s, const std::string& what,
                   std::vector<std::string>& warnings) {
  if (s.n() % 2 != 0) {
    warnings.push_back(what + ": odd sample count " + std::to_string(s.n()) +
                       ", dropping the last sample");
    s.values.conservativeResize(Eigen::NoChange, s.n() - 1);
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidArgument("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

}  // namespace

LoadedSeries read_timeseries(std::istream& in, const LoadOptions& opts,
                             const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row = 0;
  std::size_t width = 0;
  bool header_pending = opts.header;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<double> values;
    std::string_view rest(line);
    std::size_t col = 0;
    while (true) {
      ++col;
      const auto comma = rest.find(',');
      values.push_back(parse_cell(rest.substr(0, comma), row, col, source));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows.empty()) {
      width = values.size();
    } else if (values.size() != width) {
      throw InvalidArgument(source + ": row " + std::to_string(row) + " has " +
                            std::to_string(values.size()) +
                            " columns, expected " + std::to_string(width));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InvalidArgument(source + ": no data rows");

  LoadedSeries out;
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = static_cast<Eigen::Index>(width);
  RMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  out.series.values = opts.transpose ? m : RMatrix(m.transpose());
  if (out.series.p() < 2) {
    throw InvalidArgument(source + ": need at least 2 variables, found " +
                          std::to_string(out.series.p()));
  }
  truncate_even(out.series, source, out.warnings);
  if (out.series.n() < 2) {
    throw InvalidArgument(source + ": need at least 2 samples");
  }
  return out;
}

LoadedSeries load_timeseries(const fs::path& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  return read_timeseries(in, opts, path.string());
}

void align_pair(TimeSeries& x, TimeSeries& y,
                std::vector<std::string>& warnings) {
  if (x.p() != y.p()) {
    throw InvalidArgument("x has " + std::to_string(x.p()) +
                          " variables but y has " + std::to_string(y.p()));
  }
  Eigen::Index n = std::min(x.n(), y.n());
  n -= n % 2;
  if (x.n() != n || y.n() != n) {
    warnings.push_back("truncating x (n=" + std::to_string(x.n()) +
                       ") and y (n=" + std::to_string(y.n()) + ") to n=" +
                       std::to_string(n));
    x.values.conservativeResize(Eigen::NoChange, n);
    y.values.conservativeResize(Eigen::NoChange, n);
  }
}

TimeSeries preprocess(const TimeSeries& series, const PreprocessOptions& opts,
                      std::vector<std::string>* warnings) {
  TimeSeries out = series;
  if (opts.log_return) {
    const Eigen::Index p = series.p();
    const Eigen::Index n = series.n();
    if (n < 2) throw InvalidArgument("log_return: need at least 2 samples");
    for (Eigen::Index t = 0; t < n; ++t) {
      for (Eigen::Index i = 0; i < p; ++i) {
        if (!(series.values(i, t) > 0.0)) {
          throw InvalidArgument("log_return: non-positive value at variable " +
                                std::to_string(i + 1) + ", t = " +
                                std::to_string(t + 1));
        }
      }
    }
    out.values = (series.values.rightCols(n - 1).array() /
                  series.values.leftCols(n - 1).array())
                     .log()
                     .matrix();
    std::vector<std::string> local;
    truncate_even(out, "log_return", warnings ? *warnings : local);
  }
  if (opts.center || opts.standardize) {
    const RVector mean = out.values.rowwise().mean();
    out.values.colwise() -= mean;
  }
  if (opts.standardize) {
    const Eigen::Index n = out.n();
    if (n < 2) throw InvalidArgument("standardize: need at least 2 samples");
    for (Eigen::Index i = 0; i < out.p(); ++i) {
      const double var = out.values.row(i).squaredNorm() / (n - 1);
      if (!(var > 0.0)) {
        throw InvalidArgument("standardize: variable " + std::to_string(i + 1) +
                              " has zero variance");
      }
      out.values.row(i) /= std::sqrt(var);
    }
  }
  return out;
}

void write_timeseries(const fs::path& path, const TimeSeries& series) {
  std::ofstream out = open_out(path);
  for (Eigen::Index t = 0; t < series.n(); ++t) {
    for (Eigen::Index i = 0; i < series.p(); ++i) {
      if (i) out << ',';
      out << fmt17(series.values(i, t));
    }
    out << '\n';
  }
  if (!out) throw InvalidArgument("write failed for '" + path.string() + "'");
}

Json to_json(const PenaltySpec& p) {
  Json j;
  j["kind"] = std::string(to_string(p.kind));
  j["lambda"] = p.lambda;
  if (p.kind == PenaltyKind::kLogSum) j["epsilon"] = p.epsilon;
  if (p.kind == PenaltyKind::kScad) j["a"] = p.scad_a;
  return j;
}

Json to_json(const SolverConfig& c) {
  Json j;
  j["rho"] = c.rho;
  j["mu"] = c.mu;
  j["tau_abs"] = c.tau_abs;
  j["tau_rel"] = c.tau_rel;
  j["max_iterations"] = c.max_iterations;
  j["lla_passes"] = c.lla_passes;
  j["warm_start"] = c.warm_start;
  return j;
}

Json to_json(const MetricReport& m) {
  Json j;
  j["f1"] = m.f1;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["hamming"] = m.hamming;
  j["normalized_hamming"] = m.normalized_hamming;
  return j;
}

namespace {

Json edge_list(const EdgeSet& edges) {
  Json arr = Json::array();
  for (const Edge& e : edges) arr.push_back(Json::array({e.i, e.j}));
  return arr;
}

Json summary_json(const Summary& s) {
  Json j;
  j["mean"] = s.mean;
  j["std"] = s.stddev;
  j["median"] = s.median;
  j["count"] = s.count;
  return j;
}

Json matrix_json(const RMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json to_json(const GroundTruth& t) {
  Json j;
  j["edges"] = edge_list(t.edges);
  j["b"] = t.b;
  j["tau"] = t.tau;
  j["frequency_points"] = t.frequency_points;
  j["d"] = matrix_json(t.d);
  return j;
}

Json to_json(const BenchmarkReport& r) {
  const BenchmarkSpec& s = r.spec;
  Json j;
  j["kind"] = std::string(to_string(s.kind));
  j["p"] = s.p;
  j["n"] = s.n;
  j["M"] = s.blocks;
  j["K"] = r.grid_span;
  j["runs"] = s.runs;
  j["seed"] = s.seed;
  j["lambda_mode"] = std::string(to_string(s.mode));
  j["block_size"] = s.block_size;
  j["epsilon"] = s.epsilon;
  j["scad_a"] = s.scad_a;
  j["solver"] = to_json(s.solver);
  j["warm_path"] = s.warm_path;
  j["null_pair"] = s.null_pair;
  j["failed_runs"] = r.failed_runs;
  j["degenerate_runs"] = r.degenerate_runs;
  Json methods = Json::array();
  const bool oracle = s.mode != LambdaMode::kBic;
  const bool bic = s.mode != LambdaMode::kOracle;
  for (const MethodAggregate& a : r.methods) {
    Json m;
    m["method"] = std::string(to_string(a.method));
    m["completed"] = a.completed;
    m["failures"] = a.failures;
    if (oracle) {
      m["oracle"] = {{"f1", summary_json(a.oracle_f1)},
                     {"hamming", summary_json(a.oracle_hamming)},
                     {"normalized_hamming",
                      summary_json(a.oracle_normalized_hamming)}};
    }
    if (bic) {
      m["bic"] = {{"f1", summary_json(a.bic_f1)},
                  {"hamming", summary_json(a.bic_hamming)},
                  {"normalized_hamming", summary_json(a.bic_normalized_hamming)}};
    }
    m["seconds"] = summary_json(a.seconds);
    methods.push_back(std::move(m));
  }
  j["methods"] = std::move(methods);
  Json runs = Json::array();
  for (const BenchmarkRun& run : r.runs) {
    Json rj;
    rj["index"] = run.index;
    rj["seed"] = run.seed;
    rj["true_edges"] = run.true_edges;
    rj["redraws"] = run.redraws;
    if (run.degenerate) rj["degenerate"] = true;
    if (!run.error.empty()) rj["error"] = run.error;
    Json per = Json::array();
    for (const MethodRun& mr : run.methods) {
      Json mj;
      mj["method"] = std::string(to_string(mr.method));
      if (!mr.ok) {
        mj["error"] = mr.error;
      } else {
        if (oracle) {
          mj["oracle"] = {{"lambda", mr.oracle.lambda},
                          {"metrics", to_json(mr.oracle.metrics)}};
        }
        if (bic) {
          mj["bic"] = {{"lambda", mr.bic.lambda},
                       {"metrics", to_json(mr.bic.metrics)}};
        }
      }
      mj["seconds"] = mr.seconds;
      per.push_back(std::move(mj));
    }
    rj["methods"] = std::move(per);
    runs.push_back(std::move(rj));
  }
  j["per_run"] = std::move(runs);
  return j;
}

Json to_json(const TheoryConstants& c) {
  Json j;
  j["B_xy"] = c.b_xy;
  j["B_d"] = c.b_d;
  j["phi_min"] = c.phi_min;
  j["sigma_xy"] = c.sigma_xy;
  j["C_0"] = c.c0;
  j["B_init"] = c.b_init;
  j["N_1"] = c.n1;
  j["N_2"] = c.n2;
  j["N_3"] = c.n3;
  j["N_4"] = c.n4;
  j["lambda_lower"] = c.lambda_lower;
  j["error_bound"] = c.error_bound;
  j["nu"] = c.nu;
  j["gamma"] = c.gamma;
  j["saturated"] = c.saturated;
  return j;
}

Json to_json(const std::vector<RocPoint>& roc) {
  Json arr = Json::array();
  for (const RocPoint& r : roc) {
    arr.push_back({{"lambda", r.lambda},
                   {"tpr", r.tpr},
                   {"fpr", r.fpr},
                   {"edges", r.edges}});
  }
  return arr;
}

Json edges_json(const DifferentialEstimate& est, const FrequencyGrid& grid) {
  Json j;
  Json edges = Json::array();
  for (const Edge& e : est.edges) {
    edges.push_back({{"i", e.i}, {"j", e.j}, {"weight", est.group_norms(e.i, e.j)}});
  }
  j["edges"] = std::move(edges);
  j["p"] = est.p();
  j["M"] = grid.blocks;
  j["K"] = grid.span;
  j["penalty"] = to_json(est.penalty);
  j["lambda"] = est.penalty.lambda;
  j["converged"] = est.converged;
  return j;
}

EdgeSet edges_from_json(const Json& doc) {
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw InvalidArgument("edges document has no 'edges' array");
  }
  EdgeSet out;
  for (const Json& e : doc["edges"]) {
    // {"i", "j", ...} objects or bare [i, j] pairs
    if (e.is_array()) {
      if (e.size() != 2) throw InvalidArgument("edge entries need two indices");
      out.insert(make_edge(e[0].get<int>(), e[1].get<int>()));
    } else {
      out.insert(make_edge(e.at("i").get<int>(), e.at("j").get<int>()));
    }
  }
  return out;
}

void write_json(const fs::path& path, const Json& doc) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw InvalidArgument("write failed for '" + path.string() + "'");
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

EdgeSet load_edges(const fs::path& path) {
  return edges_from_json(read_json(path));
}

void emit_results(const DifferentialEstimate& est, const FrequencyGrid& grid,
                  const std::optional<Json>& metrics, const Json& run_config,
                  const fs::path& dir, const EmitOptions& opts) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw InvalidArgument("cannot create output directory '" + dir.string() +
                          "': " + ec.message());
  }
  write_json(dir / "edges.json", edges_json(est, grid));
  if (metrics) write_json(dir / "metrics.json", *metrics);
  write_json(dir / "run_config.json", run_config);
  if (opts.dump_delta) {
    for (int k = 0; k < est.frequencies(); ++k) {
      std::ofstream out = open_out(dir / ("delta_" + std::to_string(k + 1) + ".csv"));
      const CMatrix& d = est.delta[k].values();
      for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
          if (j) out << ',';
          out << fmt17(d(i, j).real()) << ',' << fmt17(d(i, j).imag());
        }
        out << '\n';
      }
    }
  }
}

}  // namespace dtsfd
