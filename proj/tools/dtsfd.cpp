#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "third_party/CLI11.hpp"

#include "dtsfd/error.hpp"
#include "dtsfd/evaluation.hpp"
#include "dtsfd/io.hpp"
#include "dtsfd/solver.hpp"
#include "dtsfd/spectral.hpp"
#include "dtsfd/synth.hpp"
#include "dtsfd/tuning.hpp"

namespace fs = std::filesystem;
using namespace dtsfd;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out = "dtsfd_out";
};

struct InputArgs {
  std::string x_path;
  std::string y_path;
  bool transpose = false;
  bool header = false;
  bool log_return = false;
  bool center = false;
  bool standardize = false;
};

struct GridArgs {
  int blocks = 4;
  int span = 0;  // expert mode when > 0
};

struct PenaltyArgs {
  std::string kind = "logsum";
  double epsilon = 1e-3;
  double scad_a = 3.7;
};

void add_input(CLI::App* cmd, InputArgs& a) {
  cmd->add_option("--x", a.x_path, "CSV for the first condition")->required();
  cmd->add_option("--y", a.y_path, "CSV for the second condition")->required();
  cmd->add_flag("--transpose", a.transpose, "rows are variables");
  cmd->add_flag("--header", a.header, "skip one header row");
  cmd->add_flag("--log-return", a.log_return, "log-returns before anything else");
  cmd->add_flag("--center", a.center, "subtract per-variable means");
  cmd->add_flag("--standardize", a.standardize, "unit sample variance");
}

void add_grid(CLI::App* cmd, GridArgs& g) {
  cmd->add_option("--blocks,-M", g.blocks, "number of frequency blocks")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--span,-K", g.span,
                  "odd smoothing span; overrides the rule for K and derives M");
}

void add_penalty(CLI::App* cmd, PenaltyArgs& p, bool allow_iid) {
  std::vector<std::string> kinds{"lasso", "logsum", "log-sum", "scad"};
  if (allow_iid) kinds.push_back("iid-lasso");
  cmd->add_option("--penalty", p.kind, "penalty")->check(CLI::IsMember(kinds));
  cmd->add_option("--epsilon", p.epsilon, "log-sum epsilon");
  cmd->add_option("--scad-a", p.scad_a, "SCAD a");
}

void add_solver(CLI::App* cmd, SolverConfig& c) {
  cmd->add_option("--rho", c.rho, "initial ADMM rho");
  cmd->add_option("--mu", c.mu, "residual ratio for rho updates");
  cmd->add_option("--tau-abs", c.tau_abs);
  cmd->add_option("--tau-rel", c.tau_rel);
  cmd->add_option("--max-iter", c.max_iterations, "ADMM iteration cap");
  cmd->add_option("--lla-passes", c.lla_passes, "0 = penalty default");
}

struct Inputs {
  TimeSeries x;
  TimeSeries y;
  std::vector<std::string> warnings;
};

Inputs load_inputs(const InputArgs& a) {
  const LoadOptions lo{a.transpose, a.header};
  Inputs in;
  LoadedSeries lx = load_timeseries(a.x_path, lo);
  LoadedSeries ly = load_timeseries(a.y_path, lo);
  in.warnings = lx.warnings;
  in.warnings.insert(in.warnings.end(), ly.warnings.begin(), ly.warnings.end());
  const PreprocessOptions po{a.log_return, a.center, a.standardize};
  in.x = preprocess(lx.series, po, &in.warnings);
  in.y = preprocess(ly.series, po, &in.warnings);
  align_pair(in.x, in.y, in.warnings);
  for (const auto& w : in.warnings) std::cerr << "warning: " << w << '\n';
  return in;
}

FrequencyGrid make_grid(std::int64_t n, const GridArgs& g) {
  return g.span > 0 ? FrequencyGrid::from_span(n, g.span)
                    : FrequencyGrid::from_blocks(n, g.blocks);
}

PenaltySpec make_penalty(const PenaltyArgs& a, double lambda) {
  PenaltySpec p;
  p.kind = a.kind == "iid-lasso" ? PenaltyKind::kLasso : parse_penalty_kind(a.kind);
  p.lambda = lambda;
  p.epsilon = a.epsilon;
  p.scad_a = a.scad_a;
  return p;
}

Json input_json(const InputArgs& a) {
  return {{"x", a.x_path},         {"y", a.y_path},
          {"transpose", a.transpose}, {"header", a.header},
          {"log_return", a.log_return}, {"center", a.center},
          {"standardize", a.standardize}};
}

Json grid_json(const FrequencyGrid& g) {
  return {{"n", g.n}, {"M", g.blocks}, {"K", g.span}, {"m_t", g.half_span},
          {"time_domain", g.time_domain}};
}

void print_summary(const DifferentialEstimate& est, const fs::path& out) {
  std::printf("lambda %.6g  edges %zu  converged %s  -> %s\n",
              est.penalty.lambda, est.edges.size(), est.converged ? "yes" : "no",
              out.string().c_str());
}

// ---- simulate ----

struct SimulateArgs {
  std::string model = "ar";
  int p = 60;
  int block_size = 0;
  std::int64_t n = 2048;
};

int run_simulate(const Globals& g, const SimulateArgs& a) {
  Rng rng(g.seed);
  const BenchmarkInstance inst =
      draw_benchmark_instance(parse_model_kind(a.model), a.p, rng, a.block_size);
  const TimeSeries x = simulate(inst.models.x, a.n, rng);
  const TimeSeries y = simulate(inst.models.y, a.n, rng);
  const fs::path dir(g.out);
  fs::create_directories(dir);
  write_timeseries(dir / "x.csv", x);
  write_timeseries(dir / "y.csv", y);
  Json truth = to_json(inst.truth);
  truth["replaced_block"] = inst.models.replaced_block;
  truth["block_size"] = inst.models.x.block_size;
  truth["redraws"] = inst.redraws;
  write_json(dir / "truth.json", truth);
  write_json(dir / "run_config.json",
             Json{{"command", "simulate"}, {"seed", g.seed}, {"model", a.model},
                  {"p", a.p}, {"block_size", inst.models.x.block_size},
                  {"n", a.n}});
  std::printf("p %d  n %lld  true edges %zu  -> %s\n", a.p,
              static_cast<long long>(a.n), inst.truth.edges.size(),
              dir.string().c_str());
  return 0;
}

// ---- estimate ----

struct EstimateArgs {
  InputArgs input;
  GridArgs grid;
  PenaltyArgs penalty;
  SolverConfig solver;
  double lambda = 0.1;
  std::string truth;
  bool dump_delta = false;
};

std::optional<Json> metrics_for(const std::string& truth_path,
                                const DifferentialEstimate& est) {
  if (truth_path.empty()) return std::nullopt;
  return to_json(score_edges(est.edges, load_edges(truth_path),
                             static_cast<int>(est.p())));
}

int run_estimate(const Globals& g, const EstimateArgs& a) {
  const Inputs in = load_inputs(a.input);
  const PenaltySpec pen = make_penalty(a.penalty, a.lambda);
  pen.validate();
  a.solver.validate();
  DifferentialEstimate est;
  FrequencyGrid grid;
  if (a.penalty.kind == "iid-lasso") {
    grid = FrequencyGrid::time_domain_grid(in.x.n());
    est = estimate_iid(in.x, in.y, pen, a.solver);
  } else {
    grid = make_grid(in.x.n(), a.grid);
    est = estimate(spectral_statistics(in.x, in.y, grid), pen, a.solver);
  }
  const Json cfg{{"command", "estimate"}, {"seed", g.seed},
                 {"input", input_json(a.input)}, {"grid", grid_json(grid)},
                 {"penalty", to_json(pen)},   {"solver", to_json(a.solver)},
                 {"warnings", in.warnings}};
  emit_results(est, grid, metrics_for(a.truth, est), cfg, g.out,
               EmitOptions{a.dump_delta});
  print_summary(est, g.out);
  return 0;
}

// ---- tune ----

struct TuneArgs {
  InputArgs input;
  GridArgs grid;
  PenaltyArgs penalty;
  SolverConfig solver;
  LambdaSearchOptions search;
  std::string scaling = "symmetric";
  std::string truth;
  bool dump_delta = false;
};

int run_tune(const Globals& g, const TuneArgs& a) {
  const Inputs in = load_inputs(a.input);
  a.solver.validate();
  const bool iid = a.penalty.kind == "iid-lasso";
  const FrequencyGrid grid = iid ? FrequencyGrid::time_domain_grid(in.x.n())
                                 : make_grid(in.x.n(), a.grid);
  const SpectralStatistics stats =
      iid ? covariance_statistics(in.x, in.y) : spectral_statistics(in.x, in.y, grid);
  const PenaltySpec pen = make_penalty(a.penalty, 1.0);
  pen.validate();
  const LambdaGrid lg = lambda_grid(stats, pen, a.solver, a.search);
  if (lg.degenerate) {
    throw InvalidArgument("tune: the two inputs have identical statistics");
  }
  const BicScaling mode =
      a.scaling == "one-sided" ? BicScaling::kOneSided : BicScaling::kSymmetric;
  const Selection sel = select_lambda(stats, pen, a.solver, lg.values, mode);
  Json trace = Json::array();
  for (std::size_t i = 0; i < lg.values.size(); ++i) {
    trace.push_back({{"lambda", lg.values[i]}, {"bic", sel.bic_trace[i]}});
  }
  const Json cfg{{"command", "tune"},
                 {"seed", g.seed},
                 {"input", input_json(a.input)},
                 {"grid", grid_json(grid)},
                 {"penalty", to_json(pen)},
                 {"solver", to_json(a.solver)},
                 {"lambda_sm", lg.lambda_sm},
                 {"lambda_star", sel.lambda_star},
                 {"bic_scaling", a.scaling},
                 {"bic_trace", trace},
                 {"warnings", in.warnings}};
  emit_results(sel.estimate, grid, metrics_for(a.truth, sel.estimate), cfg,
               g.out, EmitOptions{a.dump_delta});
  print_summary(sel.estimate, g.out);
  return 0;
}

// ---- bench ----

struct BenchArgs {
  std::string model = "ar";
  int p = 60;
  int block_size = 0;
  std::int64_t n = 2048;
  int blocks = 4;
  int runs = 20;
  std::vector<std::string> methods{"logsum", "lasso", "iid-lasso"};
  std::string mode = "oracle";
  double epsilon = 1e-3;
  double scad_a = 3.7;
  SolverConfig solver;
  bool cold_path = false;
  bool null_pair = false;
};

void print_summary_row(const char* label, const Summary& s) {
  std::printf("  %-22s %.3f +- %.3f (median %.3f, n=%d)\n", label, s.mean,
              s.stddev, s.median, s.count);
}

int run_bench(const Globals& g, const BenchArgs& a) {
  BenchmarkSpec spec;
  spec.kind = parse_model_kind(a.model);
  spec.p = a.p;
  spec.block_size = a.block_size;
  spec.n = a.n;
  spec.blocks = a.blocks;
  spec.runs = a.runs;
  spec.seed = g.seed;
  spec.threads = g.threads;
  spec.mode = parse_lambda_mode(a.mode);
  spec.epsilon = a.epsilon;
  spec.scad_a = a.scad_a;
  spec.solver = a.solver;
  spec.warm_path = !a.cold_path;
  spec.null_pair = a.null_pair;
  spec.methods.clear();
  for (const auto& m : a.methods) spec.methods.push_back(parse_method(m));
  spec.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const BenchmarkReport report = run_benchmark(spec);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(g.out);
  write_json(fs::path(g.out) / "bench.json", to_json(report));
  std::printf("%s p=%d n=%lld M=%d K=%d runs=%d (degenerate %d, failed %d) %.1fs\n",
              a.model.c_str(), a.p, static_cast<long long>(a.n), a.blocks,
              report.grid_span, a.runs, report.degenerate_runs,
              report.failed_runs, secs);
  for (const MethodAggregate& m : report.methods) {
    std::printf("%s (completed %d, failures %d)\n",
                std::string(to_string(m.method)).c_str(), m.completed, m.failures);
    if (spec.mode != LambdaMode::kBic) {
      print_summary_row("oracle F1", m.oracle_f1);
      print_summary_row("oracle Hamming %", m.oracle_normalized_hamming);
    }
    if (spec.mode != LambdaMode::kOracle) {
      print_summary_row("BIC F1", m.bic_f1);
      print_summary_row("BIC Hamming %", m.bic_normalized_hamming);
    }
    print_summary_row("seconds", m.seconds);
  }
  return 0;
}

// ---- roc ----

struct RocArgs {
  InputArgs input;
  GridArgs grid;
  PenaltyArgs penalty;
  SolverConfig solver;
  std::string truth;
  int points = 20;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

int run_roc(const Globals& g, const RocArgs& a) {
  const Inputs in = load_inputs(a.input);
  a.solver.validate();
  const bool iid = a.penalty.kind == "iid-lasso";
  const FrequencyGrid grid = iid ? FrequencyGrid::time_domain_grid(in.x.n())
                                 : make_grid(in.x.n(), a.grid);
  const SpectralStatistics stats =
      iid ? covariance_statistics(in.x, in.y) : spectral_statistics(in.x, in.y, grid);
  const PenaltySpec pen = make_penalty(a.penalty, 1.0);
  pen.validate();
  double hi = a.lambda_max;
  double lo = a.lambda_min;
  if (hi <= 0.0) hi = zero_solution_bound(stats);
  if (lo <= 0.0) lo = hi * 1e-3;
  if (!(lo < hi)) throw InvalidArgument("roc: need lambda-min < lambda-max");
  const std::vector<double> lambdas = geometric_grid(lo, hi, a.points);
  const std::vector<RocPoint> roc =
      roc_sweep(stats, pen, a.solver, load_edges(a.truth), lambdas);
  fs::create_directories(g.out);
  write_json(fs::path(g.out) / "roc.json", to_json(roc));
  write_json(fs::path(g.out) / "run_config.json",
             Json{{"command", "roc"}, {"seed", g.seed},
                  {"input", input_json(a.input)}, {"grid", grid_json(grid)},
                  {"penalty", to_json(pen)}, {"solver", to_json(a.solver)},
                  {"truth", a.truth}});
  for (const RocPoint& r : roc) {
    std::printf("lambda %.6g  tpr %.3f  fpr %.4f  edges %zu\n", r.lambda, r.tpr,
                r.fpr, r.edges);
  }
  return 0;
}

// ---- diagnose ----

struct DiagnoseArgs {
  std::string model = "ar";
  int p = 60;
  int block_size = 0;
  std::int64_t n = 2048;
  int blocks = 4;
  int s = 0;
  double tau = 3.0;
  PenaltyArgs penalty;
};

int run_diagnose(const Globals& g, const DiagnoseArgs& a) {
  Rng rng(g.seed);
  const BenchmarkInstance inst =
      draw_benchmark_instance(parse_model_kind(a.model), a.p, rng, a.block_size);
  const FrequencyGrid grid = FrequencyGrid::from_blocks(a.n, a.blocks);
  TheoryInputs ti;
  ti.n = a.n;
  ti.blocks = grid.blocks;
  ti.span = grid.span;
  ti.s = a.s;
  ti.tau = a.tau;
  ti.penalty = make_penalty(a.penalty, 1.0);
  const TheoryConstants c = theory_diagnostics(inst.models.x, inst.models.y, ti);
  fs::create_directories(g.out);
  Json doc = to_json(c);
  doc["grid"] = grid_json(grid);
  doc["true_edges"] = inst.truth.edges.size();
  write_json(fs::path(g.out) / "diagnose.json", doc);
  std::cout << doc.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential graph estimation for multivariate time series"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads for bench")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output directory")->capture_default_str();

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "draw a model pair and simulate x, y");
  c_sim->add_option("--model", sim.model)->check(CLI::IsMember({"ar", "ma", "var3", "ma3"}));
  c_sim->add_option("--p", sim.p);
  c_sim->add_option("--block-size", sim.block_size);
  c_sim->add_option("--n", sim.n);

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "estimate at a fixed lambda");
  add_input(c_est, est.input);
  add_grid(c_est, est.grid);
  add_penalty(c_est, est.penalty, true);
  add_solver(c_est, est.solver);
  c_est->add_option("--lambda", est.lambda)->required();
  c_est->add_option("--truth", est.truth, "edges JSON to score against");
  c_est->add_flag("--dump-delta", est.dump_delta);

  TuneArgs tune;
  auto* c_tune = app.add_subcommand("tune", "lambda grid + BIC selection");
  add_input(c_tune, tune.input);
  add_grid(c_tune, tune.grid);
  add_penalty(c_tune, tune.penalty, true);
  add_solver(c_tune, tune.solver);
  c_tune->add_option("--points", tune.search.points);
  c_tune->add_option("--bic-scaling", tune.scaling)
      ->check(CLI::IsMember({"symmetric", "one-sided"}));
  c_tune->add_option("--truth", tune.truth);
  c_tune->add_flag("--dump-delta", tune.dump_delta);

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Monte Carlo benchmark");
  c_bench->add_option("--model", bench.model)->check(CLI::IsMember({"ar", "ma", "var3", "ma3"}));
  c_bench->add_option("--p", bench.p);
  c_bench->add_option("--block-size", bench.block_size);
  c_bench->add_option("--n", bench.n);
  c_bench->add_option("--blocks,-M", bench.blocks);
  c_bench->add_option("--runs", bench.runs);
  c_bench->add_option("--methods", bench.methods)->delimiter(',');
  c_bench->add_option("--mode", bench.mode)->check(CLI::IsMember({"oracle", "bic", "both"}));
  c_bench->add_option("--epsilon", bench.epsilon);
  c_bench->add_option("--scad-a", bench.scad_a);
  c_bench->add_flag("--cold-path", bench.cold_path,
                    "solve every grid lambda from zero");
  c_bench->add_flag("--null-pair", bench.null_pair,
                    "simulate y from x's model (no true edges)");
  add_solver(c_bench, bench.solver);

  RocArgs roc;
  auto* c_roc = app.add_subcommand("roc", "TPR / FPR along a lambda path");
  add_input(c_roc, roc.input);
  add_grid(c_roc, roc.grid);
  add_penalty(c_roc, roc.penalty, true);
  add_solver(c_roc, roc.solver);
  c_roc->add_option("--truth", roc.truth)->required();
  c_roc->add_option("--points", roc.points);
  c_roc->add_option("--lambda-min", roc.lambda_min);
  c_roc->add_option("--lambda-max", roc.lambda_max);

  DiagnoseArgs diag;
  auto* c_diag = app.add_subcommand("diagnose", "theory constants for a drawn model pair");
  c_diag->add_option("--model", diag.model)->check(CLI::IsMember({"ar", "ma", "var3", "ma3"}));
  c_diag->add_option("--p", diag.p);
  c_diag->add_option("--block-size", diag.block_size);
  c_diag->add_option("--n", diag.n);
  c_diag->add_option("--blocks,-M", diag.blocks);
  c_diag->add_option("--s", diag.s, "edge count; 0 = from the population support");
  c_diag->add_option("--tau", diag.tau);
  add_penalty(c_diag, diag.penalty, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*c_sim) return run_simulate(g, sim);
    if (*c_est) return run_estimate(g, est);
    if (*c_tune) return run_tune(g, tune);
    if (*c_bench) return run_bench(g, bench);
    if (*c_roc) return run_roc(g, roc);
    if (*c_diag) return run_diagnose(g, diag);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
