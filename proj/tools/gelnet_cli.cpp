// Command-line front end: estimate, cv, simulate, bench.

#include <gelnet/cv.hpp>
#include <gelnet/error.hpp>
#include <gelnet/evaluation.hpp>
#include <gelnet/gelnet.hpp>
#include <gelnet/screening.hpp>
#include <gelnet/simulation.hpp>
#include <gelnet/targets.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace gelnet;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr int kExitConverged = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Options shared by the subcommands that fit models.
struct TuningFlags {
  SolverConfig config;
  unsigned threads = default_threads();

  void attach(CLI::App& app) {
    app.add_option("--outer-thr", config.outer_thr, "Outer convergence threshold")->capture_default_str();
    app.add_option("--inner-thr", config.inner_thr, "Inner convergence threshold")->capture_default_str();
    app.add_option("--outer-maxit", config.outer_maxit, "Maximum outer sweeps")->capture_default_str();
    app.add_option("--inner-maxit", config.inner_maxit, "Maximum inner sweeps")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (default: machine parallelism)")
        ->check(CLI::PositiveNumber);
  }
};

// "auto" resolves to rope for alpha = 0 when rope accepts the problem,
// gelnet otherwise.
Solver resolve_solver(const std::string& name, double alpha, bool zero_constraints, bool penalize_diagonal) {
  if (name != "auto") return parse_solver(name);
  if (alpha == 0.0 && !zero_constraints && penalize_diagonal) return Solver::Rope;
  return Solver::Gelnet;
}

// Target flag: a kind name or file:<path> with p diagonal entries.
TargetChoice parse_target_flag(const std::string& text) {
  TargetChoice choice;
  const std::string prefix = "file:";
  if (text.rfind(prefix, 0) == 0) {
    const Matrix m = read_csv(text.substr(prefix.size()));
    if (m.rows() != 1 && m.cols() != 1) throw InputError("target file must hold a single row or column");
    choice.kind = TargetKind::Custom;
    choice.fixed = Eigen::Map<const Vector>(m.data(), m.size());
    return choice;
  }
  choice.kind = parse_target_kind(text);
  if (choice.kind == TargetKind::TrueDiagonal)
    throw InputError("the true-diag target needs a known precision matrix; use it in simulate");
  return choice;
}

ZeroConstraints read_zero_pairs(const std::string& path) {
  const Matrix m = read_csv(path);
  if (m.size() > 0 && m.cols() != 2) throw InputError("zero-constraint file must have two columns");
  std::vector<std::pair<Index, Index>> pairs;
  for (Index r = 0; r < m.rows(); ++r) {
    const double i = m(r, 0), j = m(r, 1);
    if (i != std::floor(i) || j != std::floor(j) || i < 0 || j < 0)
      throw InputError("zero-constraint indices must be non-negative integers");
    pairs.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
  }
  return ZeroConstraints(pairs);
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fit_meta(const FitResult& fit) {
  json j;
  j["niter"] = fit.niter;
  j["del"] = number_or_null(fit.del);
  j["conv"] = fit.conv;
  j["n_components"] = fit.n_components;
  j["max_block_size"] = fit.max_block_size;
  if (!fit.diagnostic.empty()) j["diagnostic"] = fit.diagnostic;
  return j;
}

void write_fit(const std::string& prefix, const FitResult& fit) {
  write_csv(prefix + ".theta.csv", fit.theta.mat());
  write_csv(prefix + ".w.csv", fit.w.mat());
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string s_path, data_path;
  double lambda = 0.0;
  double alpha = 1.0;
  std::string solver = "auto";
  std::string target = "zero";
  bool cor = false;
  bool no_diag_penalty = false;
  std::string zero_path;
  bool no_screening = false;
  std::string warm_theta, warm_w;
  std::string out_prefix = "gelnet";
  bool no_timing = false;
  TuningFlags tuning;
};

int run_estimate(const EstimateArgs& a) {
  ProblemOptions options;
  options.penalize_diagonal = !a.no_diag_penalty;
  options.config = a.tuning.config;
  if (!a.zero_path.empty()) options.zero = read_zero_pairs(a.zero_path);

  const TargetChoice choice = parse_target_flag(a.target);
  SymMatrix s;
  DiagonalTarget target;
  if (!a.s_path.empty()) {
    if (a.cor) throw InputError("--cor applies to --data only");
    if (choice.kind == TargetKind::NodewiseRegression) throw InputError("the nodewise target needs --data");
    s = SymMatrix::symmetrized(read_csv(a.s_path));
    target = build_target(choice, s, nullptr);
  } else {
    // Same S and target as a cross-validation refit on these rows.
    CvOptions o;
    o.alpha = a.alpha;
    o.target = choice;
    o.use_correlation = a.cor;
    o.penalize_diagonal = options.penalize_diagonal;
    o.config = options.config;
    const ProblemSpec base = cv_problem(read_csv(a.data_path), a.lambda, o);
    s = base.s;
    target = base.target;
  }
  ProblemSpec spec = validate(s.mat(), a.lambda, a.alpha, target.entries, options);
  spec.target.kind = target.kind;
  const Solver solver = resolve_solver(a.solver, a.alpha, !spec.zero.empty(), spec.penalize_diagonal);
  check_solver_compatible(spec, solver);

  std::optional<WarmStart> warm;
  if (!a.warm_theta.empty() || !a.warm_w.empty()) {
    if (a.warm_theta.empty() || a.warm_w.empty()) throw InputError("--warm-theta and --warm-w go together");
    warm = WarmStart{SymMatrix::symmetrized(read_csv(a.warm_theta)), SymMatrix::symmetrized(read_csv(a.warm_w))};
  }

  const auto t0 = Clock::now();
  const FitResult fit = a.no_screening ? fit_direct(spec, solver, warm)
                                       : solve_blockwise(spec, solver, warm, {a.tuning.threads});
  const double wall = elapsed_ms(t0);

  write_fit(a.out_prefix, fit);
  json meta;
  meta["schema"] = 1;
  meta["command"] = "estimate";
  meta["lambda"] = spec.lambda;
  meta["alpha"] = spec.alpha;
  meta["solver"] = to_string(solver);
  meta["target"] = to_string(target.kind);
  meta["penalize_diagonal"] = spec.penalize_diagonal;
  meta["screening"] = !a.no_screening;
  meta.update(fit_meta(fit));
  meta["wall_ms"] = a.no_timing ? json(nullptr) : json(wall);
  write_json(a.out_prefix + ".meta.json", meta);
  return fit.conv ? kExitConverged : kExitNotConverged;
}

// ---------------------------------------------------------------------- cv

struct CvArgs {
  std::string data_path;
  std::string grid = "geo:0.9,41";
  double alpha = 1.0;
  std::string solver = "auto";
  std::string target = "zero";
  bool cor = false;
  int folds = 5;
  std::uint64_t seed = 1;
  bool no_diag_penalty = false;
  bool no_screening = false;
  std::string out_prefix = "gelnet";
  bool no_timing = false;
  TuningFlags tuning;
};

int run_cv(const CvArgs& a) {
  const Matrix data = read_csv(a.data_path);
  CvOptions o;
  o.alpha = a.alpha;
  o.target = parse_target_flag(a.target);
  o.use_correlation = a.cor;
  o.folds = a.folds;
  o.seed = a.seed;
  o.penalize_diagonal = !a.no_diag_penalty;
  o.solver = resolve_solver(a.solver, a.alpha, false, o.penalize_diagonal);
  o.screening = !a.no_screening;
  o.config = a.tuning.config;
  o.threads = a.tuning.threads;

  const auto t0 = Clock::now();
  const CvResult r = cross_validate(data, parse_lambda_grid(a.grid), o);
  const double wall = elapsed_ms(t0);

  write_fit(a.out_prefix, r.fit);
  std::ofstream scores(a.out_prefix + ".scores.csv", std::ios::binary);
  if (!scores) throw InputError("cannot write " + a.out_prefix + ".scores.csv");
  scores << "lambda,mean_score,n_valid";
  for (int k = 0; k < a.folds; ++k) scores << ",fold" << k + 1;
  scores << '\n';
  for (const auto& row : r.scores) {
    scores << format_double(row.lambda) << ',' << format_double(row.mean_score) << ',' << row.n_valid;
    for (double v : row.fold_scores) scores << ',' << format_double(v);
    scores << '\n';
  }

  json meta;
  meta["schema"] = 1;
  meta["command"] = "cv";
  meta["lambda_opt"] = r.lambda_opt;
  meta["lambda"] = r.lambda_opt;
  meta["alpha"] = a.alpha;
  meta["solver"] = to_string(o.solver);
  meta["target"] = to_string(o.target.kind);
  meta["folds"] = a.folds;
  meta["seed"] = a.seed;
  meta["use_correlation"] = a.cor;
  meta.update(fit_meta(r.fit));
  meta["wall_ms"] = a.no_timing ? json(nullptr) : json(wall);
  write_json(a.out_prefix + ".meta.json", meta);

  std::cout << "lambda_opt," << format_double(r.lambda_opt) << '\n';
  return r.fit.conv ? kExitConverged : kExitNotConverged;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int model = 5;
  Index p = 100;
  Index n = 200;
  int reps = 10;
  std::string methods = "gelnet:1";
  std::string grid = "geo:0.9,41";
  int folds = 5;
  std::uint64_t seed = 1;
  std::string out;
  TuningFlags tuning;
};

int run_simulate(const SimulateArgs& a) {
  SimulationSetup setup;
  setup.model_id = a.model;
  setup.p = a.p;
  setup.n = a.n;
  setup.reps = a.reps;
  setup.methods = parse_methods(a.methods);
  setup.lambda_grid = parse_lambda_grid(a.grid);
  setup.folds = a.folds;
  setup.seed = a.seed;
  setup.config = a.tuning.config;
  setup.threads = a.tuning.threads;
  const auto rows = run_simulation(setup);

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out, std::ios::binary);
    if (!file) throw InputError("cannot write " + a.out);
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << simulation_csv_header() << '\n';
  for (const auto& row : rows) out << to_csv_line(row) << '\n';
  return kExitConverged;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  std::string scenario = "blocks";
  Index blocks = 5;
  Index block_size = 20;
  double within = 0.6;
  Index n = 400;
  int model = 5;
  Index p = 100;
  std::string grid = "geo:0.9,20";
  double lambda = 0.3;
  double alpha = 1.0;
  int repeats = 3;
  std::uint64_t seed = 1;
  TuningFlags tuning;
};

// Sample correlation of n draws from a block compound-symmetry model.
SymMatrix block_correlation(const BenchArgs& a) {
  const Index p = a.blocks * a.block_size;
  Matrix sigma = Matrix::Zero(p, p);
  for (Index b = 0; b < a.blocks; ++b)
    sigma.block(b * a.block_size, b * a.block_size, a.block_size, a.block_size).setConstant(a.within);
  sigma.diagonal().setOnes();
  return sample_correlation(sample_gaussian(SymMatrix::from_symmetric(sigma), a.n, a.seed));
}

double mean_ms(int repeats, const std::function<void()>& f) {
  double total = 0.0;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    f();
    total += elapsed_ms(t0);
  }
  return total / repeats;
}

int run_bench(const BenchArgs& a) {
  std::cout << "method,scenario,variant,repeats,mean_ms\n";
  auto emit = [&](const std::string& method, const std::string& variant, double ms) {
    std::cout << method << ',' << a.scenario << ',' << variant << ',' << a.repeats << ','
              << format_double(ms) << '\n';
  };
  bool all_conv = true;
  if (a.scenario == "blocks") {
    const SymMatrix s = block_correlation(a);
    ProblemOptions o;
    o.config = a.tuning.config;
    const ProblemSpec spec = validate(s.mat(), a.lambda, a.alpha, std::nullopt, o);
    for (Solver solver : {Solver::Gelnet, Solver::Dpgelnet}) {
      FitResult fit;
      emit(to_string(solver), "unscreened", mean_ms(a.repeats, [&] { fit = fit_direct(spec, solver); }));
      all_conv = all_conv && fit.conv;
      emit(to_string(solver), "screened",
           mean_ms(a.repeats, [&] { fit = solve_blockwise(spec, solver, std::nullopt, {a.tuning.threads}); }));
      all_conv = all_conv && fit.conv;
    }
  } else if (a.scenario == "path") {
    const auto truth = gen_model({a.model, a.p, a.seed});
    const SymMatrix s = sample_correlation(sample_gaussian(truth.sigma, a.n, derive_seed(a.seed, 1)));
    std::vector<double> grid = parse_lambda_grid(a.grid);
    std::sort(grid.begin(), grid.end(), std::greater<>());
    ProblemOptions o;
    o.config = a.tuning.config;
    for (Solver solver : {Solver::Gelnet, Solver::Dpgelnet}) {
      emit(to_string(solver), "cold", mean_ms(a.repeats, [&] {
             for (double lambda : grid) {
               const auto fit = fit_direct(validate(s.mat(), lambda, a.alpha, std::nullopt, o), solver);
               all_conv = all_conv && fit.conv;
             }
           }));
      emit(to_string(solver), "warm", mean_ms(a.repeats, [&] {
             std::optional<WarmStart> warm;
             for (double lambda : grid) {
               const auto fit = fit_direct(validate(s.mat(), lambda, a.alpha, std::nullopt, o), solver, warm);
               all_conv = all_conv && fit.conv;
               warm = WarmStart{fit.theta, fit.w};
             }
           }));
    }
  } else {
    throw InputError("unknown scenario '" + a.scenario + "' (expected blocks or path)");
  }
  return all_conv ? kExitConverged : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graphical elastic net precision matrix estimation"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Fit one penalized precision matrix");
  auto* s_opt = e->add_option("--s", est.s_path, "p x p covariance or correlation CSV")->check(CLI::ExistingFile);
  auto* d_opt = e->add_option("--data", est.data_path, "n x p data CSV")->check(CLI::ExistingFile);
  s_opt->excludes(d_opt);
  e->add_option("--lambda", est.lambda, "Penalty level")->required();
  e->add_option("--alpha", est.alpha, "Mix between L1 (1) and ridge (0)")->capture_default_str();
  e->add_option("--solver", est.solver, "gelnet, dpgelnet, rope or auto")
      ->check(CLI::IsMember({"gelnet", "dpgelnet", "rope", "auto"}))
      ->capture_default_str();
  e->add_option("--target", est.target, "Target kind or file:<path>")->capture_default_str();
  e->add_flag("--cor", est.cor, "Use the sample correlation of --data");
  e->add_flag("--no-diag-penalty", est.no_diag_penalty, "Leave the diagonal unpenalized");
  e->add_option("--zero", est.zero_path, "CSV of 0-based index pairs forced to zero")->check(CLI::ExistingFile);
  e->add_flag("--no-screening", est.no_screening, "Solve the whole problem in one piece");
  e->add_option("--warm-theta", est.warm_theta, "Warm-start precision CSV")->check(CLI::ExistingFile);
  e->add_option("--warm-w", est.warm_w, "Warm-start covariance CSV")->check(CLI::ExistingFile);
  e->add_option("--out-prefix", est.out_prefix, "Output file prefix")->capture_default_str();
  e->add_flag("--no-timing", est.no_timing, "Write wall_ms as null");
  est.tuning.attach(*e);

  CvArgs cv;
  auto* c = app.add_subcommand("cv", "Choose lambda by K-fold cross-validation and refit");
  c->add_option("--data", cv.data_path, "n x p data CSV")->required()->check(CLI::ExistingFile);
  c->add_option("--grid", cv.grid, "Comma list or geo:base,count")->capture_default_str();
  c->add_option("--alpha", cv.alpha, "Mix between L1 (1) and ridge (0)")->capture_default_str();
  c->add_option("--solver", cv.solver, "gelnet, dpgelnet, rope or auto")
      ->check(CLI::IsMember({"gelnet", "dpgelnet", "rope", "auto"}))
      ->capture_default_str();
  c->add_option("--target", cv.target, "Target kind or file:<path>")->capture_default_str();
  c->add_flag("--cor", cv.cor, "Fit on sample correlations");
  c->add_option("--folds", cv.folds, "Number of folds")->capture_default_str();
  c->add_option("--seed", cv.seed, "Fold assignment seed")->capture_default_str();
  c->add_flag("--no-diag-penalty", cv.no_diag_penalty, "Leave the diagonal unpenalized");
  c->add_flag("--no-screening", cv.no_screening, "Solve every problem in one piece");
  c->add_option("--out-prefix", cv.out_prefix, "Output file prefix")->capture_default_str();
  c->add_flag("--no-timing", cv.no_timing, "Write wall_ms as null");
  cv.tuning.attach(*c);

  SimulateArgs sim;
  auto* m = app.add_subcommand("simulate", "Replicated simulation study with CV-tuned methods");
  m->add_option("--model", sim.model, "Ground-truth model 1-6")->check(CLI::Range(1, 6))->capture_default_str();
  m->add_option("--p", sim.p, "Dimension")->capture_default_str();
  m->add_option("--n", sim.n, "Sample size")->capture_default_str();
  m->add_option("--reps", sim.reps, "Replicates")->capture_default_str();
  m->add_option("--methods", sim.methods, "Comma list of solver:alpha[:target|nodiag]")->capture_default_str();
  m->add_option("--grid", sim.grid, "Lambda grid")->capture_default_str();
  m->add_option("--folds", sim.folds, "CV folds")->capture_default_str();
  m->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  m->add_option("--out", sim.out, "Output CSV (default: stdout)");
  sim.tuning.attach(*m);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Timing of screened vs unscreened and cold vs warm fits");
  b->add_option("--scenario", bench.scenario, "blocks or path")->capture_default_str();
  b->add_option("--blocks", bench.blocks, "Number of blocks")->capture_default_str();
  b->add_option("--block-size", bench.block_size, "Variables per block")->capture_default_str();
  b->add_option("--within", bench.within, "Within-block correlation")->capture_default_str();
  b->add_option("--n", bench.n, "Sample size")->capture_default_str();
  b->add_option("--model", bench.model, "Model for the path scenario")->capture_default_str();
  b->add_option("--p", bench.p, "Dimension for the path scenario")->capture_default_str();
  b->add_option("--grid", bench.grid, "Lambda grid for the path scenario")->capture_default_str();
  b->add_option("--lambda", bench.lambda, "Penalty level for the blocks scenario")->capture_default_str();
  b->add_option("--alpha", bench.alpha, "Mix between L1 and ridge")->capture_default_str();
  b->add_option("--repeats", bench.repeats, "Timed repeats")->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--seed", bench.seed, "Data seed")->capture_default_str();
  bench.tuning.attach(*b);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::Error& err) {
    app.exit(err);
    return kExitError;
  }

  try {
    if (e->parsed()) {
      if (est.s_path.empty() && est.data_path.empty()) throw InputError("one of --s or --data is required");
      return run_estimate(est);
    }
    if (c->parsed()) return run_cv(cv);
    if (m->parsed()) return run_simulate(sim);
    return run_bench(bench);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitError;
  }
}
