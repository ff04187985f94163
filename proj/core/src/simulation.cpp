#include <gelnet/error.hpp>
#include <gelnet/simulation.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace gelnet {

MethodSpec parse_method(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty() || parts.size() > 3) throw InputError("bad method '" + text + "'");

  MethodSpec m;
  m.label = text;
  m.solver = parse_solver(parts[0]);
  if (m.solver == Solver::Rope) {
    m.alpha = 0.0;
    if (parts.size() > 1 && std::stod(parts[1]) != 0.0)
      throw InputError("rope requires alpha = 0");
  } else if (parts.size() > 1) {
    try {
      m.alpha = std::stod(parts[1]);
    } catch (const std::exception&) {
      throw InputError("bad alpha in method '" + text + "'");
    }
    if (!(m.alpha >= 0.0 && m.alpha <= 1.0)) throw InputError("alpha outside [0, 1]");
  }
  if (parts.size() == 3) {
    if (parts[2] == "nodiag") {
      m.penalize_diagonal = false;
    } else {
      m.target = parse_target_kind(parts[2]);
    }
  }
  if (m.solver == Solver::Dpgelnet && m.target != TargetKind::Zero)
    throw InputError("dpgelnet does not support target matrices");
  return m;
}

std::vector<MethodSpec> parse_methods(const std::string& list) {
  std::vector<MethodSpec> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(parse_method(item));
  if (out.empty()) throw InputError("no methods given");
  return out;
}

namespace {

std::vector<SimulationRow> run_replicate(const SimulationSetup& setup, int r,
                                         const std::vector<double>& grid) {
  const auto rr = static_cast<std::uint64_t>(r);
  const GroundTruth truth = gen_model({setup.model_id, setup.p, derive_seed(setup.seed, 3 * rr)});
  const Matrix data = sample_gaussian(truth.sigma, setup.n, derive_seed(setup.seed, 3 * rr + 1));
  const std::uint64_t fold_seed = derive_seed(setup.seed, 3 * rr + 2);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<SimulationRow> rows;
  for (const auto& m : setup.methods) {
    CvOptions o;
    o.alpha = m.alpha;
    o.target.kind = m.target;
    if (m.target == TargetKind::TrueDiagonal) o.target.fixed = truth.theta.diag();
    o.folds = setup.folds;
    o.seed = fold_seed;
    o.solver = m.solver;
    o.penalize_diagonal = m.penalize_diagonal;
    o.config = setup.config;

    SimulationRow row{setup.model_id, setup.p, setup.n, r, m.label, nan, m.alpha,
                      m.penalize_diagonal ? to_string(m.target) : "nodiag",
                      nan, nan, nan, nan, nan};
    try {
      const CvResult res = cross_validate(data, grid, o);
      row.lambda = res.lambda_opt;
      row.l2 = l2_loss(truth.theta, res.fit.theta);
      row.sp = sp_loss(truth.theta, res.fit.theta);
      const auto c = graph_confusion(res.fit.theta, truth.theta);
      row.f1 = f1_score(c);
      row.mcc = mcc_score(c);
      row.kl = kl_loss(truth.sigma, res.fit.theta);
    } catch (const NumericalError&) {
      // Leave the metrics NaN; one failed replicate should not stop the study.
    } catch (const InputError&) {
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<SimulationRow> run_simulation(const SimulationSetup& setup) {
  if (setup.reps < 1) throw InputError("reps must be positive");
  if (setup.methods.empty()) throw InputError("no methods given");
  if (setup.n < setup.folds) throw InputError("n must be at least the number of folds");
  std::vector<double> grid = setup.lambda_grid;
  if (grid.empty()) grid = parse_lambda_grid("geo:0.9,41");

  const auto reps = static_cast<size_t>(setup.reps);
  std::vector<std::vector<SimulationRow>> per_rep(reps);
  std::vector<std::exception_ptr> errors(reps);
  auto work = [&](size_t r) {
    try {
      per_rep[r] = run_replicate(setup, static_cast<int>(r), grid);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };

  unsigned threads = setup.threads == 0 ? std::thread::hardware_concurrency() : setup.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  if (threads == 1) {
    for (size_t r = 0; r < reps; ++r) work(r);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (size_t r = next++; r < reps; r = next++) work(r);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<SimulationRow> rows;
  for (auto& v : per_rep)
    for (auto& row : v) rows.push_back(std::move(row));
  return rows;
}

std::string simulation_csv_header() { return "model,p,n,method,lambda,alpha,target,KL,L2,SP,F1,MCC"; }

std::string to_csv_line(const SimulationRow& row) {
  std::string out = std::to_string(row.model_id) + "," + std::to_string(row.p) + "," +
                    std::to_string(row.n) + "," + row.method + "," + format_double(row.lambda) +
                    "," + format_double(row.alpha) + "," + row.target;
  for (double v : {row.kl, row.l2, row.sp, row.f1, row.mcc}) out += "," + format_double(v);
  return out;
}

}  // namespace gelnet
