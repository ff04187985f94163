#pragma once

#include <gelnet/cv.hpp>
#include <gelnet/evaluation.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace gelnet {

/// One estimator in a simulation study, e.g. "gelnet:0.5" or
/// "gelnet:0.5:true-diag" or "rope". The optional third field names
/// the target; "nodiag" leaves the diagonal unpenalized.
struct MethodSpec {
  Solver solver = Solver::Gelnet;
  double alpha = 1.0;
  TargetKind target = TargetKind::Zero;
  bool penalize_diagonal = true;
  std::string label;
};

MethodSpec parse_method(const std::string& text);
std::vector<MethodSpec> parse_methods(const std::string& list);

struct SimulationSetup {
  int model_id = 5;
  Index p = 100;
  Index n = 200;
  int reps = 10;
  std::vector<MethodSpec> methods;
  std::vector<double> lambda_grid;
  int folds = 5;
  std::uint64_t seed = 1;
  SolverConfig config;
  unsigned threads = 1;
};

struct SimulationRow {
  int model_id;
  Index p;
  Index n;
  int replicate;
  std::string method;
  double lambda;
  double alpha;
  std::string target;
  double kl;
  double l2;
  double sp;
  double f1;
  double mcc;
};

/// Runs reps x methods CV-tuned fits. Replicate r draws its ground truth
/// and data from streams derived from (seed, r), so every method sees the
/// same data.
std::vector<SimulationRow> run_simulation(const SimulationSetup& setup);

std::string simulation_csv_header();
std::string to_csv_line(const SimulationRow& row);

}  // namespace gelnet
