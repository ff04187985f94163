#pragma once

#include <gelnet/problem.hpp>
#include <gelnet/screening.hpp>
#include <gelnet/targets.hpp>

#include <cstdint>
#include <vector>

namespace gelnet {

struct CvOptions {
  double alpha = 1.0;
  TargetChoice target;
  bool use_correlation = true;
  int folds = 5;
  std::uint64_t seed = 1;
  Solver solver = Solver::Gelnet;
  bool penalize_diagonal = true;
  bool screening = true;
  SolverConfig config;
  unsigned threads = 1;
};

struct CvScore {
  double lambda;
  /// Mean held-out score over valid folds; NaN if none was valid.
  double mean_score;
  int n_valid;
  std::vector<double> fold_scores;  // NaN marks an invalid cell
};

struct CvResult {
  double lambda_opt;
  FitResult fit;
  /// One row per grid value, in descending lambda order.
  std::vector<CvScore> scores;
};

/// -log det Theta + tr(S_test Theta); +inf if Theta is not positive definite.
double heldout_score(const SymMatrix& theta, const SymMatrix& s_test);

/// Fold label of every row: a seeded shuffle of 0..n-1, then position mod K.
std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed);

/// Builds the problem the CV driver would fit on `data` at `lambda`.
ProblemSpec cv_problem(const Matrix& data, double lambda, const CvOptions& options);

/// K-fold cross-validation over a lambda grid. Each fold walks the grid
/// from the largest lambda down, warm-starting every fit from the previous
/// one; targets are rebuilt from the training rows. The returned fit is a
/// cold-start refit on all rows at lambda_opt.
CvResult cross_validate(const Matrix& data, std::vector<double> lambda_grid,
                        const CvOptions& options);

/// Fits one problem the way the CV driver does (screened or not).
FitResult cv_fit(const ProblemSpec& spec, const CvOptions& options,
                 const std::optional<WarmStart>& warm = std::nullopt);

/// "0.9,0.5,0.1" or "geo:base,count" (base^0 ... base^{count-1}).
std::vector<double> parse_lambda_grid(const std::string& text);

}  // namespace gelnet
