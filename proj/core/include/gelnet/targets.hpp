#pragma once

#include <gelnet/problem.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gelnet {

DiagonalTarget target_identity(Index p);

/// v I with v = 1 / mean(diag S).
DiagonalTarget target_v_identity(const SymMatrix& s);

/// Mean of 1/lambda over the eigenvalues of S above `threshold`, placed on
/// every diagonal entry. Default threshold: 1e-4 * lambda_max(S).
DiagonalTarget target_eigenvalue(const SymMatrix& s, std::optional<double> threshold = std::nullopt);

/// T_jj = 1 / ((1 - |rho_jk|) S_jj) with k the partner of j with the
/// largest absolute correlation (smallest k on ties).
DiagonalTarget target_max_single_correlation(const SymMatrix& s);

struct NodewiseOptions {
  int folds = 10;
  /// Empty: lambda_max * 0.9^{0..40}, lambda_max taken from the full-data
  /// Gram matrix of each regression.
  std::vector<double> lambda_grid;
  std::uint64_t seed = 1;
  SolverConfig config{1e-4, 1e-9, 100, 10000};
};

/// Lasso regression of every column on the others, lambda picked by K-fold
/// CV; T_jj = 1 / (smallest CV mean squared residual).
DiagonalTarget target_nodewise(const Matrix& data, const NodewiseOptions& options = {});

DiagonalTarget target_true_diagonal(const SymMatrix& theta_true);

/// Everything needed to (re)build a target from a data set.
struct TargetChoice {
  TargetKind kind = TargetKind::Zero;
  /// For TrueDiagonal and Custom: the fixed entries.
  std::optional<Vector> fixed;
  std::optional<double> eigen_threshold;
  NodewiseOptions nodewise;
};

/// Parses "zero", "true-diag", "identity", "v-identity", "eigenvalue",
/// "msc", "nodewise". ("file:<path>" is resolved by the caller.)
TargetKind parse_target_kind(const std::string& name);

/// Builds the target for sample covariance/correlation `s` computed from
/// `data` (data may be empty unless the kind is NodewiseRegression).
DiagonalTarget build_target(const TargetChoice& choice, const SymMatrix& s, const Matrix* data);

}  // namespace gelnet
