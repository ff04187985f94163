#pragma once

#include <gelnet/matrix.hpp>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gelnet {

struct SolverConfig {
  double outer_thr = 1e-4;
  double inner_thr = 1e-7;
  int outer_maxit = 100;
  int inner_maxit = 1000;

  void check() const;
};

enum class TargetKind {
  Zero,
  TrueDiagonal,
  Identity,
  VIdentity,
  Eigenvalue,
  MaxSingleCorrelation,
  NodewiseRegression,
  Custom,
};

std::string to_string(TargetKind kind);

/// Diagonal, positive semi-definite shrinkage target.
struct DiagonalTarget {
  Vector entries;
  TargetKind kind = TargetKind::Zero;

  static DiagonalTarget zero(Index p) { return {Vector::Zero(p), TargetKind::Zero}; }
  static DiagonalTarget custom(Vector entries);

  Index size() const { return entries.size(); }
  bool is_zero() const { return (entries.array() == 0.0).all(); }
};

/// Off-diagonal entries of the precision matrix forced to zero. Pairs are
/// stored unordered (i < j) and sorted, which makes the set symmetric.
class ZeroConstraints {
 public:
  ZeroConstraints() = default;
  /// Accepts pairs in either orientation; duplicates collapse.
  explicit ZeroConstraints(const std::vector<std::pair<Index, Index>>& pairs);

  bool contains(Index i, Index j) const;
  bool empty() const { return pairs_.empty(); }
  const std::vector<std::pair<Index, Index>>& pairs() const { return pairs_; }

  /// Constraints among `idx`, re-indexed to positions within `idx`.
  ZeroConstraints restricted(const std::vector<Index>& idx) const;

  friend bool operator==(const ZeroConstraints&, const ZeroConstraints&) = default;

 private:
  std::vector<std::pair<Index, Index>> pairs_;
};

struct ProblemOptions {
  bool penalize_diagonal = true;
  ZeroConstraints zero;
  SolverConfig config;
};

/// A validated Graphical Elastic Net problem
///   min_{Theta > 0} -log det Theta + tr(S Theta)
///                   + lambda (alpha |Theta - T|_1 + (1 - alpha)/2 |Theta - T|_F^2).
struct ProblemSpec {
  SymMatrix s;
  double lambda = 0.0;
  double alpha = 1.0;
  DiagonalTarget target;
  bool penalize_diagonal = true;
  ZeroConstraints zero;
  SolverConfig config;

  Index size() const { return s.size(); }
  double lambda_alpha() const { return lambda * alpha; }
  double lambda_ridge() const { return lambda * (1.0 - alpha); }
  /// The target only enters through the diagonal, so it is inert when the
  /// diagonal is unpenalized.
  bool has_target() const { return penalize_diagonal && !target.is_zero(); }

  /// Sub-problem on the principal block `idx` (target and constraints
  /// restricted accordingly).
  ProblemSpec restricted(const std::vector<Index>& idx) const;
};

/// Checks and normalizes raw input. `s` may carry round-off asymmetry up
/// to 1e-8 relative to its largest entry; it is averaged away.
ProblemSpec validate(const Matrix& s, double lambda, double alpha,
                     std::optional<Vector> target = std::nullopt,
                     ProblemOptions options = {});

struct WarmStart {
  SymMatrix theta;
  SymMatrix w;
};

struct FitResult {
  SymMatrix theta;
  SymMatrix w;
  int niter = 0;
  double del = 0.0;
  bool conv = false;
  Index n_components = 1;
  Index max_block_size = 0;
  std::string diagnostic;
};

/// State passed to instrumentation after each column update.
struct ColumnEvent {
  int sweep;
  Index column;
  const Matrix& theta;
  const Matrix& w;
  /// The w22 value the update formulas used (before it was refreshed).
  double w22_used;
};

struct FitHooks {
  std::function<void(const ColumnEvent&)> on_column;
  std::function<void(int sweep, const Matrix& theta, const Matrix& w)> on_sweep;
};

/// Value of the penalized objective at `theta`; +inf if theta is not
/// positive definite.
double objective(const ProblemSpec& spec, const Matrix& theta);

/// mean |S_ij| over i != j, or mean |S_ii| when every off-diagonal entry
/// is zero. Sweeps stop once the per-column mean of the L1 change in W
/// over a sweep falls below outer_thr times this.
double convergence_scale(const Matrix& s);

/// Positive root of a x^2 + b x - 1 = 0 (a >= 0), evaluated without
/// cancellation for either sign of b. Returns nullopt when no positive
/// root exists (only possible for a == 0, b <= 0).
std::optional<double> positive_root(double a, double b);

}  // namespace gelnet
