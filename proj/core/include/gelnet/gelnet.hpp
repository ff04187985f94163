#pragma once

#include <gelnet/problem.hpp>

#include <optional>
#include <utility>

namespace gelnet {

/// Where a diagonal entry sits relative to its target value.
enum class DiagCase { Above, At, Below };

/// Case test on F_t = 1/t22 + w12^T beta - s22.
DiagCase target_case_select(double f_t, double lam_alpha);

struct DiagUpdate {
  double theta22;
  double w22;
};

/// Simultaneous (theta22, w22) update for the chosen case, where `dot` is
/// w12^T beta. Above/Below solve
///   lambda(1-alpha) theta^2 + (s22 +- lambda alpha - lambda(1-alpha) t22 - dot) theta - 1 = 0
/// for its positive root. `At` with t22 == 0 is treated as Above.
/// Throws NumericalError when the root does not exist.
DiagUpdate solve_diag_quadratic(DiagCase c, double s22, double lambda, double alpha,
                                double t22, double dot);

/// Closed form for a 1x1 problem (and for isolated nodes after
/// screening). Handles the target, the unpenalized diagonal and alpha = 0.
DiagUpdate solve_scalar(const ProblemSpec& spec);

/// solve_scalar packaged as a converged 1x1 fit (conv = false with a
/// diagnostic when no positive solution exists).
FitResult scalar_fit(const ProblemSpec& spec);

/// Block coordinate descent on the columns of W, zero target.
/// Never throws on non-convergence: budget exhaustion or a nonpositive
/// pivot yield conv = false with a diagnostic.
FitResult gelnet_fit(const ProblemSpec& spec, const std::optional<WarmStart>& warm = std::nullopt,
                     const FitHooks& hooks = {});

/// Variant with a nonzero diagonal target. For alpha == 0 without zero
/// constraints the problem is handed to the closed-form ridge solver.
FitResult gelnet_fit_target(const ProblemSpec& spec,
                            const std::optional<WarmStart>& warm = std::nullopt,
                            const FitHooks& hooks = {});

}  // namespace gelnet
