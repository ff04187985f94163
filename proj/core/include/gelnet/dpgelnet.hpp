#pragma once

#include <gelnet/problem.hpp>

#include <optional>

namespace gelnet {

/// Block coordinate descent on the precision matrix through box
/// constrained QPs. Every column update keeps Theta positive definite
/// when started from a positive definite Theta.
///
/// Requires a zero target. Throws InputError when a warm Theta is not
/// positive definite; other failures are reported through conv = false.
FitResult dpgelnet_fit(const ProblemSpec& spec, const std::optional<WarmStart>& warm = std::nullopt,
                       const FitHooks& hooks = {});

/// theta22 - theta12^T Theta11^{-1} theta12 for column `j`, using a dense
/// factorization of Theta11. Test instrumentation; O(p^3).
double schur_check(const Matrix& theta, Index j);

}  // namespace gelnet
