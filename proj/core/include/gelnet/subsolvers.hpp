#pragma once

#include <gelnet/block_view.hpp>
#include <gelnet/problem.hpp>

#include <vector>

namespace gelnet {

/// sign(x) * max(|x| - lam, 0).
inline double soft_threshold(double x, double lam) {
  if (x > lam) return x - lam;
  if (x < -lam) return x + lam;
  return 0.0;
}

/// min_beta 1/2 beta^T Q beta - beta^T b + lambda1 |beta|_1 + lambda2/2 |beta|^2
/// with coordinates outside `active` pinned at zero.
struct EnetSubproblem {
  PrincipalView q;
  Vector b;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  /// Empty means every coordinate is active.
  std::vector<bool> active;

  bool is_active(Index k) const { return active.empty() || active[static_cast<size_t>(k)]; }
};

/// min_gamma 1/2 u^T Theta11 u,  u = s12 + weight .* gamma,  |gamma_k| <= bound.
/// Coordinates flagged in `unbounded` have no box (zero-constrained
/// entries, whose multiplier is free).
struct BoxQpSubproblem {
  PrincipalView theta11;
  Vector s12;
  Vector weight;
  double bound = 0.0;
  std::vector<bool> unbounded;

  bool is_unbounded(Index k) const {
    return !unbounded.empty() && unbounded[static_cast<size_t>(k)];
  }
};

struct InnerStats {
  int sweeps = 0;
  bool converged = false;
};

/// Cyclic coordinate descent in ascending index order, starting from
/// `beta` and overwriting it. Stops when the largest coordinate move in a
/// sweep is at most inner_thr * max(1, max|b|). Throws NumericalError
/// if Q_kk + lambda2 <= 0 for an active coordinate.
InnerStats enet_cd_solve(const EnetSubproblem& sub, Vector& beta, const SolverConfig& cfg);

/// Convenience overload returning the solution.
Vector enet_cd_solve(const EnetSubproblem& sub, const Vector& beta_warm,
                     const SolverConfig& cfg, InnerStats* stats = nullptr);

/// Projected coordinate descent: each coordinate jumps to its
/// unconstrained stationary value and is clipped onto the box.
/// Coordinates with weight 0 keep their starting value. Throws
/// NumericalError on a nonpositive diagonal of Theta11.
InnerStats boxqp_cd_solve(const BoxQpSubproblem& sub, Vector& gamma, const SolverConfig& cfg);

Vector boxqp_cd_solve(const BoxQpSubproblem& sub, const Vector& gamma_warm,
                      const SolverConfig& cfg, InnerStats* stats = nullptr);

double enet_objective(const EnetSubproblem& sub, const Vector& beta);
double boxqp_objective(const BoxQpSubproblem& sub, const Vector& gamma);

}  // namespace gelnet
