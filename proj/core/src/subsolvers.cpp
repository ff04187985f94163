#include <gelnet/error.hpp>
#include <gelnet/subsolvers.hpp>

#include <algorithm>
#include <cmath>

namespace gelnet {

namespace {

// Both solvers keep their running gradient in the index space of the
// underlying full matrix, so a coordinate move costs one column axpy
// and the excluded row is never copied out. The entry at the excluded
// position is scratch.
Vector to_full_space(const PrincipalView& view, const Vector& v) {
  if (view.excluded() < 0) return v;
  return expand(v, view.excluded());
}

}  // namespace

InnerStats enet_cd_solve(const EnetSubproblem& sub, Vector& beta, const SolverConfig& cfg) {
  const Index n = sub.q.size();
  if (sub.b.size() != n || beta.size() != n) throw InputError("enet subproblem: size mismatch");
  if (sub.lambda1 < 0.0 || sub.lambda2 < 0.0) throw InputError("enet subproblem: negative penalty");
  const Matrix& q = sub.q.full();

  for (Index k = 0; k < n; ++k)
    if (!sub.is_active(k)) beta(k) = 0.0;

  // resid = b - Q beta
  Vector resid = to_full_space(sub.q, sub.b);
  for (Index k = 0; k < n; ++k)
    if (beta(k) != 0.0) resid.noalias() -= beta(k) * q.col(sub.q.to_full(k));

  const double tol = cfg.inner_thr * std::max(1.0, sub.b.cwiseAbs().maxCoeff());
  InnerStats stats;
  while (stats.sweeps < cfg.inner_maxit) {
    ++stats.sweeps;
    double max_move = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (!sub.is_active(k)) continue;
      const Index fk = sub.q.to_full(k);
      const double qkk = q(fk, fk);
      const double denom = qkk + sub.lambda2;
      if (!(denom > 0.0)) throw NumericalError("enet subproblem: nonpositive denominator");
      const double old = beta(k);
      const double z = resid(fk) + qkk * old;
      const double updated = soft_threshold(z, sub.lambda1) / denom;
      const double delta = updated - old;
      if (delta != 0.0) {
        beta(k) = updated;
        resid.noalias() -= delta * q.col(fk);
        max_move = std::max(max_move, std::abs(delta));
      }
    }
    if (max_move <= tol) {
      stats.converged = true;
      break;
    }
  }
  return stats;
}

Vector enet_cd_solve(const EnetSubproblem& sub, const Vector& beta_warm, const SolverConfig& cfg,
                     InnerStats* stats) {
  Vector beta = beta_warm;
  InnerStats s = enet_cd_solve(sub, beta, cfg);
  if (stats) *stats = s;
  return beta;
}

InnerStats boxqp_cd_solve(const BoxQpSubproblem& sub, Vector& gamma, const SolverConfig& cfg) {
  const Index n = sub.theta11.size();
  if (sub.s12.size() != n || sub.weight.size() != n || gamma.size() != n)
    throw InputError("box QP subproblem: size mismatch");
  if (sub.bound < 0.0) throw InputError("box QP subproblem: negative bound");
  const Matrix& d = sub.theta11.full();

  for (Index k = 0; k < n; ++k)
    if (!sub.is_unbounded(k)) gamma(k) = std::clamp(gamma(k), -sub.bound, sub.bound);

  // grad = Theta11 (s12 + weight .* gamma)
  const Vector u = sub.s12 + sub.weight.cwiseProduct(gamma);
  Vector grad = Vector::Zero(d.rows());
  for (Index k = 0; k < n; ++k)
    if (u(k) != 0.0) grad.noalias() += u(k) * d.col(sub.theta11.to_full(k));

  InnerStats stats;
  while (stats.sweeps < cfg.inner_maxit) {
    ++stats.sweeps;
    double max_move = 0.0;
    for (Index k = 0; k < n; ++k) {
      const double wk = sub.weight(k);
      if (wk == 0.0) continue;  // objective is flat in this coordinate
      const Index fk = sub.theta11.to_full(k);
      const double dkk = d(fk, fk);
      if (!(dkk > 0.0)) throw NumericalError("box QP subproblem: nonpositive diagonal");
      const double old = gamma(k);
      double updated = old - grad(fk) / (dkk * wk);
      if (!sub.is_unbounded(k)) updated = std::clamp(updated, -sub.bound, sub.bound);
      const double delta = updated - old;
      if (delta != 0.0) {
        gamma(k) = updated;
        grad.noalias() += (wk * delta) * d.col(fk);
        max_move = std::max(max_move, std::abs(delta));
      }
    }
    if (max_move <= cfg.inner_thr) {
      stats.converged = true;
      break;
    }
  }
  return stats;
}

Vector boxqp_cd_solve(const BoxQpSubproblem& sub, const Vector& gamma_warm, const SolverConfig& cfg,
                      InnerStats* stats) {
  Vector gamma = gamma_warm;
  InnerStats s = boxqp_cd_solve(sub, gamma, cfg);
  if (stats) *stats = s;
  return gamma;
}

double enet_objective(const EnetSubproblem& sub, const Vector& beta) {
  const Matrix q = sub.q.materialize();
  return 0.5 * beta.dot(q * beta) - beta.dot(sub.b) + sub.lambda1 * beta.cwiseAbs().sum() +
         0.5 * sub.lambda2 * beta.squaredNorm();
}

double boxqp_objective(const BoxQpSubproblem& sub, const Vector& gamma) {
  const Vector u = sub.s12 + sub.weight.cwiseProduct(gamma);
  return 0.5 * u.dot(sub.theta11.materialize() * u);
}

}  // namespace gelnet
