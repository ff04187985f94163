#include <gelnet/block_view.hpp>
#include <gelnet/error.hpp>
#include <gelnet/gelnet.hpp>
#include <gelnet/rope.hpp>
#include <gelnet/subsolvers.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace gelnet {

DiagCase target_case_select(double f_t, double lam_alpha) {
  if (f_t > lam_alpha) return DiagCase::Above;
  if (f_t < -lam_alpha) return DiagCase::Below;
  return DiagCase::At;
}

DiagUpdate solve_diag_quadratic(DiagCase c, double s22, double lambda, double alpha, double t22,
                                double dot) {
  if (c == DiagCase::At && t22 > 0.0) return {t22, 1.0 / t22 + dot};
  const double ridge = lambda * (1.0 - alpha);
  const double l1 = c == DiagCase::Below ? -lambda * alpha : lambda * alpha;
  const auto root = positive_root(ridge, s22 + l1 - ridge * t22 - dot);
  if (!root) throw NumericalError("diagonal update has no positive root (target too large?)");
  return {*root, s22 + l1 + ridge * (*root - t22)};
}

DiagUpdate solve_scalar(const ProblemSpec& spec) {
  const double s = spec.s(0, 0);
  if (!spec.penalize_diagonal) {
    if (!(s > 0.0)) throw NumericalError("unpenalized diagonal needs s_ii > 0");
    return {1.0 / s, s};
  }
  const double t = spec.target.entries(0);
  const double f_t = t > 0.0 ? 1.0 / t - s : std::numeric_limits<double>::infinity();
  return solve_diag_quadratic(target_case_select(f_t, spec.lambda_alpha()), s, spec.lambda,
                              spec.alpha, t, 0.0);
}

FitResult scalar_fit(const ProblemSpec& spec) {
  FitResult out;
  out.max_block_size = 1;
  try {
    const auto [theta, w] = solve_scalar(spec);
    out.theta = SymMatrix::from_symmetric(Matrix::Constant(1, 1, theta));
    out.w = SymMatrix::from_symmetric(Matrix::Constant(1, 1, w));
    out.conv = true;
  } catch (const NumericalError& e) {
    out.theta = SymMatrix(1);
    out.w = spec.s;
    out.diagnostic = e.what();
  }
  return out;
}

namespace {

class GelnetRunner {
 public:
  GelnetRunner(const ProblemSpec& spec, bool with_target)
      : spec_(spec),
        s_(spec.s.mat()),
        p_(spec.size()),
        with_target_(with_target),
        lam_alpha_(spec.lambda_alpha()),
        ridge_(spec.lambda_ridge()) {}

  FitResult run(const std::optional<WarmStart>& warm, const FitHooks& hooks) {
    if (warm) {
      if (!init_warm(*warm)) return finish(false);
    } else if (!init_cold()) {
      return finish(false);
    }
    build_masks();

    const double thr = spec_.config.outer_thr * convergence_scale(s_);
    last_case_.assign(static_cast<size_t>(p_), DiagCase::Above);
    flips_.assign(static_cast<size_t>(p_), 0);

    for (sweep_ = 1; sweep_ <= spec_.config.outer_maxit; ++sweep_) {
      const Matrix w_prev = w_;
      for (Index j = 0; j < p_; ++j) {
        if (!update_column(j)) return finish(false);
        if (hooks.on_column) hooks.on_column({sweep_, j, theta_, w_, w22_used_});
      }
      // Mean over columns of the column-wise L1 change.
      del_ = (w_ - w_prev).cwiseAbs().sum() / static_cast<double>(p_);
      if (hooks.on_sweep) hooks.on_sweep(sweep_, theta_, w_);
      if (!std::isfinite(del_)) {
        diagnostic_ = "non-finite iterate";
        return finish(false);
      }
      if (del_ <= thr) return finish(true);
    }
    sweep_ = spec_.config.outer_maxit;
    diagnostic_ = guard_triggered_ ? "target too large: diagonal case selection oscillates"
                                   : "outer iteration limit reached";
    return finish(false);
  }

 private:
  bool init_cold() {
    theta_ = Matrix::Zero(p_, p_);
    w_ = s_;
    beta_ = Matrix::Zero(p_, p_);
    for (Index i = 0; i < p_; ++i) {
      const double s = s_(i, i);
      if (!spec_.penalize_diagonal) {
        if (!(s > 0.0)) return fail("nonpositive diagonal entry in S");
        theta_(i, i) = 1.0 / s;
        continue;
      }
      const double d = s + lam_alpha_;
      const double t = with_target_ ? spec_.target.entries(i) : 0.0;
      if (d > 0.0 && t < 1.0 / d) {
        const auto root = positive_root(ridge_, d - ridge_ * t);
        if (!root) return fail("nonpositive diagonal entry in S + lambda alpha I");
        theta_(i, i) = *root;
        w_(i, i) = d + ridge_ * (*root - t);
      } else if (t > 0.0) {
        theta_(i, i) = t;
        w_(i, i) = s;
      } else {
        return fail("nonpositive diagonal entry in S + lambda alpha I");
      }
    }
    return true;
  }

  bool init_warm(const WarmStart& warm) {
    if (warm.theta.size() != p_ || warm.w.size() != p_)
      throw InputError("warm start dimension mismatch");
    theta_ = warm.theta.mat();
    w_ = warm.w.mat();
    beta_ = Matrix::Zero(p_, p_);
    for (Index j = 0; j < p_; ++j) {
      if (!(theta_(j, j) > 0.0)) throw InputError("warm start theta needs a positive diagonal");
      beta_.col(j) = -theta_.col(j) / theta_(j, j);
      beta_(j, j) = 0.0;
    }
    return true;
  }

  void build_masks() {
    if (spec_.zero.empty()) return;
    masks_.assign(static_cast<size_t>(p_), std::vector<bool>(static_cast<size_t>(p_ - 1), true));
    for (auto [i, j] : spec_.zero.pairs()) {
      masks_[i][static_cast<size_t>(j > i ? j - 1 : j)] = false;
      masks_[j][static_cast<size_t>(i > j ? i - 1 : i)] = false;
      theta_(i, j) = theta_(j, i) = 0.0;
      beta_(i, j) = beta_(j, i) = 0.0;
    }
  }

  bool update_column(Index j) {
    EnetSubproblem sub{PrincipalView(w_, j), offdiag_column(s_, j), lam_alpha_,
                       ridge_ * theta_(j, j), {}};
    if (!masks_.empty()) sub.active = masks_[static_cast<size_t>(j)];

    Vector beta = contract(beta_.col(j), j);
    try {
      enet_cd_solve(sub, beta, spec_.config);
    } catch (const NumericalError& e) {
      return fail(e.what());
    }
    const Vector beta_full = expand(beta, j);

    // w12 = W11 beta, accumulated over the nonzero coefficients only.
    Vector w12_full = Vector::Zero(p_);
    for (Index k = 0; k < p_; ++k)
      if (beta_full(k) != 0.0) w12_full.noalias() += beta_full(k) * w_.col(k);
    w12_full(j) = 0.0;
    const double dot = w12_full.dot(beta_full);

    w22_used_ = w_(j, j);
    double theta22 = 0.0, w22 = 0.0;
    if (!with_target_) {
      const double denom = w22_used_ - dot;
      if (!(denom > 0.0)) return fail("nonpositive pivot w22 - beta^T w12 (indefinite S or bad warm start)");
      theta22 = 1.0 / denom;
      w22 = spec_.penalize_diagonal ? s_(j, j) + lam_alpha_ + ridge_ * theta22 : s_(j, j);
    } else {
      const double t = spec_.target.entries(j);
      const double f_t = t > 0.0 ? 1.0 / t + dot - s_(j, j) : std::numeric_limits<double>::infinity();
      DiagCase c = target_case_select(f_t, lam_alpha_);
      auto& last = last_case_[static_cast<size_t>(j)];
      auto& flips = flips_[static_cast<size_t>(j)];
      if (sweep_ > 1) flips = c != last ? flips + 1 : 0;
      last = c;
      if (flips > 3 && t > 0.0) {
        c = DiagCase::At;
        guard_triggered_ = true;
      }
      try {
        const auto upd = solve_diag_quadratic(c, s_(j, j), spec_.lambda, spec_.alpha, t, dot);
        theta22 = upd.theta22;
        w22 = upd.w22;
      } catch (const NumericalError& e) {
        return fail(e.what());
      }
    }

    Vector theta12(p_ - 1);
    for (Index k = 0; k < p_ - 1; ++k) theta12(k) = beta(k) == 0.0 ? 0.0 : -theta22 * beta(k);
    scatter_offdiag(w_, j, contract(w12_full, j));
    w_(j, j) = w22;
    scatter_offdiag(theta_, j, theta12);
    theta_(j, j) = theta22;
    beta_.col(j) = beta_full;
    return true;
  }

  bool fail(const std::string& why) {
    diagnostic_ = why;
    return false;
  }

  FitResult finish(bool conv) {
    FitResult out;
    if (theta_.size() == 0) theta_ = Matrix::Zero(p_, p_);
    if (w_.size() == 0) w_ = s_;
    mirror_upper(theta_);
    mirror_upper(w_);
    out.theta = SymMatrix::from_symmetric(std::move(theta_));
    out.w = SymMatrix::from_symmetric(std::move(w_));
    out.niter = std::max(sweep_, 0);
    out.del = del_;
    out.conv = conv;
    out.max_block_size = p_;
    out.diagnostic = conv ? "" : diagnostic_;
    return out;
  }

  const ProblemSpec& spec_;
  const Matrix& s_;
  const Index p_;
  const bool with_target_;
  const double lam_alpha_;
  const double ridge_;

  Matrix theta_, w_, beta_;
  std::vector<std::vector<bool>> masks_;
  std::vector<DiagCase> last_case_;
  std::vector<int> flips_;
  bool guard_triggered_ = false;
  int sweep_ = 0;
  double del_ = std::numeric_limits<double>::infinity();
  double w22_used_ = 0.0;
  std::string diagnostic_;
};

}  // namespace

FitResult gelnet_fit(const ProblemSpec& spec, const std::optional<WarmStart>& warm,
                     const FitHooks& hooks) {
  if (spec.has_target()) return gelnet_fit_target(spec, warm, hooks);
  if (spec.size() == 1) return scalar_fit(spec);
  return GelnetRunner(spec, false).run(warm, hooks);
}

FitResult gelnet_fit_target(const ProblemSpec& spec, const std::optional<WarmStart>& warm,
                            const FitHooks& hooks) {
  if (!spec.has_target()) return gelnet_fit(spec, warm, hooks);
  if (spec.size() == 1) return scalar_fit(spec);
  if (spec.alpha == 0.0 && spec.zero.empty()) return rope_fit(spec);
  return GelnetRunner(spec, true).run(warm, hooks);
}

}  // namespace gelnet
