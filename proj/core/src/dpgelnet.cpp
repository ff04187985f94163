#include <gelnet/block_view.hpp>
#include <gelnet/dpgelnet.hpp>
#include <gelnet/error.hpp>
#include <gelnet/gelnet.hpp>
#include <gelnet/subsolvers.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace gelnet {

double schur_check(const Matrix& theta, Index j) {
  const Matrix t11 = PrincipalView(theta, j).materialize();
  const Vector t12 = offdiag_column(theta, j);
  Eigen::LLT<Matrix> llt(t11);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  return theta(j, j) - t12.dot(llt.solve(t12));
}

namespace {

class DpgelnetRunner {
 public:
  explicit DpgelnetRunner(const ProblemSpec& spec)
      : spec_(spec),
        s_(spec.s.mat()),
        p_(spec.size()),
        lam_alpha_(spec.lambda_alpha()),
        ridge_(spec.lambda_ridge()) {}

  FitResult run(const std::optional<WarmStart>& warm, const FitHooks& hooks) {
    if (warm) {
      init_warm(*warm);
    } else if (!init_cold()) {
      return finish(false);
    }
    constrained_.assign(static_cast<size_t>(p_), std::vector<bool>(static_cast<size_t>(p_ - 1), false));
    for (auto [i, j] : spec_.zero.pairs()) {
      constrained_[i][static_cast<size_t>(j > i ? j - 1 : j)] = true;
      constrained_[j][static_cast<size_t>(i > j ? i - 1 : i)] = true;
    }

    const double thr = spec_.config.outer_thr * convergence_scale(s_);
    for (sweep_ = 1; sweep_ <= spec_.config.outer_maxit; ++sweep_) {
      const Matrix w_prev = w_;
      const Matrix theta_prev = theta_;
      for (Index j = 0; j < p_; ++j) {
        if (!update_column(j)) return finish(false);
        if (hooks.on_column) hooks.on_column({sweep_, j, theta_, w_, w22_used_});
      }
      // W can settle (its off-diagonal is S plus the box multipliers) while
      // Theta is still relaxing towards W^{-1}, so both are tracked.
      // Mean over columns of the column-wise L1 change.
      del_ = std::max((w_ - w_prev).cwiseAbs().sum(), (theta_ - theta_prev).cwiseAbs().sum()) /
             static_cast<double>(p_);
      if (hooks.on_sweep) hooks.on_sweep(sweep_, theta_, w_);
      if (!std::isfinite(del_)) {
        diagnostic_ = "non-finite iterate";
        return finish(false);
      }
      if (del_ <= thr) return finish(true);
    }
    sweep_ = spec_.config.outer_maxit;
    diagnostic_ = "outer iteration limit reached";
    return finish(false);
  }

 private:
  bool init_cold() {
    theta_ = Matrix::Zero(p_, p_);
    w_ = s_;
    gamma_ = Matrix::Zero(p_, p_);
    for (Index i = 0; i < p_; ++i) {
      const double d = spec_.penalize_diagonal ? s_(i, i) + lam_alpha_ : s_(i, i);
      if (!(d > 0.0)) {
        diagnostic_ = "nonpositive diagonal entry in S + lambda alpha I";
        return false;
      }
      theta_(i, i) = 1.0 / d;
      if (spec_.penalize_diagonal) w_(i, i) = d + ridge_ * theta_(i, i);
    }
    return true;
  }

  void init_warm(const WarmStart& warm) {
    if (warm.theta.size() != p_ || warm.w.size() != p_)
      throw InputError("warm start dimension mismatch");
    if (!is_positive_definite(warm.theta.mat()))
      throw InputError("warm start theta is not positive definite");
    theta_ = warm.theta.mat();
    w_ = warm.w.mat();
    gamma_ = Matrix::Zero(p_, p_);
  }

  bool update_column(Index j) {
    const auto& fixed = constrained_[static_cast<size_t>(j)];
    const Vector s12 = offdiag_column(s_, j);
    const Vector q12 = offdiag_column(theta_, j).cwiseAbs();

    BoxQpSubproblem sub{PrincipalView(theta_, j), s12, Vector(p_ - 1), 0.0, fixed};
    if (spec_.alpha > 0.0) {
      sub.weight = Vector::Ones(p_ - 1) + ((1.0 - spec_.alpha) / spec_.alpha) * q12;
      sub.bound = lam_alpha_;
    } else {
      sub.weight = spec_.lambda * q12;
      sub.bound = 1.0;
    }
    for (Index k = 0; k < p_ - 1; ++k)
      if (fixed[static_cast<size_t>(k)]) sub.weight(k) = 1.0;

    Vector gamma = contract(gamma_.col(j), j);
    try {
      boxqp_cd_solve(sub, gamma, spec_.config);
    } catch (const NumericalError& e) {
      diagnostic_ = e.what();
      return false;
    }

    const Vector u = s12 + sub.weight.cwiseProduct(gamma);
    // v = Theta11 u against the live precision matrix.
    Vector v_full = Vector::Zero(p_);
    for (Index k = 0; k < p_ - 1; ++k)
      if (u(k) != 0.0) v_full.noalias() += u(k) * theta_.col(k >= j ? k + 1 : k);
    const Vector v = contract(v_full, j);

    w22_used_ = w_(j, j);
    if (!(w22_used_ > 0.0)) {
      diagnostic_ = "nonpositive w22";
      return false;
    }
    Vector theta12 = -v / w22_used_;
    Vector w12 = s12 + ridge_ * theta12;
    if (spec_.alpha > 0.0) w12 += gamma;
    // Zeroed entries carry a first-order Schur correction into theta22.
    double shift = 0.0;
    for (Index k = 0; k < p_ - 1; ++k) {
      const bool interior = spec_.alpha > 0.0 && std::abs(gamma(k)) < sub.bound;
      if (fixed[static_cast<size_t>(k)] || interior) {
        shift += u(k) * theta12(k);
        theta12(k) = 0.0;
        if (fixed[static_cast<size_t>(k)]) w12(k) = s12(k) + gamma(k);
      }
    }
    const double theta22 = (1.0 - u.dot(theta12) + shift) / w22_used_;
    const double w22 = spec_.penalize_diagonal ? s_(j, j) + lam_alpha_ + ridge_ * theta22 : s_(j, j);

    scatter_offdiag(theta_, j, theta12);
    theta_(j, j) = theta22;
    scatter_offdiag(w_, j, w12);
    w_(j, j) = w22;
    gamma_.col(j) = expand(gamma, j);
    return true;
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
  const double lam_alpha_;
  const double ridge_;

  Matrix theta_, w_, gamma_;
  std::vector<std::vector<bool>> constrained_;
  int sweep_ = 0;
  double del_ = std::numeric_limits<double>::infinity();
  double w22_used_ = 0.0;
  std::string diagnostic_;
};

}  // namespace

FitResult dpgelnet_fit(const ProblemSpec& spec, const std::optional<WarmStart>& warm,
                       const FitHooks& hooks) {
  if (spec.has_target()) throw InputError("dpgelnet does not support target matrices");
  if (spec.size() == 1) return scalar_fit(spec);
  return DpgelnetRunner(spec).run(warm, hooks);
}

}  // namespace gelnet
