#include <gelnet/error.hpp>
#include <gelnet/problem.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gelnet {

void SolverConfig::check() const {
  if (!(outer_thr > 0.0) || !(inner_thr > 0.0))
    throw InputError("solver thresholds must be positive");
  if (outer_maxit <= 0 || inner_maxit <= 0)
    throw InputError("solver iteration limits must be positive");
}

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::Zero: return "zero";
    case TargetKind::TrueDiagonal: return "true-diag";
    case TargetKind::Identity: return "identity";
    case TargetKind::VIdentity: return "v-identity";
    case TargetKind::Eigenvalue: return "eigenvalue";
    case TargetKind::MaxSingleCorrelation: return "msc";
    case TargetKind::NodewiseRegression: return "nodewise";
    case TargetKind::Custom: return "custom";
  }
  return "unknown";
}

DiagonalTarget DiagonalTarget::custom(Vector entries) {
  return {std::move(entries), TargetKind::Custom};
}

ZeroConstraints::ZeroConstraints(const std::vector<std::pair<Index, Index>>& pairs) {
  for (auto [i, j] : pairs) {
    if (i == j) throw InputError("zero constraint on a diagonal entry");
    if (i < 0 || j < 0) throw InputError("negative index in zero constraint");
    pairs_.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

bool ZeroConstraints::contains(Index i, Index j) const {
  const std::pair<Index, Index> key{std::min(i, j), std::max(i, j)};
  return std::binary_search(pairs_.begin(), pairs_.end(), key);
}

ZeroConstraints ZeroConstraints::restricted(const std::vector<Index>& idx) const {
  std::vector<std::pair<Index, Index>> local;
  for (auto [i, j] : pairs_) {
    auto a = std::find(idx.begin(), idx.end(), i);
    auto b = std::find(idx.begin(), idx.end(), j);
    if (a != idx.end() && b != idx.end())
      local.emplace_back(a - idx.begin(), b - idx.begin());
  }
  return ZeroConstraints(local);
}

ProblemSpec ProblemSpec::restricted(const std::vector<Index>& idx) const {
  ProblemSpec sub;
  sub.s = s.principal(idx);
  sub.lambda = lambda;
  sub.alpha = alpha;
  Vector t(static_cast<Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) t(static_cast<Index>(k)) = target.entries(idx[k]);
  sub.target = {std::move(t), target.kind};
  sub.penalize_diagonal = penalize_diagonal;
  sub.zero = zero.restricted(idx);
  sub.config = config;
  return sub;
}

ProblemSpec validate(const Matrix& s, double lambda, double alpha, std::optional<Vector> target,
                     ProblemOptions options) {
  if (s.rows() != s.cols()) throw InputError("input matrix is not square");
  if (s.rows() < 1) throw InputError("input matrix is empty");
  if (!s.allFinite()) throw InputError("input matrix has non-finite entries");
  if (!std::isfinite(lambda) || lambda < 0.0) throw InputError("negative lambda");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha outside [0, 1]");

  const double scale = std::max(s.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale) throw InputError("input matrix is not symmetric");

  const Index p = s.rows();
  ProblemSpec spec;
  spec.s = SymMatrix::symmetrized(s);
  spec.lambda = lambda;
  spec.alpha = alpha;
  if (target) {
    if (target->size() != p) throw InputError("target length does not match dimension");
    if (!target->allFinite() || (target->array() < 0.0).any())
      throw InputError("negative target entry");
    spec.target = DiagonalTarget::custom(*target);
    if (spec.target.is_zero()) spec.target.kind = TargetKind::Zero;
  } else {
    spec.target = DiagonalTarget::zero(p);
  }
  for (auto [i, j] : options.zero.pairs())
    if (j >= p) throw InputError("zero constraint index out of range");
  options.config.check();
  spec.penalize_diagonal = options.penalize_diagonal;
  spec.zero = std::move(options.zero);
  spec.config = options.config;
  return spec;
}

double objective(const ProblemSpec& spec, const Matrix& theta) {
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const Matrix& L = llt.matrixL();
  const double logdet = 2.0 * L.diagonal().array().log().sum();
  double l1 = 0.0, l2 = 0.0;
  const Index p = theta.rows();
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      if (i == j && !spec.penalize_diagonal) continue;
      const double d = theta(i, j) - (i == j ? spec.target.entries(i) : 0.0);
      l1 += std::abs(d);
      l2 += d * d;
    }
  }
  return -logdet + (spec.s.mat().cwiseProduct(theta)).sum() +
         spec.lambda * (spec.alpha * l1 + 0.5 * (1.0 - spec.alpha) * l2);
}

double convergence_scale(const Matrix& s) {
  const Index p = s.rows();
  if (p > 1) {
    const double off = s.cwiseAbs().sum() - s.diagonal().cwiseAbs().sum();
    if (off > 0.0) return off / static_cast<double>(p * (p - 1));
  }
  const double diag = s.diagonal().cwiseAbs().mean();
  return diag > 0.0 ? diag : 1.0;
}

std::optional<double> positive_root(double a, double b) {
  const double disc = std::sqrt(b * b + 4.0 * a);
  if (!std::isfinite(disc)) return std::nullopt;
  // Pick the form without cancellation for the sign of b.
  if (b >= 0.0) {
    const double denom = b + disc;
    if (!(denom > 0.0)) return std::nullopt;
    return 2.0 / denom;
  }
  if (!(a > 0.0)) return std::nullopt;
  return (disc - b) / (2.0 * a);
}

}  // namespace gelnet
