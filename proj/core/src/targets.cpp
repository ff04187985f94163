#include <gelnet/block_view.hpp>
#include <gelnet/cv.hpp>
#include <gelnet/error.hpp>
#include <gelnet/rope.hpp>
#include <gelnet/subsolvers.hpp>
#include <gelnet/targets.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gelnet {

namespace {

DiagonalTarget constant_target(Index p, double v, TargetKind kind) {
  return {Vector::Constant(p, v), kind};
}

}  // namespace

DiagonalTarget target_identity(Index p) {
  if (p < 1) throw InputError("target dimension must be at least 1");
  return constant_target(p, 1.0, TargetKind::Identity);
}

DiagonalTarget target_v_identity(const SymMatrix& s) {
  if (s.size() < 1) throw InputError("empty matrix");
  const double mean = s.diag().mean();
  if (!(mean > 0.0)) throw InputError("mean of diag(S) must be positive");
  return constant_target(s.size(), 1.0 / mean, TargetKind::VIdentity);
}

DiagonalTarget target_eigenvalue(const SymMatrix& s, std::optional<double> threshold) {
  if (s.size() < 1) throw InputError("empty matrix");
  const Vector ev = EigenDecomp::of(s.mat()).values;
  const double thr = threshold ? *threshold : 1e-4 * ev.maxCoeff();
  if (thr < 0.0) throw InputError("negative eigenvalue threshold");
  double sum = 0.0;
  int kept = 0;
  for (double v : ev) {
    if (v >= thr && v > 0.0) {
      sum += 1.0 / v;
      ++kept;
    }
  }
  if (kept == 0) throw InputError("no eigenvalue of S above the threshold");
  return constant_target(s.size(), sum / kept, TargetKind::Eigenvalue);
}

DiagonalTarget target_max_single_correlation(const SymMatrix& s) {
  const Index p = s.size();
  if (p < 2) throw InputError("max single correlation target needs p >= 2");
  const Vector d = s.diag();
  if (!(d.array() > 0.0).all()) throw InputError("diag(S) must be positive");
  Vector t(p);
  for (Index j = 0; j < p; ++j) {
    double best = -1.0;
    for (Index k = 0; k < p; ++k) {
      if (k == j) continue;
      const double r = std::abs(s(j, k)) / std::sqrt(d(j) * d(k));
      if (r > best) best = r;
    }
    if (best >= 1.0 - 1e-12) throw InputError("perfectly correlated pair");
    t(j) = 1.0 / ((1.0 - best) * d(j));
  }
  return {t, TargetKind::MaxSingleCorrelation};
}

DiagonalTarget target_nodewise(const Matrix& data, const NodewiseOptions& options) {
  const Index n = data.rows();
  const Index p = data.cols();
  if (p < 2) throw InputError("nodewise target needs p >= 2");
  if (options.folds < 2 || n < options.folds) throw InputError("nodewise target needs n >= folds >= 2");
  options.config.check();

  const Matrix x = data.rowwise() - data.colwise().mean();
  const Matrix gram = x.transpose() * x / static_cast<double>(n);
  for (Index j = 0; j < p; ++j)
    if (!(gram(j, j) > 0.0)) throw InputError("column with zero variance");
  for (Index j = 0; j < p; ++j)
    for (Index k = j + 1; k < p; ++k)
      if (std::abs(gram(j, k)) / std::sqrt(gram(j, j) * gram(k, k)) >= 1.0 - 1e-12)
        throw InputError("perfectly correlated pair");

  const auto fold_of = fold_assignment(n, options.folds, options.seed);
  std::vector<Matrix> x_test(static_cast<size_t>(options.folds));
  std::vector<Matrix> g_train(static_cast<size_t>(options.folds));
  for (int f = 0; f < options.folds; ++f) {
    std::vector<Index> tr, te;
    for (Index i = 0; i < n; ++i) (fold_of[static_cast<size_t>(i)] == f ? te : tr).push_back(i);
    const Matrix xtr = x(tr, Eigen::all);
    g_train[static_cast<size_t>(f)] = xtr.transpose() * xtr / static_cast<double>(tr.size());
    x_test[static_cast<size_t>(f)] = x(te, Eigen::all);
  }

  Vector t(p);
  for (Index j = 0; j < p; ++j) {
    std::vector<double> grid = options.lambda_grid;
    if (grid.empty()) {
      const double lmax = offdiag_column(gram, j).cwiseAbs().maxCoeff();
      for (int k = 0; k <= 40; ++k) grid.push_back(lmax * std::pow(0.9, k));
    }
    std::sort(grid.begin(), grid.end(), std::greater<>());

    std::vector<double> sse(grid.size(), 0.0);
    for (int f = 0; f < options.folds; ++f) {
      const Matrix& g = g_train[static_cast<size_t>(f)];
      EnetSubproblem sub{PrincipalView(g, j), offdiag_column(g, j), 0.0, 0.0, {}};
      Vector beta = Vector::Zero(p - 1);
      for (size_t l = 0; l < grid.size(); ++l) {
        sub.lambda1 = grid[l];
        enet_cd_solve(sub, beta, options.config);
        Vector coef = -expand(beta, j);
        coef(j) = 1.0;
        sse[l] += (x_test[static_cast<size_t>(f)] * coef).squaredNorm();
      }
    }
    const double best = *std::min_element(sse.begin(), sse.end()) / static_cast<double>(n);
    if (!(best > 0.0)) throw InputError("perfectly predictable column");
    t(j) = 1.0 / best;
  }
  return {t, TargetKind::NodewiseRegression};
}

DiagonalTarget target_true_diagonal(const SymMatrix& theta_true) {
  const Vector d = theta_true.diag();
  if ((d.array() < 0.0).any()) throw InputError("negative diagonal entry in the true precision");
  return {d, TargetKind::TrueDiagonal};
}

TargetKind parse_target_kind(const std::string& name) {
  for (auto k : {TargetKind::Zero, TargetKind::TrueDiagonal, TargetKind::Identity,
                 TargetKind::VIdentity, TargetKind::Eigenvalue, TargetKind::MaxSingleCorrelation,
                 TargetKind::NodewiseRegression})
    if (name == to_string(k)) return k;
  throw InputError("unknown target '" + name + "'");
}

DiagonalTarget build_target(const TargetChoice& choice, const SymMatrix& s, const Matrix* data) {
  const Index p = s.size();
  switch (choice.kind) {
    case TargetKind::Zero: return DiagonalTarget::zero(p);
    case TargetKind::Identity: return target_identity(p);
    case TargetKind::VIdentity: return target_v_identity(s);
    case TargetKind::Eigenvalue: return target_eigenvalue(s, choice.eigen_threshold);
    case TargetKind::MaxSingleCorrelation: return target_max_single_correlation(s);
    case TargetKind::NodewiseRegression:
      if (!data || data->rows() == 0) throw InputError("nodewise target needs the data matrix");
      return target_nodewise(*data, choice.nodewise);
    case TargetKind::TrueDiagonal:
    case TargetKind::Custom: {
      if (!choice.fixed) throw InputError("target entries missing");
      if (choice.fixed->size() != p) throw InputError("target length does not match S");
      if ((choice.fixed->array() < 0.0).any()) throw InputError("negative target entry");
      return {*choice.fixed, choice.kind};
    }
  }
  throw InputError("unknown target kind");
}

}  // namespace gelnet
