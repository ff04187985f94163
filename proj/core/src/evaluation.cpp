#include <gelnet/error.hpp>
#include <gelnet/evaluation.hpp>
#include <gelnet/rope.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gelnet {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + index + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

void require_even(Index p, int model) {
  if (p % 2 != 0) throw InputError("model " + std::to_string(model) + " needs an even p");
}

Matrix inverse_pd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("matrix is not positive definite");
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return SymMatrix::symmetrized(inv).mat();
}

double min_eigenvalue(const Matrix& m) { return EigenDecomp::of(m).values.minCoeff(); }

Matrix scale_both(const Matrix& m, const Vector& d) { return d.asDiagonal() * m * d.asDiagonal(); }

Vector uniform_diagonal(Index p, Rng& rng) {
  std::uniform_real_distribution<double> unif(1.0, 5.0);
  Vector d(p);
  for (Index i = 0; i < p; ++i) d(i) = unif(rng);
  return d;
}

GroundTruth to_correlation(const Matrix& sigma, const Matrix& theta) {
  const Vector sd = sigma.diagonal().cwiseSqrt();
  Matrix sc = scale_both(sigma, sd.cwiseInverse());
  sc.diagonal().setOnes();
  return {SymMatrix::symmetrized(sc), SymMatrix::symmetrized(scale_both(theta, sd))};
}

}  // namespace

Matrix compound_symmetry_covariance(Index p) {
  Matrix s = Matrix::Constant(p, p, 0.36);
  s.diagonal().setOnes();
  return s;
}

Matrix scale_free_adjacency(Index p, Rng& rng) {
  if (p < 2) throw InputError("scale-free model needs p >= 2");
  Matrix a = Matrix::Zero(p, p);
  // Every edge contributes both endpoints; a uniform pick from this list is
  // a pick proportional to degree.
  std::vector<Index> ends{0, 1};
  a(0, 1) = a(1, 0) = 1.0;
  for (Index v = 2; v < p; ++v) {
    std::uniform_int_distribution<size_t> pick(0, ends.size() - 1);
    const Index u = ends[pick(rng)];
    a(u, v) = a(v, u) = 1.0;
    ends.push_back(u);
    ends.push_back(v);
  }
  return a;
}

Matrix hub_adjacency(Index p, Rng& rng) {
  if (p % 10 != 0 || p == 0) throw InputError("hub model needs p divisible by 10");
  Matrix a = Matrix::Zero(p, p);
  std::uniform_int_distribution<Index> pick(0, 9);
  for (Index g = 0; g < p; g += 10) {
    const Index hub = g + pick(rng);
    for (Index k = g; k < g + 10; ++k)
      if (k != hub) a(hub, k) = a(k, hub) = 1.0;
  }
  return a;
}

Matrix block_precision(Index p, Rng& rng) {
  if (p % 10 != 0 || p == 0) throw InputError("block model needs p divisible by 10");
  const Index b = p / 10;
  Matrix t = Matrix::Zero(p, p);
  for (Index g = 0; g < p; g += b) t.block(g, g, b, b).setConstant(0.5);
  t.diagonal().setOnes();
  std::vector<Index> perm(static_cast<size_t>(p));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return t(perm, perm);
}

Matrix band_precision(Index p) {
  Matrix t = Matrix::Identity(p, p);
  for (Index i = 0; i + 1 < p; ++i) t(i, i + 1) = t(i + 1, i) = 0.6;
  for (Index i = 0; i + 2 < p; ++i) t(i, i + 2) = t(i + 2, i) = 0.3;
  return t;
}

Matrix erdos_renyi_precision(Index p, Rng& rng) {
  std::bernoulli_distribution edge(0.05);
  std::uniform_real_distribution<double> weight(0.4, 0.8);
  Matrix t = Matrix::Zero(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j) {
      const bool on = edge(rng);
      const double u = weight(rng);
      if (on) t(i, j) = t(j, i) = u;
    }
  t.diagonal().array() += std::abs(min_eigenvalue(t)) + 0.05;
  return t;
}

Matrix tiger_precision(const Matrix& adjacency) {
  const Index p = adjacency.rows();
  require_even(p, 2);
  Matrix a = 0.3 * adjacency;
  a.diagonal().setZero();
  a.diagonal().array() += std::abs(min_eigenvalue(a)) + 0.2;
  Vector d = Vector::Ones(p);
  d.tail(p / 2).setConstant(3.0);
  return scale_both(a, d);
}

GroundTruth gen_model(const ModelSpec& spec) {
  const Index p = spec.p;
  if (p < 1) throw InputError("p must be positive");
  Rng rng(spec.seed);
  Matrix theta;
  switch (spec.model_id) {
    case 1: {
      const Matrix sigma = compound_symmetry_covariance(p);
      return to_correlation(sigma, inverse_pd(sigma));
    }
    case 2:
      require_even(p, 2);
      theta = tiger_precision(scale_free_adjacency(p, rng));
      break;
    case 3:
      require_even(p, 3);
      theta = tiger_precision(hub_adjacency(p, rng));
      break;
    case 4: {
      require_even(p, 4);
      const Matrix t = block_precision(p, rng);
      Vector d = Vector::Ones(p);
      d.tail(p / 2).setConstant(1.5);
      theta = scale_both(t, d);
      break;
    }
    case 5:
      theta = scale_both(band_precision(p), uniform_diagonal(p, rng));
      break;
    case 6: {
      const Matrix t = erdos_renyi_precision(p, rng);
      theta = scale_both(t, uniform_diagonal(p, rng));
      break;
    }
    default:
      throw InputError("model id must be in 1..6");
  }
  return to_correlation(inverse_pd(theta), theta);
}

Matrix sample_gaussian(const SymMatrix& sigma, Index n, std::uint64_t seed) {
  if (n < 1) throw InputError("sample size must be positive");
  Eigen::LLT<Matrix> llt(sigma.mat());
  if (llt.info() != Eigen::Success) throw InputError("sigma is not positive definite");
  const Matrix l = llt.matrixL();
  const Index p = sigma.size();
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Matrix z(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) z(i, j) = normal(rng);
  return z * l.transpose();
}

SymMatrix sample_covariance(const Matrix& data) {
  if (data.rows() < 1) throw InputError("empty data matrix");
  const Matrix x = data.rowwise() - data.colwise().mean();
  return SymMatrix::symmetrized(x.transpose() * x / static_cast<double>(data.rows()));
}

SymMatrix sample_correlation(const Matrix& data) {
  const SymMatrix cov = sample_covariance(data);
  const Vector d = cov.diag();
  if (!(d.array() > 0.0).all()) throw InputError("column with zero variance");
  Matrix c = scale_both(cov.mat(), d.cwiseSqrt().cwiseInverse());
  c.diagonal().setOnes();
  return SymMatrix::symmetrized(c);
}

double kl_loss(const SymMatrix& sigma, const SymMatrix& theta_hat) {
  if (sigma.size() != theta_hat.size()) throw InputError("dimension mismatch");
  Eigen::LLT<Matrix> ls(sigma.mat()), lt(theta_hat.mat());
  if (ls.info() != Eigen::Success || lt.info() != Eigen::Success)
    throw InputError("nonpositive determinant in KL loss");
  const Matrix& lsm = ls.matrixLLT();
  const Matrix& ltm = lt.matrixLLT();
  const double logdet = 2.0 * (lsm.diagonal().array().log().sum() + ltm.diagonal().array().log().sum());
  const double tr = sigma.mat().cwiseProduct(theta_hat.mat()).sum();
  return tr - logdet - static_cast<double>(sigma.size());
}

double l2_loss(const SymMatrix& theta, const SymMatrix& theta_hat) {
  if (theta.size() != theta_hat.size()) throw InputError("dimension mismatch");
  return (theta.mat() - theta_hat.mat()).norm();
}

double sp_loss(const SymMatrix& theta, const SymMatrix& theta_hat) {
  if (theta.size() != theta_hat.size()) throw InputError("dimension mismatch");
  // Symmetric difference: singular values are the absolute eigenvalues.
  return EigenDecomp::of(theta.mat() - theta_hat.mat()).values.cwiseAbs().maxCoeff();
}

ConfusionCounts graph_confusion(const SymMatrix& theta_hat, const SymMatrix& theta, double eps,
                                bool absolute) {
  if (theta.size() != theta_hat.size()) throw InputError("dimension mismatch");
  auto edge = [&](double v) { return (absolute ? std::abs(v) : v) >= eps; };
  ConfusionCounts c;
  const Index p = theta.size();
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < j; ++i) {
      const bool est = edge(theta_hat(i, j));
      const bool truth = edge(theta(i, j));
      if (est && truth) ++c.tp;
      else if (est) ++c.fp;
      else if (truth) ++c.fn;
      else ++c.tn;
    }
  return c;
}

double f1_score(const ConfusionCounts& c) {
  const auto denom = 2 * c.tp + c.fn + c.fp;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

double mcc_score(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  const double prod = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (prod == 0.0) return (c.fp == 0 && c.fn == 0) ? 1.0 : 0.0;
  return (tp * tn - fp * fn) / std::sqrt(prod);
}

}  // namespace gelnet
