#include <gelnet/cv.hpp>
#include <gelnet/error.hpp>
#include <gelnet/evaluation.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace gelnet {

double heldout_score(const SymMatrix& theta, const SymMatrix& s_test) {
  if (theta.size() != s_test.size()) throw InputError("dimension mismatch");
  Eigen::LLT<Matrix> llt(theta.mat());
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const Matrix& l = llt.matrixLLT();
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  return -logdet + s_test.mat().cwiseProduct(theta.mat()).sum();
}

std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed) {
  if (folds < 2 || n < folds) throw InputError("cross-validation needs n >= folds >= 2");
  std::vector<Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold(static_cast<size_t>(n));
  for (size_t pos = 0; pos < perm.size(); ++pos)
    fold[static_cast<size_t>(perm[pos])] = static_cast<int>(pos % static_cast<size_t>(folds));
  return fold;
}

namespace {

SymMatrix transform(const Matrix& data, bool correlation) {
  return correlation ? sample_correlation(data) : sample_covariance(data);
}

// Nodewise targets see the data on the same scale as S.
Matrix scaled_for_target(const Matrix& data, bool correlation) {
  if (!correlation) return data;
  const Matrix x = data.rowwise() - data.colwise().mean();
  const Eigen::RowVectorXd sd =
      (x.colwise().squaredNorm() / static_cast<double>(x.rows())).cwiseSqrt();
  return x.array().rowwise() / sd.array();
}

ProblemSpec build_problem(const Matrix& data, const SymMatrix& s, double lambda,
                          const CvOptions& o) {
  DiagonalTarget target;
  if (o.target.kind == TargetKind::NodewiseRegression) {
    const Matrix scaled = scaled_for_target(data, o.use_correlation);
    target = build_target(o.target, s, &scaled);
  } else {
    target = build_target(o.target, s, nullptr);
  }
  ProblemOptions po;
  po.penalize_diagonal = o.penalize_diagonal;
  po.config = o.config;
  ProblemSpec spec = validate(s.mat(), lambda, o.alpha, target.entries, po);
  spec.target.kind = target.kind;
  return spec;
}

}  // namespace

ProblemSpec cv_problem(const Matrix& data, double lambda, const CvOptions& options) {
  return build_problem(data, transform(data, options.use_correlation), lambda, options);
}

FitResult cv_fit(const ProblemSpec& spec, const CvOptions& options,
                 const std::optional<WarmStart>& warm) {
  if (options.screening) return solve_blockwise(spec, options.solver, warm, {options.threads});
  return fit_direct(spec, options.solver, warm);
}

CvResult cross_validate(const Matrix& data, std::vector<double> grid, const CvOptions& options) {
  if (grid.empty()) throw InputError("empty lambda grid");
  for (double l : grid)
    if (!(l > 0.0) || !std::isfinite(l)) throw InputError("lambda grid must be strictly positive");
  std::stable_sort(grid.begin(), grid.end(), std::greater<>());

  const Index n = data.rows();
  const int k = options.folds;
  const auto fold_of = fold_assignment(n, k, options.seed);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<CvScore> scores;
  for (double l : grid) scores.push_back({l, nan, 0, std::vector<double>(static_cast<size_t>(k), nan)});

  for (int f = 0; f < k; ++f) {
    std::vector<Index> tr, te;
    for (Index i = 0; i < n; ++i) (fold_of[static_cast<size_t>(i)] == f ? te : tr).push_back(i);
    const Matrix x_tr = data(tr, Eigen::all);
    const SymMatrix s_tr = transform(x_tr, options.use_correlation);
    const SymMatrix s_te = transform(data(te, Eigen::all), options.use_correlation);

    // The target only depends on the training rows, not on lambda.
    const ProblemSpec base = build_problem(x_tr, s_tr, grid.front(), options);
    std::optional<WarmStart> warm;
    for (size_t g = 0; g < grid.size(); ++g) {
      ProblemSpec spec = base;
      spec.lambda = grid[g];
      const FitResult fit = cv_fit(spec, options, warm);
      if (!fit.conv) continue;
      const double score = heldout_score(fit.theta, s_te);
      if (!std::isfinite(score)) continue;
      scores[g].fold_scores[static_cast<size_t>(f)] = score;
      warm = WarmStart{fit.theta, fit.w};
    }
  }

  std::optional<size_t> best;
  for (size_t g = 0; g < scores.size(); ++g) {
    auto& sc = scores[g];
    double sum = 0.0;
    for (double v : sc.fold_scores)
      if (!std::isnan(v)) {
        sum += v;
        ++sc.n_valid;
      }
    if (sc.n_valid == 0) continue;
    sc.mean_score = sum / sc.n_valid;
    if (!best || sc.mean_score < scores[*best].mean_score) best = g;
  }
  if (!best) throw NumericalError("no lambda in the grid produced a valid fit on any fold");

  CvResult out;
  out.lambda_opt = grid[*best];
  out.fit = cv_fit(cv_problem(data, out.lambda_opt, options), options);
  out.scores = std::move(scores);
  return out;
}

std::vector<double> parse_lambda_grid(const std::string& text) {
  auto number = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw InputError("bad number '" + std::string(s) + "' in lambda grid");
    return v;
  };
  std::vector<double> out;
  std::string_view body(text);
  if (body.rfind("geo:", 0) == 0) {
    body.remove_prefix(4);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw InputError("geometric grid needs 'geo:base,count'");
    const double base = number(body.substr(0, comma));
    const double count = number(body.substr(comma + 1));
    if (!(base > 0.0) || count < 1 || count != std::floor(count))
      throw InputError("geometric grid needs base > 0 and a positive integer count");
    for (int k = 0; k < static_cast<int>(count); ++k) out.push_back(std::pow(base, k));
  } else {
    size_t start = 0;
    while (start <= body.size()) {
      const auto comma = body.find(',', start);
      const auto end = comma == std::string_view::npos ? body.size() : comma;
      out.push_back(number(body.substr(start, end - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  for (double v : out)
    if (!(v > 0.0)) throw InputError("lambda grid values must be positive");
  return out;
}

}  // namespace gelnet
