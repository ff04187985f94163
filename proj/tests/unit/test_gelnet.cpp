#include <doctest.h>
#include <gelnet/error.hpp>
#include <gelnet/gelnet.hpp>
#include <support/oracles.hpp>

#include <cmath>

using namespace gelnet;
using gelnet::testing::kkt_report;
using gelnet::testing::prox_gradient_reference;
using gelnet::testing::random_correlation;

namespace {

ProblemOptions tight(ProblemOptions o = {}) {
  o.config.outer_thr = 1e-10;
  o.config.inner_thr = 1e-13;
  o.config.outer_maxit = 5000;
  o.config.inner_maxit = 100000;
  return o;
}

Matrix corr2(double r) {
  Matrix s(2, 2);
  s << 1, r, r, 1;
  return s;
}

}  // namespace

TEST_CASE("2x2 elastic net fit matches the high-precision reference") {
  // Reference solved independently with 30-digit arithmetic.
  const auto spec = validate(corr2(0.5), 0.2, 0.5, std::nullopt, tight());
  const auto fit = gelnet_fit(spec);
  REQUIRE(fit.conv);
  CHECK(fit.theta(0, 0) == doctest::Approx(0.928200432039077549668).epsilon(1e-9));
  CHECK(fit.theta(1, 1) == doctest::Approx(0.928200432039077549668).epsilon(1e-9));
  CHECK(fit.theta(0, 1) == doctest::Approx(-0.288790133989224355992).epsilon(1e-9));
}

TEST_CASE("scalar closed form") {
  // Root of 0.5 x^2 + 1.5 x - 1 = 0.
  const auto spec = validate(Matrix::Ones(1, 1), 1.0, 0.5);
  const auto fit = gelnet_fit(spec);
  CHECK(fit.conv);
  CHECK(fit.theta(0, 0) == doctest::Approx(0.5615528128088303).epsilon(1e-14));
  CHECK(fit.w(0, 0) * fit.theta(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("agrees with proximal gradient on small random problems") {
  for (int rep = 0; rep < 6; ++rep) {
    const Index p = 3 + rep % 3;
    const double alpha = (rep % 3) * 0.5;
    const auto s = random_correlation(p, 100 + rep);
    const auto spec = validate(s.mat(), 0.15, alpha, std::nullopt, tight());
    const auto fit = gelnet_fit(spec);
    REQUIRE(fit.conv);
    const auto ref = prox_gradient_reference(spec);
    CHECK(objective(spec, fit.theta.mat()) == doctest::Approx(ref.objective).epsilon(1e-9));
    CHECK((fit.theta.mat() - ref.theta).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("converged fits satisfy the optimality conditions") {
  const auto s = random_correlation(12, 5);
  for (double alpha : {0.0, 0.3, 1.0}) {
    const auto spec = validate(s.mat(), 0.1, alpha, std::nullopt, tight());
    const auto fit = gelnet_fit(spec);
    REQUIRE(fit.conv);
    const auto k = kkt_report(spec, fit.theta.mat(), fit.w.mat());
    CHECK(k.support < 1e-7);
    CHECK(k.off_support < 1e-7);
    CHECK(k.inverse < 1e-7);
  }
}

TEST_CASE("lambda = 0 gives the inverse") {
  const auto s = random_correlation(5, 9, 20);
  const auto spec = validate(s.mat(), 0.0, 1.0, std::nullopt, tight());
  const auto fit = gelnet_fit(spec);
  REQUIRE(fit.conv);
  const Matrix inv = s.mat().inverse();
  CHECK((fit.theta.mat() - inv).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("zero constraints are exact and the rest is optimal") {
  const auto s = random_correlation(6, 21);
  ProblemOptions o;
  o.zero = ZeroConstraints({{0, 1}, {2, 5}});
  const auto spec = validate(s.mat(), 0.05, 0.5, std::nullopt, tight(o));
  const auto fit = gelnet_fit(spec);
  REQUIRE(fit.conv);
  CHECK(fit.theta(0, 1) == 0.0);
  CHECK(fit.theta(5, 2) == 0.0);
  CHECK((fit.w.mat() * fit.theta.mat() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-7);
  const double l1 = spec.lambda_alpha(), l2 = spec.lambda_ridge();
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j) {
      if (i == j || spec.zero.contains(i, j)) continue;
      const double th = fit.theta(i, j);
      const double r = s(i, j) - fit.w(i, j);
      if (th != 0.0) CHECK(std::abs(r + l1 * (th > 0 ? 1 : -1) + l2 * th) < 1e-7);
      else CHECK(std::abs(r) <= l1 + 1e-7);
    }
}

TEST_CASE("unpenalized diagonal keeps w_ii = s_ii") {
  const auto s = random_correlation(5, 33);
  ProblemOptions o;
  o.penalize_diagonal = false;
  const auto spec = validate(s.mat(), 0.2, 0.7, std::nullopt, tight(o));
  const auto fit = gelnet_fit(spec);
  REQUIRE(fit.conv);
  for (Index i = 0; i < 5; ++i) CHECK(fit.w(i, i) == doctest::Approx(s(i, i)).epsilon(1e-8));
  const auto ref = prox_gradient_reference(spec);
  CHECK(objective(spec, fit.theta.mat()) == doctest::Approx(ref.objective).epsilon(1e-9));
}

TEST_CASE("warm start from a converged fit stops after one sweep") {
  const auto s = random_correlation(8, 2);
  const auto spec = validate(s.mat(), 0.2, 0.5, std::nullopt, tight());
  const auto cold = gelnet_fit(spec);
  REQUIRE(cold.conv);
  const auto warm = gelnet_fit(spec, WarmStart{cold.theta, cold.w});
  CHECK(warm.conv);
  CHECK(warm.niter <= 2);
  CHECK((warm.theta.mat() - cold.theta.mat()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("hooks see every column of every sweep") {
  const auto s = random_correlation(4, 3);
  const auto spec = validate(s.mat(), 0.2, 0.5);
  int columns = 0, sweeps = 0;
  FitHooks hooks;
  hooks.on_column = [&](const ColumnEvent& e) {
    CHECK(e.column == columns % 4);
    ++columns;
  };
  hooks.on_sweep = [&](int, const Matrix&, const Matrix&) { ++sweeps; };
  const auto fit = gelnet_fit(spec, std::nullopt, hooks);
  CHECK(fit.conv);
  CHECK(sweeps == fit.niter);
  CHECK(columns == 4 * fit.niter);
}

TEST_CASE("iteration budget exhaustion reports conv = false") {
  const auto s = random_correlation(10, 4);
  ProblemOptions o;
  o.config.outer_maxit = 1;
  o.config.outer_thr = 1e-12;
  const auto fit = gelnet_fit(validate(s.mat(), 0.05, 0.5, std::nullopt, o));
  CHECK_FALSE(fit.conv);
  CHECK_FALSE(fit.diagnostic.empty());
  CHECK(fit.niter == 1);
}

TEST_CASE("indefinite S with lambda = 0 does not crash") {
  Matrix s(2, 2);
  s << 1, 2, 2, 1;
  const auto fit = gelnet_fit(validate(s, 0.0, 1.0));
  CHECK_FALSE(fit.conv);
}

TEST_CASE("diagonal case selection") {
  CHECK(target_case_select(0.5, 0.1) == DiagCase::Above);
  CHECK(target_case_select(-0.5, 0.1) == DiagCase::Below);
  CHECK(target_case_select(0.05, 0.1) == DiagCase::At);
  CHECK(target_case_select(0.1, 0.1) == DiagCase::At);
}

TEST_CASE("diagonal quadratic updates solve their normal equation") {
  const double s22 = 1.2, lambda = 0.4, alpha = 0.25, t22 = 0.7, dot = 0.1;
  for (DiagCase c : {DiagCase::Above, DiagCase::Below}) {
    const auto u = solve_diag_quadratic(c, s22, lambda, alpha, t22, dot);
    const double sg = c == DiagCase::Above ? 1.0 : -1.0;
    // w22 = 1/theta22 + dot is the Schur relation the update must honour.
    CHECK(u.w22 == doctest::Approx(1.0 / u.theta22 + dot).epsilon(1e-12));
    CHECK(u.w22 == doctest::Approx(s22 + sg * lambda * alpha + lambda * (1 - alpha) * (u.theta22 - t22)));
  }
  const auto at = solve_diag_quadratic(DiagCase::At, s22, lambda, alpha, t22, dot);
  CHECK(at.theta22 == t22);
  CHECK(at.w22 == doctest::Approx(1.0 / t22 + dot));
  // At with a zero target behaves like Above.
  const auto z = solve_diag_quadratic(DiagCase::At, s22, lambda, alpha, 0.0, 0.0);
  CHECK(z.theta22 == doctest::Approx(*positive_root(lambda * (1 - alpha), s22 + lambda * alpha)));
  CHECK_THROWS_AS(solve_diag_quadratic(DiagCase::Below, 0.05, 1.0, 1.0, 0.0, 0.0), NumericalError);
}

TEST_CASE("target fit agrees with proximal gradient") {
  const auto s = random_correlation(4, 77);
  Vector t(4);
  t << 1.0, 2.0, 0.5, 1.3;
  for (double alpha : {0.2, 0.5, 1.0}) {
    const auto spec = validate(s.mat(), 0.3, alpha, t, tight());
    const auto fit = gelnet_fit(spec);
    REQUIRE(fit.conv);
    const auto ref = prox_gradient_reference(spec);
    CHECK(objective(spec, fit.theta.mat()) == doctest::Approx(ref.objective).epsilon(1e-9));
    CHECK((fit.theta.mat() - ref.theta).cwiseAbs().maxCoeff() < 1e-5);
    const auto k = kkt_report(spec, fit.theta.mat(), fit.w.mat());
    CHECK(k.support < 1e-7);
    CHECK(k.off_support < 1e-7);
  }
}

TEST_CASE("alpha = 0 with a target equals the ridge closed form") {
  const auto s = random_correlation(5, 8);
  const auto spec = validate(s.mat(), 0.4, 0.0, Vector::Ones(5), tight());
  const auto fit = gelnet_fit(spec);
  REQUIRE(fit.conv);
  const Matrix residual = -fit.theta.mat().inverse() + s.mat() + 0.4 * (fit.theta.mat() - Matrix::Identity(5, 5));
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("a huge target either fails loudly or is solved") {
  const auto s = random_correlation(4, 12);
  for (double alpha : {0.1, 0.5, 1.0}) {
    const auto spec = validate(s.mat(), 0.3, alpha, Vector::Constant(4, 1e6));
    const auto fit = gelnet_fit(spec);
    if (!fit.conv) {
      CHECK_FALSE(fit.diagnostic.empty());
      continue;
    }
    const auto k = kkt_report(spec, fit.theta.mat(), fit.w.mat());
    const double tol = 100 * spec.config.outer_thr * convergence_scale(s.mat());
    CHECK(k.support <= tol);
    CHECK(k.off_support <= tol);
    CHECK(k.inverse <= tol);
  }
}

TEST_CASE("objective does not increase across sweeps") {
  for (int rep = 0; rep < 4; ++rep) {
    const auto s = random_correlation(10, 300 + rep);
    Vector t = Vector::Zero(10);
    if (rep % 2 == 1) t.setConstant(1.2);
    const auto spec = validate(s.mat(), 0.15, 0.5, t, tight());
    std::vector<double> values;
    FitHooks hooks;
    hooks.on_sweep = [&](int, const Matrix& theta, const Matrix&) {
      values.push_back(objective(spec, theta));
    };
    const auto fit = gelnet_fit(spec, std::nullopt, hooks);
    REQUIRE(fit.conv);
    for (size_t k = 1; k < values.size(); ++k)
      CHECK(values[k] <= values[k - 1] + 1e-10 * std::abs(values[k - 1]));
  }
}
