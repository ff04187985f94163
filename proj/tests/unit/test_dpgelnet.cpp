#include <doctest.h>
#include <gelnet/dpgelnet.hpp>
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

}  // namespace

TEST_CASE("2x2 fit matches the high-precision reference") {
  Matrix s(2, 2);
  s << 1, 0.5, 0.5, 1;
  const auto fit = dpgelnet_fit(validate(s, 0.2, 0.5, std::nullopt, tight()));
  REQUIRE(fit.conv);
  CHECK(fit.theta(0, 0) == doctest::Approx(0.928200432039077549668).epsilon(1e-8));
  CHECK(fit.theta(0, 1) == doctest::Approx(-0.288790133989224355992).epsilon(1e-8));
}

TEST_CASE("agrees with proximal gradient for alpha in {0, 0.5, 1}") {
  for (int rep = 0; rep < 6; ++rep) {
    const Index p = 3 + rep % 2;
    const double alpha = (rep % 3) * 0.5;
    const auto s = random_correlation(p, 500 + rep);
    const auto spec = validate(s.mat(), 0.2, alpha, std::nullopt, tight());
    const auto fit = dpgelnet_fit(spec);
    REQUIRE(fit.conv);
    const auto ref = prox_gradient_reference(spec);
    CHECK(objective(spec, fit.theta.mat()) == doctest::Approx(ref.objective).epsilon(1e-9));
    CHECK((fit.theta.mat() - ref.theta).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("matches gelnet on a larger problem") {
  const auto s = random_correlation(15, 42);
  for (double alpha : {0.0, 0.5, 1.0}) {
    const auto spec = validate(s.mat(), 0.2, alpha, std::nullopt, tight());
    const auto a = gelnet_fit(spec);
    const auto b = dpgelnet_fit(spec);
    REQUIRE(a.conv);
    REQUIRE(b.conv);
    CHECK((a.theta.mat() - b.theta.mat()).cwiseAbs().maxCoeff() < 1e-6);
    const auto k = kkt_report(spec, b.theta.mat(), b.w.mat());
    CHECK(k.support < 1e-7);
    CHECK(k.off_support < 1e-7);
    CHECK(k.inverse < 1e-7);
  }
}

TEST_CASE("every iterate stays positive definite") {
  const auto s = random_correlation(10, 3);
  const auto spec = validate(s.mat(), 0.1, 0.5, std::nullopt, tight());
  int checked = 0;
  FitHooks hooks;
  hooks.on_column = [&](const ColumnEvent& e) {
    CHECK(is_positive_definite(e.theta));
    ++checked;
  };
  const auto fit = dpgelnet_fit(spec, std::nullopt, hooks);
  CHECK(fit.conv);
  CHECK(checked == 10 * fit.niter);
}

TEST_CASE("schur complement of the updated column equals 1 / w22") {
  const auto s = random_correlation(6, 19);
  const auto spec = validate(s.mat(), 0.15, 0.7);
  FitHooks hooks;
  hooks.on_column = [&](const ColumnEvent& e) {
    const double schur = schur_check(e.theta, e.column);
    CHECK(schur > 0.0);
    CHECK(std::abs(schur - 1.0 / e.w22_used) <= 1e-8 * (1.0 / e.w22_used));
  };
  CHECK(dpgelnet_fit(spec, std::nullopt, hooks).conv);
}

TEST_CASE("zero constraints are exact") {
  const auto s = random_correlation(6, 23);
  ProblemOptions o;
  o.zero = ZeroConstraints({{0, 1}, {3, 4}});
  for (double alpha : {0.0, 0.5}) {
    const auto spec = validate(s.mat(), 0.05, alpha, std::nullopt, tight(o));
    const auto d = dpgelnet_fit(spec);
    const auto g = gelnet_fit(spec);
    REQUIRE(d.conv);
    REQUIRE(g.conv);
    CHECK(d.theta(0, 1) == 0.0);
    CHECK(d.theta(4, 3) == 0.0);
    CHECK((d.theta.mat() - g.theta.mat()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("unpenalized diagonal") {
  const auto s = random_correlation(5, 29);
  ProblemOptions o;
  o.penalize_diagonal = false;
  const auto spec = validate(s.mat(), 0.2, 0.5, std::nullopt, tight(o));
  const auto d = dpgelnet_fit(spec);
  REQUIRE(d.conv);
  for (Index i = 0; i < 5; ++i) CHECK(d.w(i, i) == s(i, i));
  CHECK((d.theta.mat() - gelnet_fit(spec).theta.mat()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("input errors") {
  const auto s = random_correlation(3, 1);
  CHECK_THROWS_AS(dpgelnet_fit(validate(s.mat(), 0.1, 0.5, Vector::Ones(3))), InputError);
  const auto spec = validate(s.mat(), 0.1, 0.5);
  Matrix bad = Matrix::Identity(3, 3);
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(dpgelnet_fit(spec, WarmStart{SymMatrix::from_symmetric(bad), s}), InputError);
}

TEST_CASE("warm start from gelnet converges immediately") {
  const auto s = random_correlation(8, 31);
  const auto spec = validate(s.mat(), 0.2, 0.5, std::nullopt, tight());
  const auto g = gelnet_fit(spec);
  const auto d = dpgelnet_fit(spec, WarmStart{g.theta, g.w});
  CHECK(d.conv);
  CHECK((d.theta.mat() - g.theta.mat()).cwiseAbs().maxCoeff() < 1e-8);
}
