#include <doctest.h>
#include <gelnet/error.hpp>
#include <gelnet/gelnet.hpp>
#include <gelnet/screening.hpp>
#include <support/oracles.hpp>

#include <cmath>

using namespace gelnet;
using gelnet::testing::random_correlation;

namespace {

ProblemOptions tight() {
  ProblemOptions o;
  o.config.outer_thr = 1e-10;
  o.config.inner_thr = 1e-13;
  o.config.outer_maxit = 5000;
  o.config.inner_maxit = 100000;
  return o;
}

// Block-diagonal correlation matrix from `blocks` independent random blocks.
SymMatrix block_correlation(Index blocks, Index size, std::uint64_t seed) {
  Matrix s = Matrix::Zero(blocks * size, blocks * size);
  for (Index b = 0; b < blocks; ++b)
    s.block(b * size, b * size, size, size) = random_correlation(size, seed + b, 3 * size).mat();
  return SymMatrix::from_symmetric(s);
}

}  // namespace

TEST_CASE("solver names") {
  for (Solver s : {Solver::Gelnet, Solver::Dpgelnet, Solver::Rope}) CHECK(parse_solver(to_string(s)) == s);
  CHECK_THROWS_AS(parse_solver("glasso"), InputError);
}

TEST_CASE("threshold graph uses a strict inequality") {
  Matrix s(3, 3);
  s << 1, 0.3, 0.1, 0.3, 1, -0.5, 0.1, -0.5, 1;
  const auto adj = threshold_graph(SymMatrix::from_symmetric(s), 0.3);
  CHECK_FALSE(adj(0, 1));
  CHECK(adj(1, 2));
  CHECK(adj(2, 1));
  CHECK(adj.edge_count() == 1);
}

TEST_CASE("connected components are labelled by their smallest member") {
  Adjacency adj(6);
  adj.connect(4, 1);
  adj.connect(1, 3);
  adj.connect(5, 2);
  const auto c = connected_components(adj);
  CHECK(c.count == 3);
  CHECK(c.members[0] == std::vector<Index>{0});
  CHECK(c.members[1] == std::vector<Index>{1, 3, 4});
  CHECK(c.members[2] == std::vector<Index>{2, 5});
  CHECK(c.labels[4] == 1);
  CHECK(c.max_size() == 3);
}

TEST_CASE("blockwise solution equals the unscreened one") {
  const auto s = block_correlation(3, 5, 10);
  for (Solver solver : {Solver::Gelnet, Solver::Dpgelnet}) {
    const auto spec = validate(s.mat(), 0.2, 0.8, std::nullopt, tight());
    const auto whole = fit_direct(spec, solver);
    const auto split = solve_blockwise(spec, solver);
    REQUIRE(whole.conv);
    REQUIRE(split.conv);
    CHECK(split.n_components >= 3);
    CHECK((whole.theta.mat() - split.theta.mat()).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("thread count does not change the result") {
  const auto s = block_correlation(4, 6, 20);
  const auto spec = validate(s.mat(), 0.25, 0.5);
  const auto a = solve_blockwise(spec, Solver::Gelnet, std::nullopt, {1});
  const auto b = solve_blockwise(spec, Solver::Gelnet, std::nullopt, {4});
  CHECK(a.theta == b.theta);
  CHECK(a.w == b.w);
  CHECK(a.niter == b.niter);
}

TEST_CASE("isolated nodes use the scalar closed form") {
  const auto s = random_correlation(6, 3);
  const double lam = s.mat().cwiseAbs().maxCoeff() + 1.0;  // diagonal entries are 1, so this isolates all
  const auto spec = validate(s.mat(), lam, 1.0);
  const auto fit = solve_blockwise(spec, Solver::Gelnet);
  CHECK(fit.n_components == 6);
  CHECK(fit.max_block_size == 1);
  for (Index i = 0; i < 6; ++i) CHECK(fit.theta(i, i) == doctest::Approx(1.0 / (1.0 + lam)));
  CHECK((fit.theta.mat().array() != 0.0).count() == 6);
}

TEST_CASE("component count is non-decreasing in lambda") {
  const auto s = random_correlation(25, 77);
  Index last = 0;
  for (double lam : {0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.8}) {
    const auto n = connected_components(threshold_graph(s, lam)).count;
    CHECK(n >= last);
    last = n;
  }
}

TEST_CASE("lambda alpha = 0 solves in one piece") {
  const auto s = block_correlation(2, 4, 5);
  const auto fit = solve_blockwise(validate(s.mat(), 0.3, 0.0), Solver::Rope);
  CHECK(fit.n_components == 1);
  CHECK(fit.conv);
}

TEST_CASE("incompatible solver combinations") {
  const auto s = random_correlation(4, 1);
  CHECK_THROWS_AS(fit_direct(validate(s.mat(), 0.3, 0.5), Solver::Rope), InputError);
  CHECK_THROWS_AS(solve_blockwise(validate(s.mat(), 0.3, 0.5, Vector::Ones(4)), Solver::Dpgelnet),
                  InputError);
  CHECK_NOTHROW(check_solver_compatible(validate(s.mat(), 0.3, 0.0, Vector::Ones(4)), Solver::Rope));
}

TEST_CASE("warm starts are split per block") {
  const auto s = block_correlation(3, 4, 40);
  const auto spec = validate(s.mat(), 0.2, 0.5, std::nullopt, tight());
  const auto cold = solve_blockwise(spec, Solver::Dpgelnet);
  const auto warm = solve_blockwise(spec, Solver::Dpgelnet, WarmStart{cold.theta, cold.w});
  CHECK(warm.conv);
  CHECK(warm.niter <= 2);
  CHECK((warm.theta.mat() - cold.theta.mat()).cwiseAbs().maxCoeff() < 1e-8);
}
