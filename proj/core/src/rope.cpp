#include <gelnet/error.hpp>
#include <gelnet/rope.hpp>

#include <cmath>

namespace gelnet {

EigenDecomp EigenDecomp::of(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix EigenDecomp::reconstruct() const {
  return vectors * values.asDiagonal() * vectors.transpose();
}

double ridge_spectral(double d, double lambda) {
  const double r = std::sqrt(d * d + 4.0 * lambda);
  // Two algebraically equal forms; pick the one without cancellation.
  return d > 0.0 ? 2.0 / (d + r) : (r - d) / (2.0 * lambda);
}

SymMatrix rope_solve(const SymMatrix& s, double lambda, const SymMatrix* target) {
  if (lambda < 0.0) throw InputError("negative lambda");
  if (target && target->size() != s.size()) throw InputError("target dimension mismatch");
  if (lambda == 0.0) {
    Eigen::LLT<Matrix> llt(s.mat());
    if (llt.info() != Eigen::Success)
      throw InputError("S is singular or indefinite; ridge estimate needs lambda > 0");
    return SymMatrix::symmetrized(llt.solve(Matrix::Identity(s.size(), s.size())));
  }
  Matrix m = s.mat();
  if (target) m -= lambda * target->mat();
  const auto ed = EigenDecomp::of(m);
  return SymMatrix::symmetrized(ed.apply([lambda](double d) { return ridge_spectral(d, lambda); }));
}

FitResult rope_fit(const ProblemSpec& spec) {
  if (spec.alpha != 0.0) throw InputError("rope requires alpha = 0");
  if (!spec.zero.empty()) throw InputError("rope does not support zero constraints");
  if (!spec.penalize_diagonal) throw InputError("rope requires a penalized diagonal");

  FitResult out;
  out.max_block_size = spec.size();
  const double lambda = spec.lambda;
  if (lambda == 0.0) {
    out.theta = rope_solve(spec.s, 0.0);
    out.w = spec.s;
  } else {
    Matrix m = spec.s.mat();
    m.diagonal() -= lambda * spec.target.entries;
    const auto ed = EigenDecomp::of(m);
    const Vector f = ed.values.unaryExpr([lambda](double d) { return ridge_spectral(d, lambda); });
    out.theta = SymMatrix::symmetrized(ed.vectors * f.asDiagonal() * ed.vectors.transpose());
    out.w = SymMatrix::symmetrized(ed.vectors * f.cwiseInverse().asDiagonal() *
                                   ed.vectors.transpose());
  }
  out.niter = 1;
  out.del = 0.0;
  out.conv = true;
  return out;
}

}  // namespace gelnet
