#pragma once

#include <gelnet/problem.hpp>

namespace gelnet {

struct EigenDecomp {
  Vector values;
  Matrix vectors;

  /// Symmetric eigendecomposition, ascending eigenvalues.
  static EigenDecomp of(const Matrix& m);

  Matrix reconstruct() const;
  /// V diag(f(values)) V^T.
  template <class F>
  Matrix apply(F&& f) const {
    Vector fv = values.unaryExpr(f);
    return vectors * fv.asDiagonal() * vectors.transpose();
  }
};

/// Spectral map of the ridge normal equation: the positive root of
/// lambda x^2 + d x - 1 = 0.
double ridge_spectral(double d, double lambda);

/// Ridge precision estimate solving -Theta^{-1} + S + lambda (Theta - T) = 0:
/// Theta = f(S - lambda T) with f the map above. lambda == 0 returns S^{-1}
/// and throws InputError if S is singular.
SymMatrix rope_solve(const SymMatrix& s, double lambda, const SymMatrix* target = nullptr);

/// rope_solve wrapped as a fit (alpha must be 0, no zero constraints).
/// W is the exact inverse of Theta.
FitResult rope_fit(const ProblemSpec& spec);

}  // namespace gelnet
