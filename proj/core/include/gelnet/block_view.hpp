#pragma once

#include <gelnet/matrix.hpp>

namespace gelnet {

/// A square matrix with one row/column removed, addressed without copying.
/// Index `k` of the view maps to `k` (k < excluded) or `k + 1` of the
/// underlying matrix. With `excluded < 0` the view is the whole matrix.
class PrincipalView {
 public:
  explicit PrincipalView(const Matrix& full, Index excluded = -1)
      : full_(&full), excluded_(excluded) {}

  Index size() const { return excluded_ < 0 ? full_->rows() : full_->rows() - 1; }
  Index excluded() const { return excluded_; }
  const Matrix& full() const { return *full_; }

  Index to_full(Index k) const { return (excluded_ >= 0 && k >= excluded_) ? k + 1 : k; }
  double operator()(Index a, Index b) const { return (*full_)(to_full(a), to_full(b)); }

  /// Dense copy; tests and small problems only.
  Matrix materialize() const;

 private:
  const Matrix* full_;
  Index excluded_;
};

/// Gathers column `j` of `m` without its diagonal entry (length p-1).
Vector offdiag_column(const Matrix& m, Index j);

/// Writes `v` (length p-1) into row and column `j` of `m`, skipping the
/// diagonal.
void scatter_offdiag(Matrix& m, Index j, const Vector& v);

/// Expands a length p-1 vector into length p with a 0 at position `j`.
Vector expand(const Vector& v, Index j);

/// Drops entry `j` of a length p vector.
Vector contract(const Vector& v, Index j);

/// The partition used by one column update: column `j` plays the role of
/// the last row/column, everything else forms the "11" block.
class BlockView {
 public:
  BlockView(const Matrix& theta, const Matrix& w, const Matrix& s, Index j);

  Index column() const { return j_; }

  PrincipalView W11() const { return PrincipalView(*w_, j_); }
  PrincipalView Theta11() const { return PrincipalView(*theta_, j_); }
  PrincipalView S11() const { return PrincipalView(*s_, j_); }
  Vector w12() const { return offdiag_column(*w_, j_); }
  Vector theta12() const { return offdiag_column(*theta_, j_); }
  Vector s12() const { return offdiag_column(*s_, j_); }
  double w22() const { return (*w_)(j_, j_); }
  double theta22() const { return (*theta_)(j_, j_); }
  double s22() const { return (*s_)(j_, j_); }

 private:
  const Matrix* theta_;
  const Matrix* w_;
  const Matrix* s_;
  Index j_;
};

/// Builds a p x p matrix back from its (11, 12, 22) parts around `j`.
Matrix reassemble(const Matrix& block11, const Vector& v12, double v22, Index j);

/// Throws InputError for p < 2 or j outside [0, p).
BlockView block_view(const Matrix& theta, const Matrix& w, const Matrix& s, Index j);

}  // namespace gelnet
