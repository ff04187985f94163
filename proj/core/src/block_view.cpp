#include <gelnet/block_view.hpp>
#include <gelnet/error.hpp>

namespace gelnet {

Matrix PrincipalView::materialize() const {
  const Index n = size();
  Matrix out(n, n);
  for (Index b = 0; b < n; ++b)
    for (Index a = 0; a < n; ++a) out(a, b) = (*this)(a, b);
  return out;
}

Vector offdiag_column(const Matrix& m, Index j) {
  const Index p = m.rows();
  Vector v(p - 1);
  v.head(j) = m.col(j).head(j);
  v.tail(p - 1 - j) = m.col(j).tail(p - 1 - j);
  return v;
}

void scatter_offdiag(Matrix& m, Index j, const Vector& v) {
  const Index p = m.rows();
  m.col(j).head(j) = v.head(j);
  m.col(j).tail(p - 1 - j) = v.tail(p - 1 - j);
  m.row(j).head(j) = v.head(j).transpose();
  m.row(j).tail(p - 1 - j) = v.tail(p - 1 - j).transpose();
}

Vector expand(const Vector& v, Index j) {
  const Index p = v.size() + 1;
  Vector out(p);
  out.head(j) = v.head(j);
  out(j) = 0.0;
  out.tail(p - 1 - j) = v.tail(p - 1 - j);
  return out;
}

Vector contract(const Vector& v, Index j) {
  const Index p = v.size();
  Vector out(p - 1);
  out.head(j) = v.head(j);
  out.tail(p - 1 - j) = v.tail(p - 1 - j);
  return out;
}

BlockView::BlockView(const Matrix& theta, const Matrix& w, const Matrix& s, Index j)
    : theta_(&theta), w_(&w), s_(&s), j_(j) {}

BlockView block_view(const Matrix& theta, const Matrix& w, const Matrix& s, Index j) {
  const Index p = s.rows();
  if (p < 2) throw InputError("block view needs p >= 2");
  if (theta.rows() != p || w.rows() != p) throw InputError("block view: dimension mismatch");
  if (j < 0 || j >= p) throw InputError("block view: column out of range");
  return BlockView(theta, w, s, j);
}

Matrix reassemble(const Matrix& block11, const Vector& v12, double v22, Index j) {
  const Index p = block11.rows() + 1;
  Matrix out(p, p);
  for (Index b = 0; b < p - 1; ++b) {
    const Index fb = b >= j ? b + 1 : b;
    for (Index a = 0; a < p - 1; ++a) out(a >= j ? a + 1 : a, fb) = block11(a, b);
  }
  scatter_offdiag(out, j, v12);
  out(j, j) = v22;
  return out;
}

}  // namespace gelnet
