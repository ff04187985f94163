#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace gelnet {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense symmetric matrix. Every write goes to both triangles, so
/// `(i, j)` and `(j, i)` are always bit-identical.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index p);

  /// Takes ownership of `m`; throws InputError unless `m` is square and
  /// exactly symmetric.
  static SymMatrix from_symmetric(Matrix m);

  /// Returns (m + m^T) / 2 with the upper triangle mirrored, so the
  /// result is exactly symmetric even under round-off.
  static SymMatrix symmetrized(const Matrix& m);

  static SymMatrix identity(Index p);
  static SymMatrix diagonal(const Vector& d);

  Index size() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  void set(Index i, Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Matrix& mat() const { return m_; }
  Vector diag() const { return m_.diagonal(); }

  SymMatrix principal(const std::vector<Index>& idx) const;

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Matrix m_;
};

/// Copies the upper triangle onto the lower one.
void mirror_upper(Matrix& m);

bool is_exactly_symmetric(const Matrix& m);

/// Cholesky-based positive definiteness test.
bool is_positive_definite(const Matrix& m);

// Headerless CSV, one matrix row per line. Writes use 17 significant digits so a
// read of a written file reproduces every double bit for bit. Parsing
// is locale independent.
Matrix read_csv(const std::filesystem::path& path);
Matrix parse_csv(const std::string& text);
void write_csv(const std::filesystem::path& path, const Matrix& m);
std::string format_csv(const Matrix& m);
std::string format_double(double v);

}  // namespace gelnet
