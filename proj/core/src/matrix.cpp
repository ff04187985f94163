#include <gelnet/error.hpp>
#include <gelnet/matrix.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace gelnet {

SymMatrix::SymMatrix(Index p) : m_(Matrix::Zero(p, p)) {}

SymMatrix SymMatrix::from_symmetric(Matrix m) {
  if (m.rows() != m.cols()) throw InputError("matrix is not square");
  if (!is_exactly_symmetric(m)) throw InputError("matrix is not symmetric");
  SymMatrix out;
  out.m_ = std::move(m);
  return out;
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("matrix is not square");
  Matrix avg = 0.5 * (m + m.transpose());
  mirror_upper(avg);
  SymMatrix out;
  out.m_ = std::move(avg);
  return out;
}

SymMatrix SymMatrix::identity(Index p) { return SymMatrix::from_symmetric(Matrix::Identity(p, p)); }

SymMatrix SymMatrix::diagonal(const Vector& d) {
  Matrix m = Matrix::Zero(d.size(), d.size());
  m.diagonal() = d;
  return SymMatrix::from_symmetric(std::move(m));
}

SymMatrix SymMatrix::principal(const std::vector<Index>& idx) const {
  const auto k = static_cast<Index>(idx.size());
  Matrix sub(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) sub(a, b) = m_(idx[a], idx[b]);
  return SymMatrix::from_symmetric(std::move(sub));
}

void mirror_upper(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j + 1; i < m.rows(); ++i) m(i, j) = m(j, i);
}

bool is_exactly_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j + 1; i < m.rows(); ++i)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

bool is_positive_definite(const Matrix& m) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
    throw InputError("csv line " + std::to_string(line) + ": cannot parse '" + std::string(field) + "'");
  return v;
}

}  // namespace

Matrix parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    std::vector<double> row;
    size_t start = 0;
    while (true) {
      size_t comma = view.find(',', start);
      row.push_back(parse_field(view.substr(start, comma - start), lineno));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError("csv line " + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("csv input is empty");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

Matrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string format_double(double v) {
  // to_chars in general format with precision 17 is "%.17g" without the
  // locale dependence of printf.
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_csv(const Matrix& m) {
  std::string out;
  out.reserve(static_cast<size_t>(m.size()) * 24);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << format_csv(m);
}

}  // namespace gelnet
