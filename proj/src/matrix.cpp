#include "lierec/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lierec/error.hpp"

namespace lierec {

namespace {

void check_shape(std::size_t rows, std::size_t cols)
{
  if (rows == 0 || cols == 0 || rows > Matrix::kMaxDim || cols > Matrix::kMaxDim) {
    throw DimensionError(
      "matrix shape " + std::to_string(rows) + "x" + std::to_string(cols) + " outside 1..4");
  }
}

void check_same_shape(const Matrix & a, const Matrix & b, const char * op)
{
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
       << b.cols();
    throw DimensionError(os.str());
  }
}

bool is_homogeneous(const Matrix & a)
{
  const std::size_t n = a.rows();
  for (std::size_t c = 0; c + 1 < n; ++c) {
    if (a(n - 1, c) != 0.0) { return false; }
  }
  return a(n - 1, n - 1) == 1.0;
}

Matrix inverse_2x2(const Matrix & a, double det)
{
  const double inv = 1.0 / det;
  return Matrix{{a(1, 1) * inv, -a(0, 1) * inv}, {-a(1, 0) * inv, a(0, 0) * inv}};
}

Matrix inverse_3x3(const Matrix & a, double det)
{
  const double inv = 1.0 / det;
  Matrix r(3, 3);
  r(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) * inv;
  r(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) * inv;
  r(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) * inv;
  r(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) * inv;
  r(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) * inv;
  r(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) * inv;
  r(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) * inv;
  r(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) * inv;
  r(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) * inv;
  return r;
}

double det_3x3(const Matrix & a, std::size_t r0, std::size_t r1, std::size_t r2, std::size_t c0,
  std::size_t c1, std::size_t c2)
{
  return a(r0, c0) * (a(r1, c1) * a(r2, c2) - a(r1, c2) * a(r2, c1))
       - a(r0, c1) * (a(r1, c0) * a(r2, c2) - a(r1, c2) * a(r2, c0))
       + a(r0, c2) * (a(r1, c0) * a(r2, c1) - a(r1, c1) * a(r2, c0));
}

Matrix inverse_gauss_jordan(Matrix a)
{
  const std::size_t n = a.rows();
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) { pivot = r; }
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a(col, c), a(pivot, c));
        std::swap(inv(col, c), inv(pivot, c));
      }
    }
    const double p = a(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) /= p;
      inv(col, c) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) { continue; }
      const double f = a(r, col);
      if (f == 0.0) { continue; }
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols)
{
  check_shape(rows, cols);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
{
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  check_shape(rows_, cols_);
  std::size_t r = 0;
  for (const auto & row : rows) {
    if (row.size() != cols_) { throw DimensionError("ragged matrix initializer"); }
    std::size_t c = 0;
    for (double v : row) { (*this)(r, c++) = v; }
    ++r;
  }
}

Matrix Matrix::identity(std::size_t n)
{
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) { m(i, i) = 1.0; }
  return m;
}

Matrix Matrix::diagonal(std::initializer_list<double> diag)
{
  Matrix m(diag.size(), diag.size());
  std::size_t i = 0;
  for (double v : diag) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::from_row_major(std::size_t rows, std::size_t cols, std::span<const double> entries)
{
  Matrix m(rows, cols);
  if (entries.size() != rows * cols) {
    throw DimensionError("expected " + std::to_string(rows * cols) + " entries, got "
                         + std::to_string(entries.size()));
  }
  std::copy(entries.begin(), entries.end(), m.data_.begin());
  return m;
}

Matrix Matrix::transpose() const
{
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) { t(c, r) = (*this)(r, c); }
  }
  return t;
}

double Matrix::trace() const
{
  if (!is_square()) { throw DimensionError("trace of non-square matrix"); }
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) { s += (*this)(i, i); }
  return s;
}

bool Matrix::all_finite() const noexcept
{
  const auto e = entries();
  return std::all_of(e.begin(), e.end(), [](double v) { return std::isfinite(v); });
}

Matrix & Matrix::operator+=(const Matrix & other)
{
  check_same_shape(*this, other, "add");
  for (std::size_t i = 0; i < size(); ++i) { data_[i] += other.data_[i]; }
  return *this;
}

Matrix & Matrix::operator-=(const Matrix & other)
{
  check_same_shape(*this, other, "subtract");
  for (std::size_t i = 0; i < size(); ++i) { data_[i] -= other.data_[i]; }
  return *this;
}

Matrix & Matrix::operator*=(double s) noexcept
{
  for (std::size_t i = 0; i < size(); ++i) { data_[i] *= s; }
  return *this;
}

Matrix operator*(const Matrix & a, const Matrix & b) { return mat_mul(a, b); }

bool operator==(const Matrix & a, const Matrix & b) noexcept
{
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) { return false; }
  return std::equal(a.data_.begin(), a.data_.begin() + a.size(), b.data_.begin());
}

Matrix mat_mul(const Matrix & a, const Matrix & b)
{
  if (a.cols() != b.rows()) {
    std::ostringstream os;
    os << "mat_mul: " << a.rows() << "x" << a.cols() << " times " << b.rows() << "x" << b.cols();
    throw DimensionError(os.str());
  }
  Matrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) { r(i, j) += aik * b(k, j); }
    }
  }
  return r;
}

double determinant(const Matrix & a)
{
  if (!a.is_square()) { throw DimensionError("determinant of non-square matrix"); }
  switch (a.rows()) {
    case 1: return a(0, 0);
    case 2: return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3: return det_3x3(a, 0, 1, 2, 0, 1, 2);
    default: {
      // Laplace expansion along the last row keeps homogeneous transforms exact.
      double det = 0.0;
      for (std::size_t c = 0; c < 4; ++c) {
        if (a(3, c) == 0.0) { continue; }
        std::array<std::size_t, 3> cols{};
        std::size_t k = 0;
        for (std::size_t j = 0; j < 4; ++j) {
          if (j != c) { cols[k++] = j; }
        }
        const double minor = det_3x3(a, 0, 1, 2, cols[0], cols[1], cols[2]);
        det += ((3 + c) % 2 == 0 ? 1.0 : -1.0) * a(3, c) * minor;
      }
      return det;
    }
  }
}

Matrix mat_inverse(const Matrix & a)
{
  if (!a.is_square()) { throw DimensionError("mat_inverse: non-square matrix"); }
  const double det = determinant(a);
  if (!(std::abs(det) > kSingularTol)) {
    std::ostringstream os;
    os << "mat_inverse: singular matrix, |det| = " << std::abs(det);
    throw NumericalError(os.str());
  }
  switch (a.rows()) {
    case 1: return Matrix{{1.0 / a(0, 0)}};
    case 2: return inverse_2x2(a, det);
    case 3: return inverse_3x3(a, det);
    default: break;
  }
  if (!is_homogeneous(a)) { return inverse_gauss_jordan(a); }

  Matrix block(3, 3);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) { block(r, c) = a(r, c); }
  }
  const Matrix block_inv = inverse_3x3(block, det);
  Matrix r = Matrix::identity(4);
  for (std::size_t i = 0; i < 3; ++i) {
    double t = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      r(i, k) = block_inv(i, k);
      t += block_inv(i, k) * a(k, 3);
    }
    r(i, 3) = -t;
  }
  return r;
}

Matrix mat_exp_series(const Matrix & a, int terms)
{
  if (!a.is_square()) { throw DimensionError("mat_exp_series: non-square matrix"); }
  if (terms < 1) { throw DimensionError("mat_exp_series: terms must be >= 1"); }
  Matrix sum = Matrix::identity(a.rows());
  Matrix term = sum;
  for (int k = 1; k <= terms; ++k) {
    term = mat_mul(term, a) * (1.0 / k);
    sum += term;
  }
  return sum;
}

double frobenius_norm(const Matrix & a) noexcept
{
  double s = 0.0;
  for (double v : a.entries()) { s += v * v; }
  return std::sqrt(s);
}

double frobenius_distance(const Matrix & a, const Matrix & b) { return frobenius_norm(a - b); }

}  // namespace lierec
