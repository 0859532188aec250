#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>

namespace lierec {

/**
 * @brief Dense real matrix of at most 4x4 entries, stored row-major.
 *
 * Every transformation used by the library lives in GL(n) with n <= 4, so the
 * storage is a fixed inline buffer and the type is a cheap value.
 */
class Matrix
{
public:
  static constexpr std::size_t kMaxDim = 4;

  Matrix() = default;

  /// Zero matrix of the given shape.
  Matrix(std::size_t rows, std::size_t cols);

  /// Row-major construction from nested lists, e.g. `Matrix{{1, 2}, {3, 4}}`.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix diagonal(std::initializer_list<double> diag);
  static Matrix from_row_major(std::size_t rows, std::size_t cols, std::span<const double> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double & operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<const double> entries() const noexcept { return {data_.data(), size()}; }
  std::span<double> entries() noexcept { return {data_.data(), size()}; }

  Matrix transpose() const;
  double trace() const;
  bool all_finite() const noexcept;

  Matrix & operator+=(const Matrix & other);
  Matrix & operator-=(const Matrix & other);
  Matrix & operator*=(double s) noexcept;

  friend Matrix operator+(Matrix a, const Matrix & b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix & b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }
  friend Matrix operator*(const Matrix & a, const Matrix & b);

  friend bool operator==(const Matrix & a, const Matrix & b) noexcept;

private:
  std::size_t rows_{0};
  std::size_t cols_{0};
  std::array<double, kMaxDim * kMaxDim> data_{};
};

/// Matrix product; throws DimensionError when `a.cols() != b.rows()`.
Matrix mat_mul(const Matrix & a, const Matrix & b);

/// Determinant of a square matrix up to 4x4.
double determinant(const Matrix & a);

/**
 * @brief Inverse of a square matrix.
 *
 * 2x2 and 3x3 use cofactor formulas; 4x4 homogeneous transforms use the block
 * form [A t; 0 1]^-1 = [A^-1  -A^-1 t; 0 1]; any other 4x4 falls back to
 * Gauss-Jordan elimination with partial pivoting.
 *
 * Throws NumericalError (message carries |det|) when |det| <= kSingularTol.
 */
Matrix mat_inverse(const Matrix & a);

inline constexpr double kSingularTol = 1e-12;

/// Truncated power series sum_{k=0}^{terms} a^k / k!.
Matrix mat_exp_series(const Matrix & a, int terms);

double frobenius_norm(const Matrix & a) noexcept;

/// Frobenius norm of a - b.
double frobenius_distance(const Matrix & a, const Matrix & b);

}  // namespace lierec
