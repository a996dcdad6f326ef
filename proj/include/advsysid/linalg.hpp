#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace advsysid {

using Vector = std::vector<double>;

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diag(std::span<const double> entries);
  static Matrix from_rows(std::size_t rows, std::size_t cols, std::vector<double> entries);
  /// Rows must all have the same length.
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& entries() const noexcept { return data_; }

  Matrix transpose() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double frobenius_norm(const Matrix& m);

/// Largest singular value by power iteration on MᵀM. Stops once the
/// eigen-residual ‖MᵀMv − λv‖ falls below tol·λ or after 10,000 steps.
double spectral_norm(const Matrix& m, double tol = 1e-10);

double frobenius_distance(const Matrix& a, const Matrix& b);

/// Solves G·X = C for symmetric positive definite G via Cholesky.
/// Throws DegenerateGram (carrying the smallest pivot) when G is not SPD.
Matrix solve_spd(const Matrix& g, const Matrix& c);

/// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi rotations).
double min_eig_sym(const Matrix& s);

/// All eigenvalues of a symmetric matrix, ascending.
Vector eig_sym(const Matrix& s);

/// LU factorization with partial pivoting for small square systems.
class LuFactor {
 public:
  explicit LuFactor(const Matrix& a);

  bool singular() const noexcept { return singular_; }
  /// Solves A·x = b in place.
  void solve(std::span<double> b) const;
  /// Solves Aᵀ·x = b in place.
  void solve_transpose(std::span<double> b) const;

 private:
  std::size_t n_;
  Matrix lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
};

}  // namespace advsysid
