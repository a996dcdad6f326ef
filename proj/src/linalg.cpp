#include "advsysid/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "advsysid/errors.hpp"

namespace advsysid {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InvalidInput("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diag(std::span<const double> entries) {
  Matrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

Matrix Matrix::from_rows(std::size_t rows, std::size_t cols, std::vector<double> entries) {
  if (entries.size() != rows * cols) {
    throw InvalidInput("matrix entry count does not match shape");
  }
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(entries);
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> entries;
  entries.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw InvalidInput("matrix rows must have equal length");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return from_rows(rows.size(), cols, std::move(entries));
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw InvalidInput("shape mismatch in +");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw InvalidInput("shape mismatch in -");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("shape mismatch in matrix product");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw InvalidInput("shape mismatch in matrix-vector product");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Matrix& m) { return norm2(m.entries()); }

double spectral_norm(const Matrix& m, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("spectral_norm: tol must be positive");
  if (!m.all_finite()) throw InvalidInput("spectral_norm: non-finite entries");
  const std::size_t n = m.cols();
  if (n == 0 || m.rows() == 0) return 0.0;
  const double fro = frobenius_norm(m);
  if (fro == 0.0) return 0.0;

  // Fixed, non-symmetric start so results are deterministic and a start
  // orthogonal to the top singular vector is unlikely.
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1.0 / static_cast<double>(i + 2);
  double nv = norm2(v);
  for (double& e : v) e /= nv;

  constexpr int kMaxIterations = 10000;
  double lambda = 0.0;
  Vector mv(m.rows());
  Vector w(n);
  for (int it = 0; it < kMaxIterations; ++it) {
    mv = m * v;
    w = m.transpose() * mv;  // small matrices; clarity over speed
    lambda = dot(v, w);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += (w[i] - lambda * v[i]) * (w[i] - lambda * v[i]);
    res = std::sqrt(res);
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;  // v landed in the null space
    if (res <= tol * lambda) break;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput("frobenius_distance: shape mismatch");
  }
  double s = 0.0;
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) s += (ea[i] - eb[i]) * (ea[i] - eb[i]);
  return std::sqrt(s);
}

Matrix solve_spd(const Matrix& g, const Matrix& c) {
  if (!g.square()) throw InvalidInput("solve_spd: G must be square");
  if (c.rows() != g.rows()) throw InvalidInput("solve_spd: shape mismatch");
  const std::size_t n = g.rows();
  Matrix l(n, n);
  double min_pivot = std::numeric_limits<double>::infinity();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(g(i, i)));
  for (std::size_t j = 0; j < n; ++j) {
    double s = g(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    min_pivot = std::min(min_pivot, s);
    if (!(s > 1e-14 * std::max(max_diag, 1e-300))) {
      std::ostringstream os;
      os << "degenerate Gram matrix (min pivot " << s << " at column " << j << ")";
      throw DegenerateGram(os.str(), s);
    }
    const double ljj = std::sqrt(s);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = g(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / ljj;
    }
  }
  Matrix x = c;
  for (std::size_t col = 0; col < c.cols(); ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      double t = x(i, col);
      for (std::size_t k = 0; k < i; ++k) t -= l(i, k) * x(k, col);
      x(i, col) = t / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      double t = x(i, col);
      for (std::size_t k = i + 1; k < n; ++k) t -= l(k, i) * x(k, col);
      x(i, col) = t / l(i, i);
    }
  }
  return x;
}

Vector eig_sym(const Matrix& s) {
  if (!s.square()) throw InvalidInput("eig_sym: matrix must be square");
  if (!s.all_finite()) throw InvalidInput("eig_sym: non-finite entries");
  const std::size_t n = s.rows();
  double scale = 0.0;
  for (double v : s.entries()) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(s(i, j) - s(j, i)) > 1e-9 * std::max(1.0, scale)) {
        throw InvalidInput("eig_sym: matrix is not symmetric");
      }

  Matrix a = s;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off <= 1e-30 * std::max(1.0, scale * scale)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double min_eig_sym(const Matrix& s) {
  if (s.rows() == 0) throw InvalidInput("min_eig_sym: empty matrix");
  return eig_sym(s).front();
}

LuFactor::LuFactor(const Matrix& a) : n_(a.rows()), lu_(a), perm_(a.rows()) {
  if (!a.square()) throw InvalidInput("LuFactor: matrix must be square");
  for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
  double scale = 0.0;
  for (double v : a.entries()) scale = std::max(scale, std::abs(v));
  const double eps = 1e-13 * std::max(scale, 1e-300);
  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n_; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        piv = i;
      }
    }
    if (best <= eps) {
      singular_ = true;
      return;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(piv, j));
      std::swap(perm_[k], perm_[piv]);
    }
    const double inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n_; ++i) {
      const double f = lu_(i, k) * inv;
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

void LuFactor::solve(std::span<double> b) const {
  Vector x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < i; ++k) x[i] -= lu_(i, k) * x[k];
  for (std::size_t i = n_; i-- > 0;) {
    for (std::size_t k = i + 1; k < n_; ++k) x[i] -= lu_(i, k) * x[k];
    x[i] /= lu_(i, i);
  }
  std::copy(x.begin(), x.end(), b.begin());
}

void LuFactor::solve_transpose(std::span<double> b) const {
  // PA = LU  =>  Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ z = b, Lᵀ u = z, x = Pᵀ u.
  Vector z(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < i; ++k) z[i] -= lu_(k, i) * z[k];
    z[i] /= lu_(i, i);
  }
  for (std::size_t i = n_; i-- > 0;)
    for (std::size_t k = i + 1; k < n_; ++k) z[i] -= lu_(k, i) * z[k];
  for (std::size_t i = 0; i < n_; ++i) b[perm_[i]] = z[i];
}

}  // namespace advsysid
