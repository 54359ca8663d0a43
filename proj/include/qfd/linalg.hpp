#pragma once

// Dense complex linear algebra for small quantum operators and statevectors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qfd/errors.hpp"

namespace qfd {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 12;
inline constexpr std::size_t kMaxDim = std::size_t{1} << kMaxQubits;

class CVector {
 public:
  CVector() = default;
  explicit CVector(std::size_t dim) : data_(dim) {}
  CVector(std::initializer_list<Complex> xs) : data_(xs) {}
  explicit CVector(std::vector<Complex> xs) : data_(std::move(xs)) {}

  // |index> in a space of dimension dim.
  static CVector basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw IndexError("basis index " + std::to_string(index) + " >= " + std::to_string(dim));
    CVector v(dim);
    v[index] = 1.0;
    return v;
  }

  std::size_t size() const noexcept { return data_.size(); }
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }
  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }
  std::span<const Complex> span() const noexcept { return data_; }
  std::span<Complex> span() noexcept { return data_; }
  const std::vector<Complex>& values() const noexcept { return data_; }

  double norm() const {
    double s = 0;
    for (const auto& x : data_) s += std::norm(x);
    return std::sqrt(s);
  }

  CVector normalized() const {
    const double n = norm();
    if (n == 0) throw DimensionError("cannot normalize the zero vector");
    CVector out(*this);
    for (auto& x : out.data_) x /= n;
    return out;
  }

  CVector& operator+=(const CVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  CVector& operator-=(const CVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  CVector& operator*=(Complex a) {
    for (auto& x : data_) x *= a;
    return *this;
  }

  friend CVector operator+(CVector a, const CVector& b) { return a += b; }
  friend CVector operator-(CVector a, const CVector& b) { return a -= b; }
  friend CVector operator*(Complex a, CVector v) { return v *= a; }
  friend bool operator==(const CVector&, const CVector&) = default;

 private:
  void check_same(const CVector& o) const {
    if (o.size() != size())
      throw DimensionError("vector size mismatch: " + std::to_string(size()) + " vs " + std::to_string(o.size()));
  }
  std::vector<Complex> data_;
};

// Row-major dense complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static CMatrix diagonal(std::span<const Complex> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static CMatrix diagonal(std::initializer_list<Complex> d) {
    return diagonal(std::span<const Complex>(d.begin(), d.size()));
  }
  // |u><v|
  static CMatrix outer(const CVector& u, const CVector& v) {
    CMatrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * std::conj(v[j]);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const Complex> values() const noexcept { return data_; }

  CVector column(std::size_t c) const {
    CVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  CMatrix& operator+=(const CMatrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  CMatrix& operator*=(Complex a) {
    for (auto& x : data_) x *= a;
    return *this;
  }
  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(Complex a, CMatrix m) { return m *= a; }
  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  void check_same(const CMatrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionError("matrix shape mismatch");
  }
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

inline CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  CMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline CVector matvec(const CMatrix& a, const CVector& x) {
  if (a.cols() != x.size()) throw DimensionError("matvec: matrix has " + std::to_string(a.cols()) +
                                                 " columns, vector has " + std::to_string(x.size()) + " entries");
  CVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s{};
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

inline CMatrix adjoint(const CMatrix& a) {
  CMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

// Kronecker product: (a (x) b)[i*rb + k, j*cb + l] = a[i,j] * b[k,l].
inline CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  const std::size_t rb = b.rows(), cb = b.cols();
  if (a.rows() * rb > kMaxDim || a.cols() * cb > kMaxDim) throw DimensionError("tensor product exceeds 2^12");
  CMatrix out(a.rows() * rb, a.cols() * cb);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < cb; ++l) out(i * rb + k, j * cb + l) = aij * b(k, l);
    }
  return out;
}

inline Complex inner(const CVector& u, const CVector& v) {
  if (u.size() != v.size())
    throw DimensionError("inner: sizes " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  Complex s{};
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

// Largest entrywise modulus of a - b.
inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_diff: shape mismatch");
  double m = 0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

inline double max_abs_diff(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw DimensionError("max_abs_diff: size mismatch");
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool is_unitary(const CMatrix& a, double tol = 1e-10) {
  if (!a.square()) return false;
  return max_abs_diff(matmul(adjoint(a), a), CMatrix::identity(a.rows())) <= tol;
}

inline bool is_hermitian(const CMatrix& a, double tol = 1e-10) {
  return a.square() && max_abs_diff(a, adjoint(a)) <= tol;
}

// Maps an angle into (-pi, pi].
inline double wrap_phase(double theta) {
  constexpr double pi = std::numbers::pi;
  double t = std::remainder(theta, 2 * pi);
  if (t <= -pi) t += 2 * pi;
  return t;
}

// Distance between two angles on the circle.
inline double phase_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

struct EigenPair {
  double phase = 0;  // theta in (-pi, pi]
  Complex value;     // exp(-i theta)
  CVector vector;
};

struct HermitianEigen {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns
};

namespace detail {

// Rotates the global phase of v so that its last significant component is real and positive.
inline void canonicalize_phase(CVector& v) {
  double biggest = 0;
  for (const auto& x : v) biggest = std::max(biggest, std::abs(x));
  if (biggest == 0) return;
  for (std::size_t i = v.size(); i-- > 0;) {
    if (std::abs(v[i]) > 1e-8 * biggest) {
      const Complex rot = std::conj(v[i]) / std::abs(v[i]);
      v *= rot;
      v[i] = std::abs(v[i]);
      return;
    }
  }
}

}  // namespace detail

// Cyclic complex Jacobi. Eigenvalues ascending; eigenvectors in columns.
inline HermitianEigen eig_hermitian(CMatrix a, std::size_t max_sweeps = 100) {
  if (!a.square()) throw DimensionError("eig_hermitian: matrix not square");
  const std::size_t n = a.rows();
  CMatrix v = CMatrix::identity(n);

  double scale = 0;
  for (const auto& x : a.values()) scale += std::norm(x);
  scale = std::max(scale, 1e-300);

  std::size_t sweep = 0;
  for (;; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (off <= 1e-30 * scale) break;
    if (sweep == max_sweeps) throw ConvergenceError("Jacobi eigensolver did not converge", sweep);

    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r <= 1e-300) continue;
        const Complex ph = std::conj(apq / r);  // e^{-i phi}
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = (aqq - app) / (2 * r);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(1 + t * t);
        const double s = t * c;
        // J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q); A <- J^H A J, V <- V J.
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * ph * akq;
          a(k, q) = s * akp + c * ph * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * std::conj(ph) * aqk;
          a(q, k) = s * apk + c * std::conj(ph) * aqk;
        }
        a(p, q) = a(q, p) = 0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * ph * vkq;
          v(k, q) = s * vkp + c * ph * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermitianEigen out{std::vector<double>(n), CMatrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]).real();
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

// Full spectral decomposition of a unitary matrix, phases sorted ascending.
//
// The Hermitian parts A = (S + S^H)/2 and B = (S - S^H)/2i commute, so A is
// diagonalized first and B is then diagonalized inside each eigenspace of A.
// Eigenvalues of A within cluster_tol are treated as one eigenspace.
inline std::vector<EigenPair> eig_unitary(const CMatrix& s, double tol = 1e-9, double cluster_tol = 1e-8) {
  if (!s.square()) throw DimensionError("eig_unitary: matrix not square");
  if (s.rows() > kMaxDim) throw DimensionError("eig_unitary: dimension exceeds 2^12");
  if (!is_unitary(s, tol)) throw NotUnitaryError("eig_unitary: input is not unitary within tolerance");
  const std::size_t n = s.rows();
  const CMatrix sh = adjoint(s);
  const CMatrix herm_a = 0.5 * (s + sh);
  const CMatrix herm_b = Complex(0, -0.5) * (s - sh);

  const HermitianEigen ea = eig_hermitian(herm_a);
  std::vector<CVector> vecs;
  vecs.reserve(n);
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo + 1;
    while (hi < n && ea.values[hi] - ea.values[hi - 1] <= cluster_tol) ++hi;
    const std::size_t m = hi - lo;
    if (m == 1) {
      vecs.push_back(ea.vectors.column(lo));
    } else {
      CMatrix basis(n, m);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < m; ++j) basis(k, j) = ea.vectors(k, lo + j);
      const HermitianEigen eb = eig_hermitian(matmul(adjoint(basis), matmul(herm_b, basis)));
      const CMatrix rotated = matmul(basis, eb.vectors);
      for (std::size_t j = 0; j < m; ++j) vecs.push_back(rotated.column(j));
    }
    lo = hi;
  }

  std::vector<EigenPair> pairs;
  pairs.reserve(n);
  for (auto& v : vecs) {
    detail::canonicalize_phase(v);
    const Complex lambda = inner(v, matvec(s, v));
    double phase = wrap_phase(-std::arg(lambda));
    if (phase < -std::numbers::pi + 1e-12) phase = std::numbers::pi;
    const Complex value = std::polar(1.0, -phase);
    const double residual = (matvec(s, v) - value * v).norm();
    if (residual > tol)
      throw ConvergenceError("eig_unitary: residual " + std::to_string(residual) + " exceeds tolerance", 0);
    pairs.push_back(EigenPair{phase, value, std::move(v)});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& x, const EigenPair& y) { return x.phase < y.phase; });
  return pairs;
}

}  // namespace qfd
