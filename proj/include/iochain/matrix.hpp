#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iochain/error.hpp"

namespace iochain {

using Vector = std::vector<double>;

/**
 * Dense real matrix, row-major.
 *
 * Dimensions are at least 1x1 and every entry is finite; both are checked
 * at construction so downstream kernels never see NaN or an empty shape.
 */
class Matrix {
public:
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    check_shape();
    check_finite();
  }

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    check_shape();
    if (data_.size() != rows_ * cols_)
      throw DimensionMismatch("matrix entry count " + std::to_string(data_.size()) +
                              " does not match " + std::to_string(rows_) + "x" +
                              std::to_string(cols_));
    check_finite();
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows) : rows_(rows.size()), cols_(0) {
    if (rows_ > 0) cols_ = rows.begin()->size();
    check_shape();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw DimensionMismatch("ragged matrix literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
    check_finite();
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> entries() const noexcept { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Vector row_sums() const {
    Vector s(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) s[i] += (*this)(i, j);
    return s;
  }

  Vector col_sums() const {
    Vector s(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) s[j] += (*this)(i, j);
    return s;
  }

  bool is_nonnegative() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v >= 0.0; });
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  void check_shape() const {
    if (rows_ == 0 || cols_ == 0) throw DimensionMismatch("matrix dimensions must be at least 1x1");
  }
  void check_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) throw InputError("matrix entries must be finite");
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatch("cannot multiply " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " by " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector size mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

// Row vector times matrix: x^T * a.
inline Vector left_multiply(std::span<const double> x, const Matrix& a) {
  if (a.rows() != x.size()) throw DimensionMismatch("vector-matrix size mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += x[i] * a(i, j);
  return y;
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix sum shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("matrix difference shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("shape mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k)
    worst = std::max(worst, std::abs(a.entries()[k] - b.entries()[k]));
  return worst;
}

/// Entrywise product.
inline Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("hadamard product requires matching dimensions");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= b(i, j);
  return c;
}

// Pivots smaller than this fraction of the column's largest original entry
// are treated as zero.
inline constexpr double kPivotRelativeThreshold = 1e-12;

/**
 * Inverse by LU factorisation with partial pivoting.
 *
 * Throws SingularMatrix when a pivot falls below kPivotRelativeThreshold
 * times the largest magnitude originally present in that column. For the
 * Leontief systems here that means the economy is not productive.
 */
inline Matrix lu_invert(const Matrix& m) {
  if (!m.is_square()) throw DimensionMismatch("lu_invert requires a square matrix");
  const std::size_t n = m.rows();

  Vector col_scale(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) col_scale[j] = std::max(col_scale[j], std::abs(m(i, j)));

  Matrix lu = m;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot_row = k;
    double pivot_mag = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > pivot_mag) {
        pivot_mag = std::abs(lu(i, k));
        pivot_row = i;
      }
    }
    if (pivot_mag == 0.0 || pivot_mag < kPivotRelativeThreshold * col_scale[k])
      throw SingularMatrix("matrix is singular to working precision (pivot " +
                           std::to_string(pivot_mag) + " in column " + std::to_string(k) + ")");
    if (pivot_row != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(pivot_row, j));
      std::swap(perm[k], perm[pivot_row]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = lu(i, k) / lu(k, k);
      lu(i, k) = factor;
      if (factor == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= factor * lu(k, j);
    }
  }

  // Solve L U x = P e_c for each unit column.
  Matrix inv(n, n);
  Vector x(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) x[i] = perm[i] == c ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
      x[i] /= lu(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, c) = x[i];
  }
  return inv;
}

/// I + m + m^2 + ... + m^k by repeated multiplication.
inline Matrix neumann_partial_sum(const Matrix& m, std::size_t k) {
  if (!m.is_square()) throw DimensionMismatch("neumann_partial_sum requires a square matrix");
  Matrix sum = Matrix::identity(m.rows());
  Matrix power = Matrix::identity(m.rows());
  for (std::size_t step = 0; step < k; ++step) {
    power = power * m;
    sum = sum + power;
  }
  return sum;
}

struct PerronResult {
  double root = 0.0;
  Vector vector;  // nonnegative, unit 1-norm
  std::size_t iterations = 0;
  double residual = 0.0;  // max-norm of M v - root v
};

struct PerronOptions {
  double tol = 1e-12;
  std::size_t max_iter = 10000;
};

namespace detail {

inline double residual_max_norm(const Matrix& m, const Vector& v, double root) {
  const Vector mv = m * v;
  double r = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) r = std::max(r, std::abs(mv[i] - root * v[i]));
  return r;
}

// One phase of power iteration on (m + shift I), starting from v.
// Returns true on convergence; v/root/residual hold the last iterate.
inline bool power_phase(const Matrix& m, double shift, std::size_t budget, double tol, Vector& v,
                        double& root, double& residual, std::size_t& iterations) {
  const std::size_t n = m.rows();
  double previous = -1.0;
  for (std::size_t it = 0; it < budget; ++it) {
    ++iterations;
    Vector w = m * v;
    for (std::size_t i = 0; i < n; ++i) w[i] += shift * v[i];
    const double norm = std::accumulate(w.begin(), w.end(), 0.0);
    if (norm == 0.0) {
      // m v = 0 for a nonnegative v: v is an eigenvector for 0.
      root = 0.0;
      residual = residual_max_norm(m, v, 0.0);
      return residual <= tol;
    }
    root = norm - shift;  // ||v||_1 = 1 and everything is nonnegative
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    if (std::abs(root - previous) < tol) {
      residual = residual_max_norm(m, v, root);
      if (residual <= tol) return true;
    }
    previous = root;
  }
  residual = residual_max_norm(m, v, root);
  return false;
}

}  // namespace detail

/**
 * Perron root of a nonnegative square matrix by power iteration.
 *
 * Starts from the uniform vector 1/n. A plain iteration is tried first
 * (exact on nilpotent and rank-one inputs); if it stalls within half the
 * budget, iteration restarts on m + I, which shares the Perron vector and
 * has no peripheral spectrum other than rho + 1, so periodic matrices
 * converge too.
 */
inline PerronResult perron_root(const Matrix& m, PerronOptions opts = {}) {
  if (!m.is_square()) throw DimensionMismatch("perron_root requires a square matrix");
  if (!m.is_nonnegative()) throw InputError("perron_root requires a nonnegative matrix");
  const std::size_t n = m.rows();

  PerronResult out;
  const std::size_t first_budget = std::max<std::size_t>(1, opts.max_iter / 2);
  out.vector.assign(n, 1.0 / static_cast<double>(n));
  if (detail::power_phase(m, 0.0, first_budget, opts.tol, out.vector, out.root, out.residual,
                          out.iterations))
    return out;

  out.vector.assign(n, 1.0 / static_cast<double>(n));
  const std::size_t rest = opts.max_iter > out.iterations ? opts.max_iter - out.iterations : 1;
  if (detail::power_phase(m, 1.0, rest, opts.tol, out.vector, out.root, out.residual,
                          out.iterations))
    return out;

  throw NoConvergence("power iteration did not converge after " + std::to_string(out.iterations) +
                          " iterations (last estimate " + std::to_string(out.root) + ")",
                      out.root, out.residual);
}

enum class StochasticKind { stochastic, substochastic, neither };
enum class Axis { rows, cols };

struct StochasticityClass {
  StochasticKind kind = StochasticKind::neither;
  double tolerance = 1e-9;
  std::size_t clamped = 0;  // entries in [-tol, 0) treated as exact zeros

  bool is_substochastic() const noexcept { return kind != StochasticKind::neither; }
};

/**
 * Classifies a nonnegative matrix by its row or column sums.
 *
 * Entries in [-tol, 0) count as zero and are reported through `clamped`;
 * anything more negative is rejected.
 */
inline StochasticityClass classify_stochasticity(const Matrix& m, double tol = 1e-9,
                                                 Axis axis = Axis::rows) {
  StochasticityClass out;
  out.tolerance = tol;
  const std::size_t len = axis == Axis::rows ? m.rows() : m.cols();
  Vector sums(len, 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double v = m(i, j);
      if (v < 0.0) {
        if (v < -tol)
          throw ValidationError("negative entry " + std::to_string(v) + " at (" + std::to_string(i) +
                                "," + std::to_string(j) + ")");
        ++out.clamped;
        v = 0.0;
      }
      sums[axis == Axis::rows ? i : j] += v;
    }
  const bool sub = std::all_of(sums.begin(), sums.end(), [&](double s) { return s <= 1.0 + tol; });
  const bool full =
      std::all_of(sums.begin(), sums.end(), [&](double s) { return std::abs(s - 1.0) <= tol; });
  out.kind = full ? StochasticKind::stochastic
             : sub ? StochasticKind::substochastic
                   : StochasticKind::neither;
  return out;
}

inline const char* to_string(StochasticKind k) {
  switch (k) {
    case StochasticKind::stochastic: return "stochastic";
    case StochasticKind::substochastic: return "substochastic";
    case StochasticKind::neither: return "neither";
  }
  return "neither";
}

}  // namespace iochain
