#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace hcurl {

using Vector = std::vector<double>;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when CG fails; carries the last relative residual it reached.
struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double residual, std::size_t iterations)
      : std::runtime_error(what), achieved_residual(residual), iterations(iterations) {}
  double achieved_residual;
  std::size_t iterations;
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /**
   * Duplicates are summed. Triplets are sorted by (row, col, value) before
   * summation, so the result is bitwise independent of input order.
   */
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> entries) {
    for (const auto& t : entries) {
      if (t.row >= rows || t.col >= cols) throw DimensionError("triplet index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col, a.value) < std::tie(b.row, b.col, b.value);
    });
    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(rows + 1, 0);
    for (std::size_t i = 0; i < entries.size();) {
      const std::size_t r = entries[i].row, c = entries[i].col;
      double sum = 0.0;
      for (; i < entries.size() && entries[i].row == r && entries[i].col == c; ++i) {
        sum += entries[i].value;
      }
      m.col_idx_.push_back(c);
      m.values_.push_back(sum);
      ++m.row_ptr_[r + 1];
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
  }

  static SparseMatrix identity(std::size_t n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return from_triplets(n, n, std::move(t));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  /// Stored entry (r, c), or 0 if not in the pattern.
  double operator()(std::size_t r, std::size_t c) const {
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(r));
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(r + 1));
    const auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c) return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
  }

  Vector diagonal() const {
    Vector d(std::min(rows_, cols_), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i);
    return d;
  }

  void multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != cols_ || y.size() != rows_) throw DimensionError("spmv dimension mismatch");
    for (std::size_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
      y[r] = s;
    }
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

inline Vector spmv(const SparseMatrix& a, std::span<const double> x) {
  Vector y(a.rows());
  a.multiply(x, y);
  return y;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct CgResult {
  Vector x;
  std::size_t iterations = 0;
  /// ||b - A x|| / ||b|| evaluated from the returned x.
  double residual = 0.0;
  double backward_error = 0.0;
};

/// max_i |r_i| / (|A| |x| + |b|)_i, zero where the denominator vanishes.
inline double componentwise_backward_error(const SparseMatrix& a, std::span<const double> x,
                                           std::span<const double> b, std::span<const double> r) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = std::abs(b[i]);
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      s += std::abs(a.values()[k] * x[a.col_idx()[k]]);
    }
    if (s > 0.0) worst = std::max(worst, std::abs(r[i]) / s);
  }
  return worst;
}

/**
 * Jacobi-preconditioned conjugate gradients for SPD systems.
 *
 * Convergence is declared on the true residual ||b - Ax|| <= rel_tol ||b||;
 * when the recursively updated residual reaches the tolerance first, the
 * iteration restarts from the true residual. With backward_tol > 0 such a
 * check also succeeds once the componentwise backward error is at most
 * backward_tol, for systems whose rounding floor lies above rel_tol.
 */
inline CgResult cg_solve(const SparseMatrix& a, std::span<const double> b, double rel_tol,
                         std::size_t max_iter, double backward_tol = 0.0) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw DimensionError("cg_solve dimension mismatch");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("cg_solve tolerance must be positive");

  const Vector diag = a.diagonal();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(diag[i] > 0.0)) {
      throw SolverError("non-positive diagonal entry at row " + std::to_string(i), 0.0, 0);
    }
  }

  CgResult out;
  out.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return out;
  const double target = rel_tol * bnorm;

  Vector r(b.begin(), b.end()), z(n), p(n), q(n);
  std::size_t it = 0;
  double rnorm = bnorm;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = dot(r, z);
    while (rnorm > target && it < max_iter) {
      a.multiply(p, q);
      const double alpha = rz / dot(p, q);
      for (std::size_t i = 0; i < n; ++i) {
        out.x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      rnorm = norm2(r);
      ++it;
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    a.multiply(out.x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    rnorm = norm2(r);
    out.iterations = it;
    out.residual = rnorm / bnorm;
    out.backward_error = componentwise_backward_error(a, out.x, b, r);
    if (rnorm <= target || out.backward_error <= backward_tol) return out;
    if (it >= max_iter) {
      throw SolverError("CG did not converge within " + std::to_string(max_iter) + " iterations",
                        out.residual, it);
    }
  }
}

}  // namespace hcurl
