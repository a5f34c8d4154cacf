#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stomp {

// Default tolerances. The underlying theory is exact mathematics; these
// make its invariants machine-checkable on floating point. All of them
// can be overridden per call.
inline constexpr double kEpsPos = 1e-12;       // entries <= kEpsPos count as zero
inline constexpr double kEpsRow = 1e-9;        // row-sum validation slack
inline constexpr double kEpsConsensus = 1e-9;  // equal-rows predicate

/// Dense row-stochastic matrix.
///
/// Immutable after construction. Construction validates that every
/// entry is nonnegative and finite and that each row sums to 1 within
/// eps_row. Entries are stored row-major.
class StochasticMatrix {
 public:
  StochasticMatrix(std::size_t n, std::vector<double> entries,
                   double eps_row = kEpsRow)
      : n_(n), a_(std::move(entries)) {
    if (n_ == 0) {
      throw std::invalid_argument("matrix dimension must be positive");
    }
    if (a_.size() != n_ * n_) {
      throw std::invalid_argument("entry count does not match dimension");
    }
    for (std::size_t i = 0; i < n_; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        const double v = a_[i * n_ + j];
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw std::invalid_argument("negative or non-finite entry in row " +
                                      std::to_string(i));
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > eps_row) {
        throw std::invalid_argument("row " + std::to_string(i) +
                                    " sums to " + std::to_string(sum) +
                                    ", not 1");
      }
    }
  }

  static StochasticMatrix identity(std::size_t n) {
    std::vector<double> e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
    return StochasticMatrix(n, std::move(e));
  }

  /// Convenience for literals in tests and tools.
  static StochasticMatrix from_rows(
      const std::vector<std::vector<double>>& rows,
      double eps_row = kEpsRow) {
    const std::size_t n = rows.size();
    std::vector<double> e;
    e.reserve(n * n);
    for (const auto& r : rows) {
      if (r.size() != n) {
        throw std::invalid_argument("ragged row in matrix literal");
      }
      e.insert(e.end(), r.begin(), r.end());
    }
    return StochasticMatrix(n, std::move(e), eps_row);
  }

  std::size_t size() const noexcept { return n_; }

  /// Unchecked element access.
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * n_ + j];
  }

  const std::vector<double>& entries() const noexcept { return a_; }

  bool has_positive_diagonal(double eps_pos = kEpsPos) const noexcept {
    for (std::size_t i = 0; i < n_; ++i) {
      if (a_[i * n_ + i] <= eps_pos) return false;
    }
    return true;
  }

  friend bool operator==(const StochasticMatrix& a,
                         const StochasticMatrix& b) {
    return a.n_ == b.n_ && a.a_ == b.a_;
  }

 private:
  std::size_t n_;
  std::vector<double> a_;
};

/// Exact product followed by per-row renormalization. Renormalizing
/// keeps the row-sum invariant machine-true over products thousands of
/// factors long.
inline StochasticMatrix multiply(const StochasticMatrix& a,
                                 const StochasticMatrix& b) {
  const std::size_t n = a.size();
  if (n != b.size()) {
    throw std::invalid_argument("multiply: dimension mismatch");
  }
  std::vector<double> c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        c[i * n + j] += aik * b(k, j);
      }
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += c[i * n + j];
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] /= sum;
  }
  return StochasticMatrix(n, std::move(c));
}

/// Matrix times column vector (consensus direction).
inline std::vector<double> apply(const StochasticMatrix& a,
                                 const std::vector<double>& x) {
  const std::size_t n = a.size();
  if (x.size() != n) {
    throw std::invalid_argument("apply: dimension mismatch");
  }
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

/// Row vector times matrix (Markov direction).
inline std::vector<double> row_apply(const std::vector<double>& p,
                                     const StochasticMatrix& a) {
  const std::size_t n = a.size();
  if (p.size() != n) {
    throw std::invalid_argument("row_apply: dimension mismatch");
  }
  std::vector<double> q(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = p[i];
    if (pi == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) q[j] += pi * a(i, j);
  }
  return q;
}

namespace detail {

// tau over an index subset: max over ordered row pairs of the one-sided
// difference sum. Algebraically equal to 1 - min_{i,j} sum_k min(a_ik,
// a_jk) when rows sum to exactly 1, but evaluates to exactly zero on
// bitwise-equal rows, which the rank-1 predicate needs.
inline double one_sided_tau(const StochasticMatrix& a,
                            const std::vector<std::size_t>& idx) {
  double worst = 0.0;
  for (std::size_t ii = 0; ii < idx.size(); ++ii) {
    for (std::size_t jj = 0; jj < idx.size(); ++jj) {
      if (ii == jj) continue;
      double s = 0.0;
      for (std::size_t kk = 0; kk < idx.size(); ++kk) {
        const double d = a(idx[ii], idx[kk]) - a(idx[jj], idx[kk]);
        if (d > 0.0) s += d;
      }
      worst = std::max(worst, s);
    }
  }
  return std::min(worst, 1.0);
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace detail

/// Coefficient of ergodicity tau(A) = 1 - min_{i,j} sum_k min(a_ik, a_jk).
/// Zero exactly when all rows are equal; 1 when two rows have disjoint
/// supports.
inline double ergodicity_coefficient(const StochasticMatrix& a) {
  return detail::one_sided_tau(a, detail::all_indices(a.size()));
}

/// tau of the [idx, idx] sub-block. Meaningful for blocks that are
/// (approximately) row-stochastic, i.e. classes closed under the
/// positivity pattern.
inline double block_ergodicity_coefficient(
    const StochasticMatrix& a, const std::vector<std::size_t>& idx) {
  for (std::size_t i : idx) {
    if (i >= a.size()) throw std::out_of_range("block index out of range");
  }
  return detail::one_sided_tau(a, idx);
}

/// Smallest entry exceeding eps_pos (the positive minimum).
inline double min_plus(const StochasticMatrix& a, double eps_pos = kEpsPos) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = a(i, j);
      if (v > eps_pos && v < best) best = v;
    }
  }
  if (!std::isfinite(best)) {
    // Unreachable for validated matrices: every row carries an entry >= 1/n.
    throw std::logic_error("min_plus: matrix has no positive entry");
  }
  return best;
}

/// Row-sum norm of the [rows, cols] block: max over the selected rows of
/// the sum of absolute entries in the selected columns.
inline double block_row_sum_norm(const StochasticMatrix& a,
                                 const std::vector<std::size_t>& rows,
                                 const std::vector<std::size_t>& cols) {
  if (rows.empty() || cols.empty()) {
    throw std::invalid_argument("block_row_sum_norm: empty index set");
  }
  for (std::size_t i : rows) {
    if (i >= a.size()) throw std::out_of_range("row index out of range");
  }
  for (std::size_t j : cols) {
    if (j >= a.size()) throw std::out_of_range("column index out of range");
  }
  double worst = 0.0;
  for (std::size_t i : rows) {
    double s = 0.0;
    for (std::size_t j : cols) s += std::abs(a(i, j));
    worst = std::max(worst, s);
  }
  return worst;
}

/// Per-column (min, max) pairs.
inline std::vector<std::pair<double, double>> column_extrema(
    const StochasticMatrix& a) {
  const std::size_t n = a.size();
  std::vector<std::pair<double, double>> out(
      n, {std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = a(i, j);
      out[j].first = std::min(out[j].first, v);
      out[j].second = std::max(out[j].second, v);
    }
  }
  return out;
}

/// Max over columns of (column max - column min); equals the maximal
/// pairwise L-infinity distance between rows.
inline double max_row_distance(const StochasticMatrix& a) {
  double worst = 0.0;
  for (const auto& [lo, hi] : column_extrema(a)) {
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

/// Same, restricted to the [idx, idx] block.
inline double block_row_distance(const StochasticMatrix& a,
                                 const std::vector<std::size_t>& idx) {
  double worst = 0.0;
  for (std::size_t j : idx) {
    if (j >= a.size()) throw std::out_of_range("block index out of range");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i : idx) {
      const double v = a(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

/// Rank-1 predicate: all rows pairwise equal within eps.
inline bool is_consensus_matrix(const StochasticMatrix& a,
                                double eps = kEpsConsensus) {
  return max_row_distance(a) <= eps;
}

/// The [idx, idx] sub-block as a row-stochastic matrix of its own.
/// Requires the row mass outside idx to be below leak_tol; rows are
/// renormalized to absorb that leakage.
inline StochasticMatrix restrict_to(const StochasticMatrix& a,
                                    const std::vector<std::size_t>& idx,
                                    double leak_tol = 1e-6) {
  if (idx.empty()) throw std::invalid_argument("restrict_to: empty index set");
  const std::size_t m = idx.size();
  std::vector<double> e(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (idx[i] >= a.size()) throw std::out_of_range("index out of range");
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      e[i * m + j] = a(idx[i], idx[j]);
      sum += e[i * m + j];
    }
    if (std::abs(sum - 1.0) > leak_tol) {
      throw std::invalid_argument(
          "restrict_to: index set is not closed (row mass escapes)");
    }
    for (std::size_t j = 0; j < m; ++j) e[i * m + j] /= sum;
  }
  return StochasticMatrix(m, std::move(e));
}

/// Simultaneous row/column permutation: result(i, j) = a(perm[i], perm[j]).
inline StochasticMatrix permuted(const StochasticMatrix& a,
                                 const std::vector<std::size_t>& perm) {
  const std::size_t n = a.size();
  if (perm.size() != n) {
    throw std::invalid_argument("permuted: permutation size mismatch");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) throw std::invalid_argument("invalid permutation");
    seen[p] = true;
  }
  std::vector<double> e(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) e[i * n + j] = a(perm[i], perm[j]);
  }
  return StochasticMatrix(n, std::move(e));
}

}  // namespace stomp
