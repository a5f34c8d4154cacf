#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stomp/matrix.hpp"

namespace stomp {

/// Boolean positivity pattern of an n-by-n matrix (its "type").
///
/// Bit (i, j) is true iff the source entry is counted positive, i.e.
/// exceeds the eps_pos threshold. Rows are stored as 64-bit words so
/// that boolean-semiring products over long windows stay cheap.
class ZeroPattern {
 public:
  explicit ZeroPattern(std::size_t n)
      : n_(n), w_((n + 63) / 64), bits_(n * w_, 0) {
    if (n == 0) throw std::invalid_argument("pattern dimension must be positive");
  }

  static ZeroPattern identity(std::size_t n) {
    ZeroPattern p(n);
    for (std::size_t i = 0; i < n; ++i) p.set(i, i);
    return p;
  }

  static ZeroPattern full(std::size_t n) {
    ZeroPattern p(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t w = 0; w < p.w_; ++w) {
        p.bits_[i * p.w_ + w] = ~0ull;
      }
      p.mask_row_tail(i);
    }
    return p;
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t words_per_row() const noexcept { return w_; }
  const std::uint64_t* row(std::size_t i) const { return bits_.data() + i * w_; }

  bool test(std::size_t i, std::size_t j) const {
    return (bits_[i * w_ + (j >> 6)] >> (j & 63)) & 1ull;
  }

  void set(std::size_t i, std::size_t j) {
    bits_[i * w_ + (j >> 6)] |= 1ull << (j & 63);
  }

  friend bool operator==(const ZeroPattern&, const ZeroPattern&) = default;

  ZeroPattern transposed() const {
    ZeroPattern t(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (test(i, j)) t.set(j, i);
      }
    }
    return t;
  }

  /// Elementwise OR.
  ZeroPattern united(const ZeroPattern& o) const {
    require_same_dim(o);
    ZeroPattern u(n_);
    for (std::size_t k = 0; k < bits_.size(); ++k) {
      u.bits_[k] = bits_[k] | o.bits_[k];
    }
    return u;
  }

  /// Elementwise superset test: every bit of o is set here too.
  bool contains(const ZeroPattern& o) const {
    require_same_dim(o);
    for (std::size_t k = 0; k < bits_.size(); ++k) {
      if (o.bits_[k] & ~bits_[k]) return false;
    }
    return true;
  }

  bool diagonal_all_set() const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (!test(i, i)) return false;
    }
    return true;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : bits_) c += std::popcount(w);
    return c;
  }

  bool all_set() const { return count() == n_ * n_; }

  friend ZeroPattern pattern_product(const ZeroPattern& p,
                                     const ZeroPattern& q);

 private:
  void require_same_dim(const ZeroPattern& o) const {
    if (n_ != o.n_) throw std::invalid_argument("pattern dimension mismatch");
  }

  void mask_row_tail(std::size_t i) {
    const std::size_t used = n_ & 63;
    if (used != 0) {
      bits_[i * w_ + (w_ - 1)] &= (1ull << used) - 1;
    }
  }

  std::size_t n_, w_;
  std::vector<std::uint64_t> bits_;
};

/// Positivity pattern of a matrix: bit (i, j) iff a(i, j) > eps_pos.
inline ZeroPattern pattern_of(const StochasticMatrix& a,
                              double eps_pos = kEpsPos) {
  const std::size_t n = a.size();
  ZeroPattern p(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j) > eps_pos) p.set(i, j);
    }
  }
  return p;
}

/// Boolean-semiring product: bit (i, j) iff some k has p(i, k) and q(k, j).
/// Mirrors how positivity propagates through matrix products.
inline ZeroPattern pattern_product(const ZeroPattern& p,
                                   const ZeroPattern& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("pattern_product: dimension mismatch");
  }
  const std::size_t n = p.size();
  const std::size_t w = p.words_per_row();
  ZeroPattern r(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t* out = r.bits_.data() + i * w;
    for (std::size_t wk = 0; wk < w; ++wk) {
      std::uint64_t word = p.row(i)[wk];
      while (word != 0) {
        const std::size_t k = wk * 64 + std::countr_zero(word);
        word &= word - 1;
        const std::uint64_t* qk = q.row(k);
        for (std::size_t m = 0; m < w; ++m) out[m] |= qk[m];
      }
    }
  }
  return r;
}

}  // namespace stomp
