#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stomp/matrix.hpp"
#include "stomp/pattern.hpp"
#include "stomp/sequence.hpp"
#include "stomp/structure.hpp"

namespace stomp {

/// Product direction over a window [s, t).
/// backward: A(t-1) ... A(s)  (consensus processes act this way);
/// forward:  A(s) ... A(t-1)  (Markov processes act this way).
enum class Direction { forward, backward };

struct Accumulation {
  Direction direction;
  std::size_t start;  // s
  std::size_t end;    // t
  StochasticMatrix value;
};

/// Product over [s, t) in the stated order; s == t yields the identity.
inline Accumulation accumulate(const MatrixSequence& seq, Direction dir,
                               std::size_t s, std::size_t t) {
  if (s > t || t > seq.horizon()) {
    throw std::out_of_range("accumulate: window outside horizon");
  }
  StochasticMatrix value = StochasticMatrix::identity(seq.dimension());
  for (std::size_t u = s; u < t; ++u) {
    const StochasticMatrix f = seq.at(u);
    value = dir == Direction::backward ? multiply(f, value)
                                       : multiply(value, f);
  }
  return Accumulation{dir, s, t, std::move(value)};
}

/// Cut points t0 < t1 < ... <= horizon whose windows all accumulate to
/// one common saturated pattern, plus the discarded pre-stabilization
/// cuts. Finite-horizon semantics: saturation is judged against what is
/// reachable within the horizon, and `stabilized` reports whether the
/// trailing segment patterns actually agreed before the horizon ran out.
struct Segmentation {
  Direction direction = Direction::backward;
  std::size_t horizon = 0;
  std::vector<std::size_t> cut_points;   // retained; last one == horizon
  std::vector<std::size_t> warmup_cuts;  // discarded presaturation cuts
  ZeroPattern segment_pattern{1};
  bool stabilized = false;

  std::size_t segment_count() const noexcept {
    return cut_points.size() < 2 ? 0 : cut_points.size() - 1;
  }

  /// Lengths t_{i+1} - t_i of the retained segments.
  std::vector<std::size_t> gaps() const {
    std::vector<std::size_t> g;
    for (std::size_t i = 0; i + 1 < cut_points.size(); ++i) {
      g.push_back(cut_points[i + 1] - cut_points[i]);
    }
    return g;
  }
};

namespace detail {

inline ZeroPattern window_pattern(const std::vector<ZeroPattern>& factor,
                                  Direction dir, std::size_t s,
                                  std::size_t t) {
  ZeroPattern run = factor[s];
  for (std::size_t u = s + 1; u < t; ++u) {
    run = dir == Direction::backward ? pattern_product(factor[u], run)
                                     : pattern_product(run, factor[u]);
  }
  return run;
}

}  // namespace detail

/// Two-phase segmentation of a positive-diagonal sequence.
///
/// Phase 1 walks the horizon cutting each window at the first time its
/// running accumulation pattern reaches everything the window can reach
/// (positive diagonals make the running pattern monotone, so that is
/// the last time it changes). Phase 2 keeps the maximal suffix of
/// windows sharing one pattern and discards the earlier cuts as warmup.
/// Patterns are computed in the boolean semiring over the factor
/// patterns: value products over long windows would underflow the
/// positivity threshold while the pattern algebra is exact.
inline Segmentation segment(const MatrixSequence& seq, Direction dir,
                            std::size_t horizon, double eps_pos = kEpsPos) {
  if (horizon == 0 || horizon > seq.horizon()) {
    throw std::invalid_argument("segment: horizon must be in [1, sequence horizon]");
  }
  const std::size_t n = seq.dimension();

  std::vector<ZeroPattern> factor;
  factor.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    factor.push_back(pattern_of(seq.at(t), eps_pos));
    if (!factor.back().diagonal_all_set()) {
      throw std::invalid_argument(
          "segment: sequence must have positive diagonals");
    }
  }

  const ZeroPattern full = ZeroPattern::full(n);

  // Phase 1: saturation cuts.
  std::vector<std::size_t> cuts;
  std::size_t c = 0;
  while (c < horizon) {
    ZeroPattern run = factor[c];
    std::size_t last_change = c + 1;
    for (std::size_t t = c + 2; t <= horizon; ++t) {
      if (run == full) break;  // cannot grow further
      ZeroPattern next = dir == Direction::backward
                             ? pattern_product(factor[t - 1], run)
                             : pattern_product(run, factor[t - 1]);
      if (!(next == run)) {
        run = std::move(next);
        last_change = t;
      }
    }
    cuts.push_back(last_change);
    c = last_change;
  }

  // Phase 2: trailing segments with one common pattern.
  std::vector<ZeroPattern> q;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    q.push_back(detail::window_pattern(factor, dir, cuts[i], cuts[i + 1]));
  }

  Segmentation out;
  out.direction = dir;
  out.horizon = horizon;
  if (q.empty()) {
    // Single cut at the horizon: no complete segment to compare.
    out.cut_points = cuts;
    out.segment_pattern = detail::window_pattern(factor, dir, 0, cuts[0]);
    out.stabilized = false;
    return out;
  }
  std::size_t k = q.size() - 1;
  while (k > 0 && q[k - 1] == q.back()) --k;
  out.stabilized = (q.size() - k) >= 2;
  out.segment_pattern = q.back();
  out.cut_points.assign(cuts.begin() + k, cuts.end());
  out.warmup_cuts.assign(cuts.begin(), cuts.begin() + k);
  return out;
}

/// Gantmacher form of the common segment pattern. Only meaningful once
/// the segmentation stabilized; the positive/zero block dichotomy of the
/// result can be audited with block_dichotomy_violations().
inline GantmacherForm segment_gantmacher(const Segmentation& seg) {
  if (!seg.stabilized) {
    throw std::invalid_argument(
        "segment_gantmacher: segmentation did not stabilize");
  }
  return gantmacher_form(seg.segment_pattern);
}

}  // namespace stomp
