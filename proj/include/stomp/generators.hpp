#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stomp/analysis.hpp"
#include "stomp/matrix.hpp"
#include "stomp/pattern.hpp"
#include "stomp/rng.hpp"
#include "stomp/sequence.hpp"

namespace stomp {

/// Seeded, replayable sequence generators covering the hypothesis
/// regimes and their boundary violations.
struct GeneratorSpec {
  enum class Kind {
    random_positive_diagonal,  // random off-diagonal support per step
    type_symmetric,            // support symmetric: (i,j) iff (j,i)
    pattern_scheduled,         // support cycles through given patterns
    constant,                  // A(t) = fixed matrix
    adversarial_gap,           // identity except at schedule-driven events
  };

  Kind kind = Kind::random_positive_diagonal;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  /// Every positive entry of an emitted matrix is >= delta_floor.
  double delta_floor = 1e-3;
  /// Off-diagonal inclusion probability for the random kinds.
  double density = 0.5;

  std::optional<StochasticMatrix> matrix;   // constant kind
  std::vector<ZeroPattern> patterns;        // pattern_scheduled kind
  std::optional<ZeroPattern> base_pattern;  // adversarial event support
  std::optional<GapSchedule> schedule;      // adversarial_gap kind
};

namespace detail {

// Row with the given support: every support entry gets the floor, the
// remaining mass is split by normalized uniform draws. min+ >= floor holds
// exactly; the remainder is nonnegative by the feasibility check.
inline void fill_row(std::vector<double>& row, std::size_t n, std::size_t i,
                     const std::vector<std::size_t>& support, double floor,
                     Rng& rng) {
  const double rest = 1.0 - floor * static_cast<double>(support.size());
  std::vector<double> u(support.size());
  double usum = 0.0;
  for (double& v : u) {
    v = rng.uniform();
    usum += v;
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const double v = floor + rest * (usum > 0.0 ? u[k] / usum : 0.0);
    row[i * n + support[k]] = v;
    acc += v;
  }
  // Nudge the diagonal so the row sums to 1 to the last ulp.
  row[i * n + i] += 1.0 - acc;
}

inline std::size_t max_row_support(const ZeroPattern& p) {
  std::size_t worst = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < p.size(); ++j) c += p.test(i, j) ? 1 : 0;
    worst = std::max(worst, c);
  }
  return worst;
}

}  // namespace detail

/// Validates a spec against its kind's feasibility constraints.
/// delta_floor must leave room for a full row: floor * support <= 1,
/// where support is n for the random kinds and the widest pattern row
/// for the pattern-driven kinds.
inline void validate_spec(const GeneratorSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("generator dimension must be positive");
  if (!(spec.delta_floor > 0.0 && spec.delta_floor < 1.0)) {
    throw std::invalid_argument("delta_floor must be in (0, 1)");
  }
  const double df = spec.delta_floor;
  switch (spec.kind) {
    case GeneratorSpec::Kind::random_positive_diagonal:
    case GeneratorSpec::Kind::type_symmetric:
      if (df * static_cast<double>(spec.n) > 1.0) {
        throw std::invalid_argument(
            "infeasible spec: delta_floor * n exceeds 1");
      }
      if (!(spec.density >= 0.0 && spec.density <= 1.0)) {
        throw std::invalid_argument("density must be in [0, 1]");
      }
      break;
    case GeneratorSpec::Kind::pattern_scheduled: {
      if (spec.patterns.empty()) {
        throw std::invalid_argument("pattern_scheduled needs patterns");
      }
      for (const auto& p : spec.patterns) {
        if (p.size() != spec.n) {
          throw std::invalid_argument("pattern dimension mismatch");
        }
        if (!p.diagonal_all_set()) {
          throw std::invalid_argument(
              "scheduled patterns must have positive diagonals");
        }
        if (df * static_cast<double>(detail::max_row_support(p)) > 1.0) {
          throw std::invalid_argument(
              "infeasible spec: delta_floor exceeds a pattern row budget");
        }
      }
      break;
    }
    case GeneratorSpec::Kind::constant:
      if (!spec.matrix) throw std::invalid_argument("constant kind needs a matrix");
      if (spec.matrix->size() != spec.n) {
        throw std::invalid_argument("constant matrix dimension mismatch");
      }
      break;
    case GeneratorSpec::Kind::adversarial_gap: {
      if (!spec.schedule) {
        throw std::invalid_argument("adversarial_gap needs a gap schedule");
      }
      validate_schedule(*spec.schedule);
      ZeroPattern base =
          spec.base_pattern ? *spec.base_pattern : ZeroPattern::full(spec.n);
      if (base.size() != spec.n) {
        throw std::invalid_argument("base pattern dimension mismatch");
      }
      base = base.united(ZeroPattern::identity(spec.n));
      if (df * static_cast<double>(detail::max_row_support(base)) > 1.0) {
        throw std::invalid_argument(
            "infeasible spec: delta_floor exceeds the event row budget");
      }
      break;
    }
  }
}

/// Deterministic function of (spec, t). Positive diagonal >= delta_floor,
/// every positive entry >= delta_floor, rows sum to 1 to the last ulp.
inline StochasticMatrix generate(const GeneratorSpec& spec, std::size_t t) {
  validate_spec(spec);
  const std::size_t n = spec.n;
  Rng rng(spec.seed, t);

  const auto from_support =
      [&](const std::vector<std::vector<std::size_t>>& support) {
        std::vector<double> e(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          detail::fill_row(e, n, i, support[i], spec.delta_floor, rng);
        }
        return StochasticMatrix(n, std::move(e));
      };

  switch (spec.kind) {
    case GeneratorSpec::Kind::constant:
      return *spec.matrix;

    case GeneratorSpec::Kind::random_positive_diagonal: {
      std::vector<std::vector<std::size_t>> support(n);
      for (std::size_t i = 0; i < n; ++i) {
        support[i].push_back(i);
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i && rng.chance(spec.density)) support[i].push_back(j);
        }
        std::sort(support[i].begin(), support[i].end());
      }
      return from_support(support);
    }

    case GeneratorSpec::Kind::type_symmetric: {
      std::vector<std::vector<std::size_t>> support(n);
      for (std::size_t i = 0; i < n; ++i) support[i].push_back(i);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (rng.chance(spec.density)) {
            support[i].push_back(j);
            support[j].push_back(i);
          }
        }
      }
      for (auto& s : support) std::sort(s.begin(), s.end());
      return from_support(support);
    }

    case GeneratorSpec::Kind::pattern_scheduled: {
      const ZeroPattern& p = spec.patterns[t % spec.patterns.size()];
      std::vector<std::vector<std::size_t>> support(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (p.test(i, j)) support[i].push_back(j);
        }
      }
      return from_support(support);
    }

    case GeneratorSpec::Kind::adversarial_gap: {
      // Event at the last step of each schedule segment; identity (the
      // positive-diagonal neutral element, contributing no pattern bits)
      // everywhere else.
      std::size_t edge = 0;
      bool event = false;
      for (std::size_t i = 0; edge <= t; ++i) {
        edge += gap_length(*spec.schedule, i);
        if (edge == t + 1) {
          event = true;
          break;
        }
      }
      if (!event) return StochasticMatrix::identity(n);
      ZeroPattern base =
          spec.base_pattern ? *spec.base_pattern : ZeroPattern::full(n);
      base = base.united(ZeroPattern::identity(n));
      std::vector<std::vector<std::size_t>> support(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (base.test(i, j)) support[i].push_back(j);
        }
      }
      return from_support(support);
    }
  }
  throw std::logic_error("unreachable");
}

/// Generator-backed sequence over [0, horizon).
inline MatrixSequence make_sequence(const GeneratorSpec& spec,
                                    std::size_t horizon) {
  validate_spec(spec);
  return MatrixSequence(
      [spec](std::size_t t) { return generate(spec, t); }, spec.n, horizon,
      /*positive_diagonal=*/true);
}

}  // namespace stomp
