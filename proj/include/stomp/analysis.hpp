#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stomp/accumulation.hpp"
#include "stomp/matrix.hpp"
#include "stomp/sequence.hpp"
#include "stomp/structure.hpp"

namespace stomp {

/// Family of intercommunication-gap schedules. Segment i contributes the
/// series term delta^{gap(i)} with
///   constant: gap(i) = a          (the fixed bound N),
///   log_gap:  gap(i) = a log(i),
///   loglog:   gap(i) = a log(log(i)),
///   custom:   gap(i) taken from an explicit list.
struct GapSchedule {
  enum class Kind { constant, log_gap, loglog_gap, custom };

  Kind kind = Kind::constant;
  double a = 1.0;      // scale; plays the role of N for the constant kind
  double delta = 0.5;  // term base, in (0, 1)
  std::vector<double> custom_gaps;
};

enum class SeriesClass { divergent, convergent };

inline void validate_schedule(const GapSchedule& s) {
  if (!(s.delta > 0.0 && s.delta < 1.0)) {
    throw std::invalid_argument("schedule delta must be in (0, 1)");
  }
  if (!(s.a > 0.0)) {
    throw std::invalid_argument("schedule scale a must be positive");
  }
  if (s.kind == GapSchedule::Kind::custom && s.custom_gaps.empty()) {
    throw std::invalid_argument("custom schedule needs explicit gaps");
  }
}

/// First summation index of the series for this kind (log log needs
/// log(log(n)) defined, so that series starts at n = 3).
inline std::size_t series_start(const GapSchedule& s) {
  return s.kind == GapSchedule::Kind::loglog_gap ? 3 : 1;
}

/// Continuous gap exponent at index i (i >= series_start).
inline double gap_exponent(const GapSchedule& s, std::size_t i) {
  switch (s.kind) {
    case GapSchedule::Kind::constant:
      return s.a;
    case GapSchedule::Kind::log_gap:
      return s.a * std::log(static_cast<double>(i));
    case GapSchedule::Kind::loglog_gap:
      return s.a * std::log(std::log(static_cast<double>(i)));
    case GapSchedule::Kind::custom:
      if (i - 1 < s.custom_gaps.size()) return s.custom_gaps[i - 1];
      return s.custom_gaps.back();
  }
  throw std::logic_error("unreachable");
}

/// Integer segment length for generators: the rounded exponent, floored
/// at 1 so every segment has at least one step.
inline std::size_t gap_length(const GapSchedule& s, std::size_t i) {
  double g = 1.0;
  switch (s.kind) {
    case GapSchedule::Kind::constant:
      g = s.a;
      break;
    case GapSchedule::Kind::log_gap:
      g = s.a * std::log(static_cast<double>(i + 1));
      break;
    case GapSchedule::Kind::loglog_gap:
      g = s.a * std::log(std::log(static_cast<double>(i + 3)));
      break;
    case GapSchedule::Kind::custom:
      g = i < s.custom_gaps.size() ? s.custom_gaps[i] : s.custom_gaps.back();
      break;
  }
  const long long r = std::llround(g);
  return r < 1 ? 1 : static_cast<std::size_t>(r);
}

/// Partial sum of delta^{gap(i)} for i from the series start up to and
/// including `upto`, summed in ascending index order.
inline double series_partial_sum(const GapSchedule& s, std::size_t upto) {
  validate_schedule(s);
  const std::size_t start = series_start(s);
  if (upto < start) {
    throw std::invalid_argument("series_partial_sum: upto below series start");
  }
  const double log_delta = std::log(s.delta);
  double sum = 0.0;
  for (std::size_t i = start; i <= upto; ++i) {
    sum += std::exp(log_delta * gap_exponent(s, i));
  }
  return sum;
}

/// Closed-form divergence test.
///   constant: divergent for every delta in (0, 1);
///   log_gap:  delta^{a log n} = n^{a log delta} is a p-series, divergent
///             iff a log(delta) >= -1, i.e. delta >= e^{-1/a};
///   loglog:   divergent for every delta in (0, 1).
/// Custom schedules have no closed form and are rejected.
inline SeriesClass classify_schedule(const GapSchedule& s) {
  validate_schedule(s);
  switch (s.kind) {
    case GapSchedule::Kind::constant:
      return SeriesClass::divergent;
    case GapSchedule::Kind::log_gap:
      return s.delta >= std::exp(-1.0 / s.a) ? SeriesClass::divergent
                                             : SeriesClass::convergent;
    case GapSchedule::Kind::loglog_gap:
      return SeriesClass::divergent;
    case GapSchedule::Kind::custom:
      throw std::invalid_argument(
          "classify_schedule: custom schedules have no closed form");
  }
  throw std::logic_error("unreachable");
}

enum class HypothesisStatus { satisfied, violated, unknown };

namespace detail {

// Least-squares fit of gaps[i] ~ a * shape(i); returns the scale and the
// maximal absolute residual. shape must be nonnegative.
template <class Shape>
inline std::pair<double, double> fit_gap_shape(
    const std::vector<std::size_t>& gaps, Shape shape) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double s = shape(i);
    num += static_cast<double>(gaps[i]) * s;
    den += s * s;
  }
  if (den == 0.0) return {0.0, std::numeric_limits<double>::infinity()};
  const double a = num / den;
  double worst = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(gaps[i]) - a * shape(i)));
  }
  return {a, worst};
}

}  // namespace detail

/// Given a uniform per-factor floor delta on the positive minimum and the
/// measured segment lengths, decides whether the divergence hypothesis is
/// certified by the lower bound delta_i >= delta^{gap_i}.
///
/// Constant, log-shaped and loglog-shaped gap lists are recognized (with
/// rounding slack 1.5, since generator gaps are integers floored at 1)
/// and classified in closed form. Anything else falls back to the
/// partial-sum growth of the bound itself: a tail quarter still carrying
/// weight is taken as divergence evidence, otherwise the answer is
/// unknown -- a finite prefix cannot prove convergence of the true series.
inline HypothesisStatus hypothesis_from_uniform_bound(
    double delta, const std::vector<std::size_t>& gaps) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("uniform bound delta must be in (0, 1)");
  }
  if (gaps.empty()) return HypothesisStatus::unknown;

  // Constant shape: exact.
  if (std::all_of(gaps.begin(), gaps.end(),
                  [&](std::size_t g) { return g == gaps.front(); })) {
    return HypothesisStatus::satisfied;  // sum of a fixed positive term
  }

  constexpr double kResidualSlack = 1.5;
  const auto log_shape = [](std::size_t i) {
    return std::log(static_cast<double>(i + 1));
  };
  const auto loglog_shape = [](std::size_t i) {
    return std::log(std::log(static_cast<double>(i + 3)));
  };
  const auto [a_log, r_log] = detail::fit_gap_shape(gaps, log_shape);
  const auto [a_ll, r_ll] = detail::fit_gap_shape(gaps, loglog_shape);

  if (r_ll <= kResidualSlack && (r_ll <= r_log || a_log <= 0.0)) {
    return HypothesisStatus::satisfied;  // loglog growth diverges for any delta
  }
  if (r_log <= kResidualSlack && a_log > 0.0) {
    GapSchedule s;
    s.kind = GapSchedule::Kind::log_gap;
    s.a = a_log;
    s.delta = delta;
    return classify_schedule(s) == SeriesClass::divergent
               ? HypothesisStatus::satisfied
               : HypothesisStatus::violated;
  }

  // No recognized shape: look at the growth of the bound's partial sums.
  double total = 0.0, tail = 0.0;
  const std::size_t tail_start = gaps.size() - gaps.size() / 4;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double term = std::pow(delta, static_cast<double>(gaps[i]));
    total += term;
    if (i >= tail_start) tail += term;
  }
  if (total >= 1.0 && tail >= 0.15 * total) return HypothesisStatus::satisfied;
  return HypothesisStatus::unknown;
}

/// What backs the claim that the delta series diverges.
enum class DivergenceEvidence { schedule_certified, empirical_growth, inconclusive };

struct TheoremOptions {
  std::size_t horizon = 0;
  double tol = 1e-8;  // residual threshold for conclusion_verified
  double eps_pos = kEpsPos;
  /// Known gap schedule of the input, if any; used with the measured
  /// positive-minimum floor for closed-form certification.
  std::optional<GapSchedule> schedule;
  /// Declared per-factor floor; the certificate still uses the measured
  /// floor if that is smaller.
  std::optional<double> delta_floor;
};

/// Hypothesis checklist and conclusion residuals for the convergence
/// theorem at a finite horizon.
struct TheoremReport {
  Segmentation segmentation;
  ClassPartition classes;  // of the segment pattern

  std::vector<double> delta_series;  // min+ of each retained segment
  double measured_floor = 1.0;       // min over factors of min+ since t0

  bool positive_diagonals = false;
  bool stabilized_segments = false;
  DivergenceEvidence divergence_evidence = DivergenceEvidence::inconclusive;

  // Conclusion residuals on A(horizon, t0) (backward direction):
  std::vector<double> essential_tau;           // per essential class
  std::vector<double> essential_row_distance;  // per essential class
  double inessential_block_norm = 0.0;         // [J,J] row-sum norm
  double oscillation = 0.0;  // [J,E] movement over the last <= 10 segments

  double tol = 1e-8;
  bool conclusion_verified = false;

  std::size_t essential_count() const { return classes.essential_count; }
};

/// Runs the backward segmentation, measures the per-segment positive
/// minima, and evaluates the theorem's conclusion residuals on
/// A(horizon, t0). Divergence of the delta series is undecidable from a
/// finite prefix, so the report grades the evidence instead of claiming
/// a truth value.
inline TheoremReport check_theorem(const MatrixSequence& seq,
                                   const TheoremOptions& opt) {
  TheoremReport rep;
  rep.tol = opt.tol;
  const std::size_t horizon =
      opt.horizon == 0 ? seq.horizon() : opt.horizon;

  for (std::size_t t = 0; t < horizon; ++t) {
    if (!seq.at(t).has_positive_diagonal(opt.eps_pos)) {
      throw std::invalid_argument("check_theorem: positive diagonals required");
    }
  }
  rep.positive_diagonals = true;

  rep.segmentation = segment(seq, Direction::backward, horizon, opt.eps_pos);
  rep.stabilized_segments = rep.segmentation.stabilized;
  rep.classes = communication_classes(rep.segmentation.segment_pattern);

  const auto& cuts = rep.segmentation.cut_points;
  const std::size_t t0 = cuts.front();

  // Per-segment minima and the uniform factor floor on the analyzed window.
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Accumulation w =
        accumulate(seq, Direction::backward, cuts[i], cuts[i + 1]);
    rep.delta_series.push_back(min_plus(w.value, opt.eps_pos));
  }
  for (std::size_t t = t0; t < horizon; ++t) {
    rep.measured_floor =
        std::min(rep.measured_floor, min_plus(seq.at(t), opt.eps_pos));
  }

  // Accumulate A(horizon, t0) once, snapshotting at the cuts for the
  // oscillation metric.
  std::vector<StochasticMatrix> at_cuts;
  StochasticMatrix acc = StochasticMatrix::identity(seq.dimension());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    for (std::size_t t = cuts[i]; t < cuts[i + 1]; ++t) {
      acc = multiply(seq.at(t), acc);
    }
    at_cuts.push_back(acc);
  }
  for (std::size_t t = cuts.back(); t < horizon; ++t) {
    acc = multiply(seq.at(t), acc);  // only when cuts.back() < horizon
  }

  const std::size_t g = rep.classes.essential_count;
  for (std::size_t k = 0; k < g; ++k) {
    const auto& cls = rep.classes.classes[k];
    rep.essential_tau.push_back(block_ergodicity_coefficient(acc, cls));
    rep.essential_row_distance.push_back(block_row_distance(acc, cls));
  }

  std::vector<std::size_t> essential_union, inessential_union;
  for (std::size_t k = 0; k < rep.classes.classes.size(); ++k) {
    auto& dst = k < g ? essential_union : inessential_union;
    dst.insert(dst.end(), rep.classes.classes[k].begin(),
               rep.classes.classes[k].end());
  }
  if (!inessential_union.empty()) {
    rep.inessential_block_norm =
        block_row_sum_norm(acc, inessential_union, inessential_union);
    // Movement of the inessential-to-essential blocks over the last
    // segments; reported, never asserted -- the theorem does not claim
    // convergence there.
    const std::size_t pairs = at_cuts.size() < 2 ? 0 : at_cuts.size() - 1;
    const std::size_t window = std::min<std::size_t>(10, pairs);
    for (std::size_t w = 0; w < window; ++w) {
      const StochasticMatrix& cur = at_cuts[at_cuts.size() - 1 - w];
      const StochasticMatrix& prev = at_cuts[at_cuts.size() - 2 - w];
      for (std::size_t i : inessential_union) {
        for (std::size_t j : essential_union) {
          rep.oscillation =
              std::max(rep.oscillation, std::abs(cur(i, j) - prev(i, j)));
        }
      }
    }
  }

  // Divergence evidence, strongest applicable grade first.
  const std::vector<std::size_t> gaps = rep.segmentation.gaps();
  double floor = rep.measured_floor;
  if (opt.delta_floor) floor = std::min(floor, *opt.delta_floor);
  bool certified = false;
  if (floor > 0.0 && floor < 1.0) {
    if (opt.schedule) {
      GapSchedule s = *opt.schedule;
      s.delta = floor;
      certified = s.kind != GapSchedule::Kind::custom &&
                  classify_schedule(s) == SeriesClass::divergent;
    } else {
      certified =
          hypothesis_from_uniform_bound(floor, gaps) == HypothesisStatus::satisfied;
    }
  } else if (floor >= 1.0 && !gaps.empty()) {
    certified = true;  // every factor is fully mixing already
  }
  if (certified) {
    rep.divergence_evidence = DivergenceEvidence::schedule_certified;
  } else {
    double first = 0.0, second = 0.0;
    const std::size_t half = rep.delta_series.size() / 2;
    for (std::size_t i = 0; i < rep.delta_series.size(); ++i) {
      (i < half ? first : second) += rep.delta_series[i];
    }
    const double total = first + second;
    rep.divergence_evidence =
        (rep.delta_series.size() >= 4 && total >= 1.0 && second >= 0.25 * first)
            ? DivergenceEvidence::empirical_growth
            : DivergenceEvidence::inconclusive;
  }

  double worst = 0.0;
  for (double r : rep.essential_tau) worst = std::max(worst, r);
  for (double r : rep.essential_row_distance) worst = std::max(worst, r);
  worst = std::max(worst, rep.inessential_block_norm);
  rep.conclusion_verified = rep.stabilized_segments && worst < opt.tol;
  return rep;
}

inline TheoremReport check_theorem(const MatrixSequence& seq,
                                   std::size_t horizon, double tol = 1e-8) {
  TheoremOptions opt;
  opt.horizon = horizon;
  opt.tol = tol;
  return check_theorem(seq, opt);
}

}  // namespace stomp
