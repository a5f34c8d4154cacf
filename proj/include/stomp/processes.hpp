#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stomp/accumulation.hpp"
#include "stomp/matrix.hpp"
#include "stomp/sequence.hpp"

namespace stomp {

/// Opinion column vector x(t) of a consensus process.
struct OpinionState {
  std::vector<double> x;
  std::size_t t = 0;
};

/// Probability row vector p(t) of a Markov process.
struct DistributionState {
  std::vector<double> p;
  std::size_t t = 0;
};

inline void validate_distribution(const std::vector<double>& p,
                                  double eps_row = kEpsRow) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("distribution entries must be nonnegative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > eps_row) {
    throw std::invalid_argument("distribution does not sum to 1");
  }
}

/// x(t+1) = A(t) x(t); every new value is a convex combination of the old.
inline OpinionState consensus_step(const OpinionState& state,
                                   const StochasticMatrix& a) {
  return OpinionState{apply(a, state.x), state.t + 1};
}

/// p(t+1) = p(t) A(t).
inline DistributionState markov_step(const DistributionState& state,
                                     const StochasticMatrix& a) {
  return DistributionState{row_apply(state.p, a), state.t + 1};
}

/// Final grouping of agents by opinion value.
struct ClusterReport {
  std::vector<std::vector<std::size_t>> clusters;  // partition of {0..n-1}
  std::vector<double> values;                      // mean per cluster
  bool converged = false;
  /// Agents whose last step still moved by >= tol ("may hop still around").
  std::vector<std::size_t> unsettled;
};

struct RunOptions {
  std::size_t horizon = 0;
  double tol = 1e-10;
  std::size_t patience = 10;   // consecutive quiet steps before stopping
  double eps_cluster = 1e-6;
};

/// Single-linkage clustering on sorted values: a gap > eps starts a new
/// cluster. Deterministic; clusters are sorted by smallest member.
inline ClusterReport cluster_values(const std::vector<double>& x,
                                    double eps_cluster) {
  ClusterReport rep;
  const std::size_t n = x.size();
  if (n == 0) return rep;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  std::vector<std::vector<std::size_t>> groups;
  groups.push_back({order[0]});
  for (std::size_t k = 1; k < n; ++k) {
    if (x[order[k]] - x[order[k - 1]] > eps_cluster) {
      groups.emplace_back();
    }
    groups.back().push_back(order[k]);
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  for (const auto& g : groups) {
    double mean = 0.0;
    for (std::size_t i : g) mean += x[i];
    rep.values.push_back(mean / static_cast<double>(g.size()));
  }
  rep.clusters = std::move(groups);
  return rep;
}

struct ConsensusRun {
  std::vector<OpinionState> trace;  // trace[t].t == t
  ClusterReport report;
};

/// Runs the consensus process until the horizon or until the maximal
/// step-to-step movement stays below tol for `patience` consecutive
/// steps (a patience window guards against dormant phases in gap
/// schedules, where nothing moves for a while between communication
/// events).
inline ConsensusRun run_consensus(const MatrixSequence& seq,
                                  std::vector<double> x0,
                                  const RunOptions& opt) {
  if (x0.size() != seq.dimension()) {
    throw std::invalid_argument("run_consensus: dimension mismatch");
  }
  const std::size_t horizon =
      opt.horizon == 0 ? seq.horizon() : std::min(opt.horizon, seq.horizon());

  ConsensusRun run;
  run.trace.push_back(OpinionState{std::move(x0), 0});
  std::vector<double> last_move(seq.dimension(), 0.0);
  std::size_t quiet = 0;

  for (std::size_t t = 0; t < horizon; ++t) {
    OpinionState next = consensus_step(run.trace.back(), seq.at(t));
    double movement = 0.0;
    for (std::size_t i = 0; i < next.x.size(); ++i) {
      last_move[i] = std::abs(next.x[i] - run.trace.back().x[i]);
      movement = std::max(movement, last_move[i]);
    }
    run.trace.push_back(std::move(next));
    quiet = movement < opt.tol ? quiet + 1 : 0;
    if (quiet >= opt.patience) break;
  }

  run.report = cluster_values(run.trace.back().x, opt.eps_cluster);
  double spread = 0.0;
  for (std::size_t c = 0; c < run.report.clusters.size(); ++c) {
    double lo = run.report.values[c], hi = run.report.values[c];
    for (std::size_t i : run.report.clusters[c]) {
      lo = std::min(lo, run.trace.back().x[i]);
      hi = std::max(hi, run.trace.back().x[i]);
    }
    spread = std::max(spread, hi - lo);
  }
  run.report.converged = quiet >= opt.patience && spread <= opt.eps_cluster;
  for (std::size_t i = 0; i < last_move.size(); ++i) {
    if (last_move[i] >= opt.tol) run.report.unsettled.push_back(i);
  }
  return run;
}

inline ConsensusRun run_consensus(const MatrixSequence& seq,
                                  const std::vector<double>& x0,
                                  std::size_t horizon, double tol = 1e-10) {
  RunOptions opt;
  opt.horizon = horizon;
  opt.tol = tol;
  return run_consensus(seq, x0, opt);
}

struct MarkovRun {
  std::vector<DistributionState> trace;
  ClusterReport report;  // clustering of the final distribution values
};

inline MarkovRun run_markov(const MatrixSequence& seq, std::vector<double> p0,
                            const RunOptions& opt) {
  if (p0.size() != seq.dimension()) {
    throw std::invalid_argument("run_markov: dimension mismatch");
  }
  validate_distribution(p0);
  const std::size_t horizon =
      opt.horizon == 0 ? seq.horizon() : std::min(opt.horizon, seq.horizon());

  MarkovRun run;
  run.trace.push_back(DistributionState{std::move(p0), 0});
  std::vector<double> last_move(seq.dimension(), 0.0);
  std::size_t quiet = 0;

  for (std::size_t t = 0; t < horizon; ++t) {
    DistributionState next = markov_step(run.trace.back(), seq.at(t));
    double movement = 0.0;
    for (std::size_t i = 0; i < next.p.size(); ++i) {
      last_move[i] = std::abs(next.p[i] - run.trace.back().p[i]);
      movement = std::max(movement, last_move[i]);
    }
    run.trace.push_back(std::move(next));
    quiet = movement < opt.tol ? quiet + 1 : 0;
    if (quiet >= opt.patience) break;
  }

  run.report = cluster_values(run.trace.back().p, opt.eps_cluster);
  run.report.converged = quiet >= opt.patience;
  for (std::size_t i = 0; i < last_move.size(); ++i) {
    if (last_move[i] >= opt.tol) run.report.unsettled.push_back(i);
  }
  return run;
}

inline MarkovRun run_markov(const MatrixSequence& seq,
                            const std::vector<double>& p0,
                            std::size_t horizon, double tol = 1e-10) {
  RunOptions opt;
  opt.horizon = horizon;
  opt.tol = tol;
  return run_markov(seq, p0, opt);
}

/// tau of the forward-accumulated diagonal block of `cls` at each
/// retained cut of the forward segmentation. Decay toward zero is the
/// weak-ergodicity evidence for that class: the forward product forgets
/// its initial distribution inside the class.
///
/// `cls` must be closed under the segment pattern (no bit leaves it);
/// the blocks are then row-stochastic up to threshold leakage, which
/// restrict_to() absorbs.
inline std::vector<double> weak_ergodicity_estimate(
    const MatrixSequence& seq, const std::vector<std::size_t>& cls,
    std::size_t horizon) {
  if (cls.empty()) {
    throw std::invalid_argument("weak_ergodicity_estimate: empty class");
  }
  const Segmentation seg = segment(seq, Direction::forward, horizon);
  if (!seg.stabilized) {
    throw std::invalid_argument(
        "weak_ergodicity_estimate: forward segmentation did not stabilize");
  }
  std::vector<bool> inside(seq.dimension(), false);
  for (std::size_t i : cls) {
    if (i >= seq.dimension()) {
      throw std::out_of_range("weak_ergodicity_estimate: index out of range");
    }
    inside[i] = true;
  }
  for (std::size_t i : cls) {
    for (std::size_t j = 0; j < seq.dimension(); ++j) {
      if (!inside[j] && seg.segment_pattern.test(i, j)) {
        throw std::invalid_argument(
            "weak_ergodicity_estimate: class not closed under the segment "
            "pattern");
      }
    }
  }

  std::vector<double> taus;
  StochasticMatrix running = StochasticMatrix::identity(cls.size());
  for (std::size_t i = 0; i + 1 < seg.cut_points.size(); ++i) {
    const Accumulation acc = accumulate(seq, Direction::forward,
                                        seg.cut_points[i],
                                        seg.cut_points[i + 1]);
    running = multiply(running, restrict_to(acc.value, cls));
    taus.push_back(ergodicity_coefficient(running));
  }
  return taus;
}

}  // namespace stomp
