#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stomp/matrix.hpp"
#include "stomp/pattern.hpp"

namespace stomp {

/// Partition of {0..n-1} into communicating classes, essential classes
/// first. Class ids are positions in `classes`.
///
/// Ordering invariants:
///  - classes are the strongly connected components of the pattern digraph;
///  - ids 0..essential_count-1 are essential (no path leaves the class),
///    the rest inessential;
///  - if class J reaches class I (J != I) then I precedes J;
///  - classes that the partial order leaves unordered are sorted by their
///    smallest contained index, which makes the output deterministic.
struct ClassPartition {
  std::vector<std::vector<std::size_t>> classes;
  std::size_t essential_count = 0;
  std::vector<std::size_t> class_of;

  std::size_t size() const noexcept { return class_of.size(); }
};

namespace detail {

// Iterative Tarjan SCC on the pattern digraph (edge i -> j iff bit (i, j)).
// Returns component id per node; component ids are in reverse topological
// order of discovery and get reordered by the caller anyway.
inline std::pair<std::vector<std::size_t>, std::size_t> tarjan_scc(
    const ZeroPattern& p) {
  const std::size_t n = p.size();
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnset), lowlink(n, 0), comp(n, kUnset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t next_index = 0, comp_count = 0;

  struct Frame {
    std::size_t v;
    std::size_t next_j;
  };
  std::vector<Frame> call;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back({root, 0});
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call.empty()) {
      Frame& f = call.back();
      const std::size_t v = f.v;
      bool descended = false;
      while (f.next_j < n) {
        const std::size_t j = f.next_j++;
        if (!p.test(v, j)) continue;
        if (index[j] == kUnset) {
          index[j] = lowlink[j] = next_index++;
          stack.push_back(j);
          on_stack[j] = true;
          call.push_back({j, 0});
          descended = true;
          break;
        }
        if (on_stack[j]) {
          lowlink[v] = std::min(lowlink[v], index[j]);
        }
      }
      if (descended) continue;
      if (lowlink[v] == index[v]) {
        while (true) {
          const std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comp_count;
          if (w == v) break;
        }
        ++comp_count;
      }
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().v;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }
  return {std::move(comp), comp_count};
}

}  // namespace detail

/// Communicating classes of a positive-diagonal pattern with
/// essential/inessential classification and deterministic ordering.
/// Rejects patterns with a zero diagonal bit: self-communication, and with
/// it the equivalence relation, needs the positive diagonal.
inline ClassPartition communication_classes(const ZeroPattern& p) {
  if (!p.diagonal_all_set()) {
    throw std::invalid_argument(
        "communication_classes: pattern must have a positive diagonal");
  }
  const std::size_t n = p.size();
  auto [comp, comp_count] = detail::tarjan_scc(p);

  std::vector<std::vector<std::size_t>> members(comp_count);
  for (std::size_t i = 0; i < n; ++i) members[comp[i]].push_back(i);

  // Condensation out-edges per component (distinct targets).
  std::vector<std::vector<std::size_t>> out(comp_count);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && p.test(i, j) && comp[i] != comp[j]) {
        out[comp[i]].push_back(comp[j]);
      }
    }
  }
  for (auto& o : out) {
    std::sort(o.begin(), o.end());
    o.erase(std::unique(o.begin(), o.end()), o.end());
  }

  std::vector<std::size_t> min_index(comp_count);
  for (std::size_t c = 0; c < comp_count; ++c) {
    min_index[c] = *std::min_element(members[c].begin(), members[c].end());
  }

  // Essentials (condensation sinks) first, sorted by smallest member.
  std::vector<std::size_t> order;
  order.reserve(comp_count);
  std::vector<bool> placed(comp_count, false);
  std::vector<std::size_t> essentials;
  for (std::size_t c = 0; c < comp_count; ++c) {
    if (out[c].empty()) essentials.push_back(c);
  }
  std::sort(essentials.begin(), essentials.end(),
            [&](std::size_t a, std::size_t b) {
              return min_index[a] < min_index[b];
            });
  for (std::size_t c : essentials) {
    order.push_back(c);
    placed[c] = true;
  }
  const std::size_t essential_count = essentials.size();

  // Inessentials: a class becomes ready once everything it reaches is
  // placed; ties broken by smallest member. Classes are few, so the
  // quadratic scan is fine.
  while (order.size() < comp_count) {
    std::size_t best = comp_count;
    for (std::size_t c = 0; c < comp_count; ++c) {
      if (placed[c]) continue;
      bool ready = true;
      for (std::size_t t : out[c]) {
        if (!placed[t]) {
          ready = false;
          break;
        }
      }
      if (ready && (best == comp_count || min_index[c] < min_index[best])) {
        best = c;
      }
    }
    if (best == comp_count) {
      throw std::logic_error("condensation is not acyclic");  // unreachable
    }
    order.push_back(best);
    placed[best] = true;
  }

  ClassPartition part;
  part.essential_count = essential_count;
  part.class_of.assign(n, 0);
  part.classes.reserve(comp_count);
  for (std::size_t pos = 0; pos < comp_count; ++pos) {
    auto cls = members[order[pos]];
    std::sort(cls.begin(), cls.end());
    for (std::size_t i : cls) part.class_of[i] = pos;
    part.classes.push_back(std::move(cls));
  }
  return part;
}

inline bool is_essential_index(const ClassPartition& part, std::size_t i) {
  if (i >= part.size()) {
    throw std::out_of_range("is_essential_index: index out of range");
  }
  return part.class_of[i] < part.essential_count;
}

/// Simultaneous row/column permutation exposing the block lower
/// triangular shape: essential diagonal blocks first, then the
/// inessential ones, each block irreducible.
struct GantmacherForm {
  /// permutation[k] = original index shown at permuted position k.
  std::vector<std::size_t> permutation;
  ClassPartition partition;
  /// Offsets of each diagonal block along the permuted axis; size p + 1.
  std::vector<std::size_t> block_offsets;

  std::size_t block_count() const noexcept { return partition.classes.size(); }
  std::size_t essential_count() const noexcept {
    return partition.essential_count;
  }
  std::size_t block_size(std::size_t k) const {
    return partition.classes.at(k).size();
  }

  /// Dense row-major copy of block (k, l) of the permuted matrix.
  std::vector<double> block(const StochasticMatrix& a, std::size_t k,
                            std::size_t l) const {
    const auto& rows = partition.classes.at(k);
    const auto& cols = partition.classes.at(l);
    std::vector<double> out;
    out.reserve(rows.size() * cols.size());
    for (std::size_t i : rows) {
      for (std::size_t j : cols) out.push_back(a(i, j));
    }
    return out;
  }

  bool block_all_zero(const ZeroPattern& p, std::size_t k,
                      std::size_t l) const {
    for (std::size_t i : partition.classes.at(k)) {
      for (std::size_t j : partition.classes.at(l)) {
        if (p.test(i, j)) return false;
      }
    }
    return true;
  }

  bool block_all_positive(const ZeroPattern& p, std::size_t k,
                          std::size_t l) const {
    for (std::size_t i : partition.classes.at(k)) {
      for (std::size_t j : partition.classes.at(l)) {
        if (!p.test(i, j)) return false;
      }
    }
    return true;
  }
};

inline GantmacherForm gantmacher_form(const ZeroPattern& p) {
  GantmacherForm g;
  g.partition = communication_classes(p);
  g.permutation.reserve(p.size());
  g.block_offsets.push_back(0);
  for (const auto& cls : g.partition.classes) {
    g.permutation.insert(g.permutation.end(), cls.begin(), cls.end());
    g.block_offsets.push_back(g.permutation.size());
  }
  return g;
}

inline GantmacherForm gantmacher_form(const StochasticMatrix& a,
                                      double eps_pos = kEpsPos) {
  if (!a.has_positive_diagonal(eps_pos)) {
    throw std::invalid_argument(
        "gantmacher_form: matrix must have a positive diagonal");
  }
  return gantmacher_form(pattern_of(a, eps_pos));
}

/// Type-symmetry: the pattern equals the pattern of the transpose.
inline bool is_type_symmetric(const StochasticMatrix& a,
                              double eps_pos = kEpsPos) {
  const ZeroPattern p = pattern_of(a, eps_pos);
  return p == p.transposed();
}

/// Blocks of `p` under `form` that break the positive/zero dichotomy:
/// a diagonal block that is not all-positive, or an off-diagonal block
/// that is neither all-zero nor all-positive. Empty on patterns that
/// saturated the way a correctly segmented accumulation does.
inline std::vector<std::pair<std::size_t, std::size_t>>
block_dichotomy_violations(const ZeroPattern& p, const GantmacherForm& form) {
  std::vector<std::pair<std::size_t, std::size_t>> bad;
  const std::size_t blocks = form.block_count();
  for (std::size_t k = 0; k < blocks; ++k) {
    for (std::size_t l = 0; l < blocks; ++l) {
      if (k == l) {
        if (!form.block_all_positive(p, k, k)) bad.emplace_back(k, k);
      } else if (!form.block_all_zero(p, k, l) &&
                 !form.block_all_positive(p, k, l)) {
        bad.emplace_back(k, l);
      }
    }
  }
  return bad;
}

}  // namespace stomp
