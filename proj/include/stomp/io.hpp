#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stomp/accumulation.hpp"
#include "stomp/analysis.hpp"
#include "stomp/generators.hpp"
#include "stomp/matrix.hpp"
#include "stomp/pattern.hpp"
#include "stomp/processes.hpp"
#include "stomp/sequence.hpp"
#include "stomp/structure.hpp"

namespace stomp {

/// Raised on malformed input documents; the CLI maps it to exit code 2.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace io {

using nlohmann::json;

// ---------------------------------------------------------------------
// Matrices and patterns
// ---------------------------------------------------------------------

inline json matrix_to_json(const StochasticMatrix& a) {
  json rows = json::array();
  for (std::size_t i = 0; i < a.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.size(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline StochasticMatrix matrix_from_json(const json& j,
                                         double eps_row = kEpsRow) {
  if (!j.is_array() || j.empty()) {
    throw input_error("matrix must be a nonempty array of rows");
  }
  const std::size_t n = j.size();
  std::vector<double> entries;
  entries.reserve(n * n);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != n) {
      throw input_error("matrix rows must all have length n");
    }
    for (const auto& v : row) {
      if (!v.is_number()) throw input_error("matrix entries must be numbers");
      entries.push_back(v.get<double>());
    }
  }
  try {
    return StochasticMatrix(n, std::move(entries), eps_row);
  } catch (const std::invalid_argument& e) {
    throw input_error(e.what());
  }
}

inline json pattern_to_json(const ZeroPattern& p) {
  json rows = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < p.size(); ++j) {
      row.push_back(p.test(i, j) ? 1 : 0);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ZeroPattern pattern_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw input_error("pattern must be a nonempty array of 0/1 rows");
  }
  const std::size_t n = j.size();
  ZeroPattern p(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) {
      throw input_error("pattern rows must all have length n");
    }
    for (std::size_t k = 0; k < n; ++k) {
      const auto& v = j[i][k];
      if (!v.is_number()) throw input_error("pattern bits must be 0 or 1");
      if (v.get<double>() != 0.0) p.set(i, k);
    }
  }
  return p;
}

// ---------------------------------------------------------------------
// Schedules and generator specs
// ---------------------------------------------------------------------

inline std::string schedule_kind_name(GapSchedule::Kind k) {
  switch (k) {
    case GapSchedule::Kind::constant: return "constant";
    case GapSchedule::Kind::log_gap: return "log";
    case GapSchedule::Kind::loglog_gap: return "loglog";
    case GapSchedule::Kind::custom: return "custom";
  }
  return "?";
}

inline GapSchedule::Kind schedule_kind_from_name(const std::string& s) {
  if (s == "constant") return GapSchedule::Kind::constant;
  if (s == "log") return GapSchedule::Kind::log_gap;
  if (s == "loglog") return GapSchedule::Kind::loglog_gap;
  if (s == "custom") return GapSchedule::Kind::custom;
  throw input_error("unknown schedule kind: " + s);
}

inline json schedule_to_json(const GapSchedule& s) {
  json j{{"kind", schedule_kind_name(s.kind)}, {"a", s.a}, {"delta", s.delta}};
  if (s.kind == GapSchedule::Kind::custom) j["gaps"] = s.custom_gaps;
  return j;
}

inline GapSchedule schedule_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw input_error("schedule must be an object with a kind");
  }
  GapSchedule s;
  s.kind = schedule_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("a")) s.a = j.at("a").get<double>();
  if (j.contains("delta")) s.delta = j.at("delta").get<double>();
  if (j.contains("gaps")) s.custom_gaps = j.at("gaps").get<std::vector<double>>();
  try {
    validate_schedule(s);
  } catch (const std::invalid_argument& e) {
    throw input_error(e.what());
  }
  return s;
}

inline std::string generator_kind_name(GeneratorSpec::Kind k) {
  switch (k) {
    case GeneratorSpec::Kind::random_positive_diagonal:
      return "random_positive_diagonal";
    case GeneratorSpec::Kind::type_symmetric: return "type_symmetric";
    case GeneratorSpec::Kind::pattern_scheduled: return "pattern_scheduled";
    case GeneratorSpec::Kind::constant: return "constant";
    case GeneratorSpec::Kind::adversarial_gap: return "adversarial_gap";
  }
  return "?";
}

inline GeneratorSpec::Kind generator_kind_from_name(const std::string& s) {
  if (s == "random_positive_diagonal")
    return GeneratorSpec::Kind::random_positive_diagonal;
  if (s == "type_symmetric") return GeneratorSpec::Kind::type_symmetric;
  if (s == "pattern_scheduled") return GeneratorSpec::Kind::pattern_scheduled;
  if (s == "constant") return GeneratorSpec::Kind::constant;
  if (s == "adversarial_gap") return GeneratorSpec::Kind::adversarial_gap;
  throw input_error("unknown generator kind: " + s);
}

inline json spec_to_json(const GeneratorSpec& spec) {
  json j{{"kind", generator_kind_name(spec.kind)},
         {"n", spec.n},
         {"seed", spec.seed},
         {"delta_floor", spec.delta_floor},
         {"density", spec.density}};
  if (spec.matrix) j["matrix"] = matrix_to_json(*spec.matrix);
  if (!spec.patterns.empty()) {
    json arr = json::array();
    for (const auto& p : spec.patterns) arr.push_back(pattern_to_json(p));
    j["patterns"] = std::move(arr);
  }
  if (spec.base_pattern) j["base_pattern"] = pattern_to_json(*spec.base_pattern);
  if (spec.schedule) j["schedule"] = schedule_to_json(*spec.schedule);
  return j;
}

inline GeneratorSpec spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("n")) {
    throw input_error("generator spec must be an object with kind and n");
  }
  GeneratorSpec spec;
  spec.kind = generator_kind_from_name(j.at("kind").get<std::string>());
  spec.n = j.at("n").get<std::size_t>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("delta_floor")) spec.delta_floor = j.at("delta_floor").get<double>();
  if (j.contains("density")) spec.density = j.at("density").get<double>();
  if (j.contains("matrix")) spec.matrix = matrix_from_json(j.at("matrix"));
  if (j.contains("patterns")) {
    for (const auto& p : j.at("patterns")) {
      spec.patterns.push_back(pattern_from_json(p));
    }
  }
  if (j.contains("base_pattern")) {
    spec.base_pattern = pattern_from_json(j.at("base_pattern"));
  }
  if (j.contains("schedule")) {
    spec.schedule = schedule_from_json(j.at("schedule"));
  }
  try {
    validate_spec(spec);
  } catch (const std::invalid_argument& e) {
    throw input_error(e.what());
  }
  return spec;
}

// ---------------------------------------------------------------------
// Sequence files:
//   { "n": int, "matrices": [ [[...]], ... ] }        explicit list
//   { "generator": { ...spec... }, "horizon": int }   generator-backed
// ---------------------------------------------------------------------

inline MatrixSequence sequence_from_json(
    const json& j, std::optional<std::size_t> horizon_override = {}) {
  if (!j.is_object()) throw input_error("sequence file must be a JSON object");
  if (j.contains("matrices")) {
    if (!j.contains("n")) throw input_error("sequence file needs n");
    const std::size_t n = j.at("n").get<std::size_t>();
    std::vector<StochasticMatrix> mats;
    for (const auto& m : j.at("matrices")) {
      mats.push_back(matrix_from_json(m));
      if (mats.back().size() != n) {
        throw input_error("sequence matrix dimension differs from n");
      }
    }
    if (mats.empty()) throw input_error("sequence file has no matrices");
    return MatrixSequence(std::move(mats));
  }
  if (j.contains("generator")) {
    const GeneratorSpec spec = spec_from_json(j.at("generator"));
    std::size_t horizon = 0;
    if (horizon_override) {
      horizon = *horizon_override;
    } else if (j.contains("horizon")) {
      horizon = j.at("horizon").get<std::size_t>();
    }
    if (horizon == 0) {
      throw input_error("generator-backed sequence needs a horizon");
    }
    return make_sequence(spec, horizon);
  }
  throw input_error("sequence file needs either matrices or a generator");
}

inline json sequence_to_json(const MatrixSequence& seq) {
  json mats = json::array();
  for (std::size_t t = 0; t < seq.horizon(); ++t) {
    mats.push_back(matrix_to_json(seq.at(t)));
  }
  return json{{"n", seq.dimension()}, {"matrices", std::move(mats)}};
}

// ---------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------

inline json partition_to_json(const ClassPartition& part) {
  json classes = json::array();
  for (const auto& c : part.classes) classes.push_back(c);
  return json{{"classes", std::move(classes)},
              {"essential_count", part.essential_count}};
}

inline json gantmacher_to_json(const GantmacherForm& g,
                               const ZeroPattern& pattern) {
  json blocks = json::array();
  const auto bad = block_dichotomy_violations(pattern, g);
  for (const auto& [k, l] : bad) blocks.push_back(json::array({k, l}));
  return json{{"permutation", g.permutation},
              {"block_offsets", g.block_offsets},
              {"partition", partition_to_json(g.partition)},
              {"dichotomy_violations", std::move(blocks)}};
}

inline json segmentation_to_json(const Segmentation& seg) {
  json j{{"direction",
          seg.direction == Direction::backward ? "backward" : "forward"},
         {"horizon", seg.horizon},
         {"cut_points", seg.cut_points},
         {"warmup_cuts", seg.warmup_cuts},
         {"segment_pattern", pattern_to_json(seg.segment_pattern)},
         {"stabilized", seg.stabilized}};
  return j;
}

inline std::string evidence_name(DivergenceEvidence e) {
  switch (e) {
    case DivergenceEvidence::schedule_certified: return "schedule-certified";
    case DivergenceEvidence::empirical_growth: return "empirical-growth";
    case DivergenceEvidence::inconclusive: return "inconclusive";
  }
  return "?";
}

inline json theorem_report_to_json(const TheoremReport& rep) {
  return json{
      {"segmentation", segmentation_to_json(rep.segmentation)},
      {"classes", partition_to_json(rep.classes)},
      {"delta_series", rep.delta_series},
      {"measured_floor", rep.measured_floor},
      {"hypothesis_flags",
       {{"positive_diagonals", rep.positive_diagonals},
        {"stabilized_segments", rep.stabilized_segments},
        {"divergence_evidence", evidence_name(rep.divergence_evidence)}}},
      {"conclusion_residuals",
       {{"essential_tau", rep.essential_tau},
        {"essential_row_distance", rep.essential_row_distance},
        {"inessential_block_norm", rep.inessential_block_norm},
        {"oscillation", rep.oscillation}}},
      {"tol", rep.tol},
      {"conclusion_verified", rep.conclusion_verified}};
}

inline json cluster_report_to_json(const ClusterReport& rep) {
  json clusters = json::array();
  for (const auto& c : rep.clusters) clusters.push_back(c);
  return json{{"clusters", std::move(clusters)},
              {"values", rep.values},
              {"converged", rep.converged},
              {"unsettled", rep.unsettled}};
}

// ---------------------------------------------------------------------
// Traces (CSV: column t, then one value column per agent; 17 significant
// digits so a written trace reads back to full double precision)
// ---------------------------------------------------------------------

inline std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class State>
inline void write_trace_csv(std::ostream& os,
                            const std::vector<State>& trace,
                            const std::vector<double>& (*values)(const State&)) {
  (void)values;
  os << "t";
  if (!trace.empty()) {
    const auto& first = values(trace.front());
    for (std::size_t i = 1; i <= first.size(); ++i) os << ",v_" << i;
  }
  os << "\n";
  for (const auto& s : trace) {
    os << s.t;
    for (double v : values(s)) os << "," << format_full(v);
    os << "\n";
  }
}

inline void write_opinion_trace_csv(std::ostream& os,
                                    const std::vector<OpinionState>& trace) {
  write_trace_csv<OpinionState>(
      os, trace,
      +[](const OpinionState& s) -> const std::vector<double>& { return s.x; });
}

inline void write_distribution_trace_csv(
    std::ostream& os, const std::vector<DistributionState>& trace) {
  write_trace_csv<DistributionState>(
      os, trace,
      +[](const DistributionState& s) -> const std::vector<double>& {
        return s.p;
      });
}

template <class State>
inline json trace_to_json(const std::vector<State>& trace,
                          const std::vector<double>& (*values)(const State&)) {
  json rows = json::array();
  for (const auto& s : trace) {
    json row = json::array();
    row.push_back(s.t);
    for (double v : values(s)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  return json{{"columns", "t,v_1..v_n"}, {"rows", std::move(rows)}};
}

inline json opinion_trace_to_json(const std::vector<OpinionState>& trace) {
  return trace_to_json<OpinionState>(
      trace,
      +[](const OpinionState& s) -> const std::vector<double>& { return s.x; });
}

inline json distribution_trace_to_json(
    const std::vector<DistributionState>& trace) {
  return trace_to_json<DistributionState>(
      trace,
      +[](const DistributionState& s) -> const std::vector<double>& {
        return s.p;
      });
}

}  // namespace io
}  // namespace stomp
