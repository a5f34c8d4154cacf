// stomp -- analysis of products of row-stochastic matrices with
// positive diagonals: structure, segmentation, convergence checks and
// process simulation.
//
// Exit codes: 0 analysis completed, 2 invalid input, 1 internal error.
// Verdicts live in the report payloads, never in the exit code, so
// pipelines can post-process inconclusive outcomes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stomp/io.hpp"
#include "stomp/stomp.hpp"

namespace {

using nlohmann::json;
using namespace stomp;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw input_error("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

std::vector<double> parse_vector_arg(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg.front() == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw input_error("cannot open vector file: " + arg.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  std::vector<double> v;
  std::string tok;
  for (char c : text) {
    if (c == ',' || c == '\n' || c == ' ' || c == '\t') {
      if (!tok.empty()) {
        v.push_back(std::stod(tok));
        tok.clear();
      }
    } else {
      tok.push_back(c);
    }
  }
  if (!tok.empty()) v.push_back(std::stod(tok));
  if (v.empty()) throw input_error("empty vector argument");
  return v;
}

// "kind[:a[:delta]]", e.g. "constant:5", "log:2:0.25", "loglog:1".
GapSchedule parse_schedule_arg(const std::string& arg) {
  GapSchedule s;
  std::vector<std::string> parts;
  std::string tok;
  for (char c : arg) {
    if (c == ':') {
      parts.push_back(tok);
      tok.clear();
    } else {
      tok.push_back(c);
    }
  }
  parts.push_back(tok);
  if (parts.empty() || parts[0].empty()) {
    throw input_error("schedule must start with a kind");
  }
  s.kind = io::schedule_kind_from_name(parts[0]);
  if (parts.size() > 1) s.a = std::stod(parts[1]);
  if (parts.size() > 2) s.delta = std::stod(parts[2]);
  try {
    validate_schedule(s);
  } catch (const std::invalid_argument& e) {
    throw input_error(e.what());
  }
  return s;
}

int cmd_simulate(const std::string& input, const std::string& x0_arg,
                 const std::string& process, std::size_t horizon, double tol,
                 const std::string& out_prefix, const std::string& format) {
  const MatrixSequence seq = io::sequence_from_json(
      read_json_file(input),
      horizon == 0 ? std::nullopt : std::optional<std::size_t>(horizon));
  std::vector<double> v0 = parse_vector_arg(x0_arg);
  if (v0.size() != seq.dimension()) {
    throw input_error("initial vector length does not match sequence dimension");
  }

  RunOptions opt;
  opt.horizon = horizon;
  opt.tol = tol;

  json report;
  std::ostringstream trace_csv;
  json trace_json;
  if (process == "consensus") {
    const ConsensusRun run = run_consensus(seq, v0, opt);
    io::write_opinion_trace_csv(trace_csv, run.trace);
    trace_json = io::opinion_trace_to_json(run.trace);
    report = json{{"process", "consensus"},
                  {"steps", run.trace.back().t},
                  {"final", run.trace.back().x},
                  {"cluster_report", io::cluster_report_to_json(run.report)}};
  } else if (process == "markov") {
    try {
      validate_distribution(v0);
    } catch (const std::invalid_argument& e) {
      throw input_error(e.what());
    }
    const MarkovRun run = run_markov(seq, v0, opt);
    io::write_distribution_trace_csv(trace_csv, run.trace);
    trace_json = io::distribution_trace_to_json(run.trace);
    report = json{{"process", "markov"},
                  {"steps", run.trace.back().t},
                  {"final", run.trace.back().p},
                  {"cluster_report", io::cluster_report_to_json(run.report)}};
  } else {
    throw input_error("process must be consensus or markov");
  }

  if (format == "csv") {
    write_text_file(out_prefix + ".csv", trace_csv.str());
  } else if (format == "json") {
    write_text_file(out_prefix + ".json", trace_json.dump(2) + "\n");
  } else {
    throw input_error("format must be csv or json");
  }
  write_text_file(out_prefix + ".report.json", report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_segment(const std::string& input, std::size_t horizon,
                const std::string& direction, const std::string& out) {
  const MatrixSequence seq = io::sequence_from_json(
      read_json_file(input),
      horizon == 0 ? std::nullopt : std::optional<std::size_t>(horizon));
  const Direction dir =
      direction == "fwd" ? Direction::forward : Direction::backward;
  if (direction != "fwd" && direction != "bwd") {
    throw input_error("direction must be fwd or bwd");
  }
  const std::size_t h = horizon == 0 ? seq.horizon() : horizon;
  Segmentation seg;
  try {
    seg = segment(seq, dir, h);
  } catch (const std::invalid_argument& e) {
    throw input_error(e.what());
  }

  json j = io::segmentation_to_json(seg);
  j["classes"] = io::partition_to_json(
      communication_classes(seg.segment_pattern));
  if (seg.stabilized) {
    j["gantmacher"] = io::gantmacher_to_json(segment_gantmacher(seg),
                                             seg.segment_pattern);
  }
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
    std::cout << text;
  }
  return 0;
}

int cmd_check(const std::string& input, std::size_t horizon, double tol,
              double delta_floor, const std::string& schedule,
              const std::string& out) {
  const MatrixSequence seq = io::sequence_from_json(
      read_json_file(input),
      horizon == 0 ? std::nullopt : std::optional<std::size_t>(horizon));
  TheoremOptions opt;
  opt.horizon = horizon == 0 ? seq.horizon() : horizon;
  opt.tol = tol;
  if (delta_floor > 0.0) opt.delta_floor = delta_floor;
  if (!schedule.empty()) opt.schedule = parse_schedule_arg(schedule);

  TheoremReport rep;
  try {
    rep = check_theorem(seq, opt);
  } catch (const std::invalid_argument& e) {
    throw input_error(e.what());
  }
  const std::string text = io::theorem_report_to_json(rep).dump(2) + "\n";
  if (!out.empty()) write_text_file(out, text);
  std::cout << text;
  return 0;
}

int cmd_series(const std::string& kind, double a, double delta,
               std::size_t upto, const std::string& out) {
  GapSchedule s;
  s.kind = io::schedule_kind_from_name(kind);
  s.a = a;
  s.delta = delta;
  try {
    validate_schedule(s);
  } catch (const std::invalid_argument& e) {
    throw input_error(e.what());
  }
  if (upto < series_start(s)) {
    throw input_error("upto is below the series start index");
  }

  // Partial-sum table at geometric checkpoints plus the endpoint.
  std::vector<std::size_t> checkpoints;
  for (std::size_t base = 1; base <= upto; base *= 10) {
    for (std::size_t mult : {1, 2, 5}) {
      const std::size_t c = base * mult;
      if (c >= series_start(s) && c <= upto) checkpoints.push_back(c);
    }
  }
  if (checkpoints.empty() || checkpoints.back() != upto) {
    checkpoints.push_back(upto);
  }

  std::ostringstream csv;
  csv << "i,partial_sum\n";
  const double log_delta = std::log(s.delta);
  double sum = 0.0;
  std::size_t i = series_start(s);
  for (std::size_t c : checkpoints) {
    for (; i <= c; ++i) sum += std::exp(log_delta * gap_exponent(s, i));
    csv << c << "," << io::format_full(sum) << "\n";
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(out, csv.str());
  }

  const json j{{"kind", kind},
               {"a", a},
               {"delta", delta},
               {"upto", upto},
               {"partial_sum", sum},
               {"classification",
                classify_schedule(s) == SeriesClass::divergent ? "divergent"
                                                               : "convergent"}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_generate(const std::string& spec_path, std::size_t count,
                 const std::string& out, std::int64_t seed_override) {
  json spec_json = read_json_file(spec_path);
  if (spec_json.contains("generator")) spec_json = spec_json["generator"];
  if (seed_override >= 0) spec_json["seed"] = seed_override;
  const GeneratorSpec spec = io::spec_from_json(spec_json);
  if (count == 0) throw input_error("count must be positive");

  const MatrixSequence seq = make_sequence(spec, count);
  const json j = io::sequence_to_json(seq);
  // Materialized matrices must load back verbatim.
  io::sequence_from_json(j);
  write_text_file(out, j.dump() + "\n");
  std::cout << json{{"written", out},
                    {"n", spec.n},
                    {"count", count}}
                   .dump(2)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"products of row-stochastic matrices with positive diagonals"};
  app.require_subcommand(1);

  std::string input, out, format = "csv", x0_arg, process = "consensus";
  std::string direction = "bwd", schedule, series_kind = "constant";
  std::size_t horizon = 0, upto = 1000;
  double tol = 1e-10, check_tol = 1e-8, delta_floor = 0.0;
  double series_a = 1.0, series_delta = 0.5;
  std::string spec_path;
  std::size_t count = 0;
  std::int64_t seed_override = -1;

  auto* sim = app.add_subcommand("simulate", "run a consensus or Markov process");
  sim->add_option("input", input, "sequence file (JSON)")->required();
  sim->add_option("--x0", x0_arg, "initial vector: comma list or @file")->required();
  sim->add_option("--process", process, "consensus|markov");
  sim->add_option("--horizon", horizon, "number of steps");
  sim->add_option("--tol", tol, "movement tolerance for convergence");
  sim->add_option("--out", out, "output prefix")->default_val("trace");
  sim->add_option("--format", format, "trace format: csv|json");

  auto* seg = app.add_subcommand("segment", "segment an accumulation into saturated windows");
  seg->add_option("input", input, "sequence file (JSON)")->required();
  seg->add_option("--horizon", horizon, "analysis horizon");
  seg->add_option("--direction", direction, "bwd|fwd");
  seg->add_option("--out", out, "report file (JSON); stdout if omitted");

  auto* chk = app.add_subcommand("check", "verify the convergence theorem numerically");
  chk->add_option("input", input, "sequence file (JSON)")->required();
  chk->add_option("--horizon", horizon, "analysis horizon");
  chk->add_option("--tol", check_tol, "residual threshold for the verified flag");
  chk->add_option("--delta-floor", delta_floor, "declared per-factor positive minimum");
  chk->add_option("--schedule", schedule, "known gap schedule kind[:a[:delta]]");
  chk->add_option("--out", out, "report file (JSON); stdout always");

  auto* ser = app.add_subcommand("series", "partial sums of a gap-schedule series");
  ser->add_option("--kind", series_kind, "constant|log|loglog")->required();
  ser->add_option("--a", series_a, "scale (N for constant)");
  ser->add_option("--delta", series_delta, "term base in (0,1)")->required();
  ser->add_option("--upto", upto, "last index of the partial sum");
  ser->add_option("--out", out, "CSV table file; stdout if omitted");

  auto* gen = app.add_subcommand("generate", "materialize a generator spec into a sequence file");
  gen->add_option("--spec", spec_path, "generator spec (JSON)")->required();
  gen->add_option("--count", count, "number of matrices")->required();
  gen->add_option("--out", out, "output sequence file")->required();
  gen->add_option("--seed", seed_override, "override the spec seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      return cmd_simulate(input, x0_arg, process, horizon, tol, out, format);
    }
    if (seg->parsed()) return cmd_segment(input, horizon, direction, out);
    if (chk->parsed()) {
      return cmd_check(input, horizon, check_tol, delta_floor, schedule, out);
    }
    if (ser->parsed()) {
      return cmd_series(series_kind, series_a, series_delta, upto, out);
    }
    if (gen->parsed()) return cmd_generate(spec_path, count, out, seed_override);
  } catch (const stomp::input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
