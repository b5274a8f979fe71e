#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iochain/error.hpp"
#include "iochain/graph.hpp"
#include "iochain/io_table.hpp"
#include "iochain/pipeline.hpp"
#include "iochain/report.hpp"
#include "iochain/simulation.hpp"
#include "iochain/statistics.hpp"

namespace iochain::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kIoError = 2, kNumericalError = 3 };

namespace detail {

// Writes to `path`, or to `fallback` when path is empty or "-".
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw IoError("cannot write '" + path + "'");
    out_ = file_.get();
  }
  std::ostream& stream() { return *out_; }
  void finish() {
    out_->flush();
    if (!*out_) throw IoError("write failed");
  }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

inline std::size_t find_state(const std::vector<std::string>& labels, const std::string& code) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == code) return i;
  throw InputError("unknown pole '" + code + "'");
}

inline std::string sibling_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  const auto stem = p.stem().string();
  return (p.parent_path() / (stem + suffix + ".csv")).string();
}

}  // namespace detail

struct TableFlags {
  std::string input;
  bool transpose = false;
  bool drop_zero_output = false;

  ParseOptions parse_options() const {
    ParseOptions o;
    o.transpose = transpose;
    o.drop_zero_output = drop_zero_output;
    return o;
  }
};

inline void add_table_flags(CLI::App& cmd, TableFlags& f) {
  cmd.add_option("input", f.input, "Flow table CSV")->required();
  cmd.add_flag("--transpose", f.transpose, "Input stores user rows and supplier columns");
  cmd.add_flag("--drop-zero-output", f.drop_zero_output, "Remove zero-output poles with a warning");
}

struct AnalyzeFlags {
  TableFlags table;
  std::string output;
  std::string orientation = "indirect";
  std::size_t top_k = 5;
  double band = kDefaultStructureBand;
};

inline int cmd_analyze(const AnalyzeFlags& f, std::ostream& out) {
  EconomyAnalysis e(read_flow_table(f.table.input, f.table.parse_options()), f.band);
  AnalysisOptions opts;
  opts.orientation = parse_orientation(f.orientation);
  opts.top_k = f.top_k;
  opts.structure_band = f.band;
  const AnalysisReport report = build_report(e, f.table.input, opts);
  detail::Sink sink(f.output, out);
  sink.stream() << to_json(report).dump(2) << '\n';
  sink.finish();
  return kOk;
}

struct GraphFlags {
  TableFlags table;
  std::string orientation = "indirect";
  std::string threshold = "fair";
  std::string dot;
  bool self_loops = false;
};

inline int cmd_graph(const GraphFlags& f, std::ostream& out) {
  const FlowTable t = read_flow_table(f.table.input, f.table.parse_options());
  const AugmentedChain chain = augment(coefficients(t), parse_orientation(f.orientation));
  const Digraph web = adjacency_from_matrix(chain.transition, chain.labels);
  double threshold = 0.0;
  if (f.threshold == "fair") {
    threshold = fair_division_threshold(chain.labels.size());
  } else {
    try {
      std::size_t used = 0;
      threshold = std::stod(f.threshold, &used);
      if (used != f.threshold.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InputError("threshold must be 'fair' or a number, got '" + f.threshold + "'");
    }
  }
  const Digraph essential = essential_flows(web, threshold);
  DotOptions dot;
  dot.self_loops = f.self_loops;
  dot.name = std::string(to_string(chain.orientation)) + "_flows";
  detail::Sink sink(f.dot, out);
  write_dot(sink.stream(), essential, dot);
  sink.finish();
  return kOk;
}

struct SimulateFlags {
  TableFlags table;
  std::string orientation = "indirect";
  std::string start;
  std::size_t walks = 100000;
  std::uint64_t seed = 0x5eed;
  std::size_t step_cap = 1000000;
  std::size_t partitions = 4;
  std::string output;
};

inline int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  const FlowTable t = read_flow_table(f.table.input, f.table.parse_options());
  const CoefficientSet c = coefficients(t);
  const Orientation orientation = parse_orientation(f.orientation);
  const AugmentedChain chain = augment(c, orientation);
  const std::size_t start = detail::find_state(chain.labels, f.start);
  if (start == chain.absorbing_index)
    throw NotTransientStart("'" + f.start + "' is the absorbing state; start from a pole");
  const ChainAnalysis analysis(c);

  SimulationConfig cfg;
  cfg.n_walks = f.walks;
  cfg.seed = f.seed;
  cfg.step_cap = f.step_cap;
  cfg.partitions = f.partitions;
  const WalkStats stats = simulate(chain, start, cfg);
  const ComparisonReport cmp = compare(stats, analysis, orientation, chain.labels);

  Json j{{"source", f.table.input},
         {"orientation", to_string(orientation)},
         {"simulation", to_json(stats, chain.labels)},
         {"comparison", to_json(cmp)}};
  detail::Sink sink(f.output, out);
  sink.stream() << j.dump(2) << '\n';
  sink.finish();
  return kOk;
}

struct BenchFlags {
  std::string panel;
  std::string summary_override;
  std::vector<std::string> exclude;
  std::vector<std::string> fields{"growth_rate", "lambda_star", "max_t"};
  std::string out;
  std::string corr_out;
  std::string scatter_out;
  double band = kDefaultStructureBand;
};

/**
 * Builds the panel (override rows first, then any tables listed in the
 * panel index that the override does not cover), writes the summary, then
 * the correlation matrix and scatter data. Any country failure or a failed
 * correlation step yields exit code 1 after everything else is written.
 */
inline int cmd_bench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
  if (f.panel.empty() && f.summary_override.empty())
    throw InputError("bench needs a panel CSV or --summary-override");

  std::vector<PanelRow> rows;
  std::set<std::string> covered;
  if (!f.summary_override.empty()) {
    std::ifstream in(f.summary_override);
    if (!in) throw IoError("cannot open '" + f.summary_override + "'");
    for (auto& r : read_panel_summary(in)) {
      covered.insert(r.country);
      rows.push_back(std::move(r));
    }
  }

  bool failed = false;
  if (!f.panel.empty()) {
    std::ifstream in(f.panel);
    if (!in) throw IoError("cannot open '" + f.panel + "'");
    const auto entries = read_panel_index(in);
    const auto base = std::filesystem::path(f.panel).parent_path();
    std::vector<std::pair<PanelEntry, std::future<PanelRow>>> jobs;
    for (const auto& entry : entries) {
      if (covered.contains(entry.country)) continue;
      auto path = std::filesystem::path(entry.table_path);
      if (path.is_relative()) path = base / path;
      jobs.emplace_back(entry, std::async(std::launch::async, [entry, path, band = f.band] {
                          EconomyAnalysis e(read_flow_table(path.string()), band);
                          return summarize_country(entry.country, entry.growth_rate, e);
                        }));
    }
    for (auto& [entry, job] : jobs) {
      try {
        rows.push_back(job.get());
      } catch (const std::exception& ex) {
        failed = true;
        err << "country " << entry.country << ": " << ex.what() << '\n';
      }
    }
  }

  {
    detail::Sink sink(f.out, out);
    write_panel_summary(sink.stream(), rows);
    sink.finish();
  }

  std::vector<PanelField> fields;
  for (const auto& name : f.fields) fields.push_back(parse_panel_field(name));
  const std::set<std::string> exclude(f.exclude.begin(), f.exclude.end());
  try {
    const CorrelationMatrix m = panel_correlate(rows, fields, exclude);
    const std::string corr_path =
        !f.corr_out.empty() ? f.corr_out : (f.out.empty() || f.out == "-" ? "-" : detail::sibling_path(f.out, "_correlation"));
    const std::string scatter_path =
        !f.scatter_out.empty() ? f.scatter_out : (f.out.empty() || f.out == "-" ? "" : detail::sibling_path(f.out, "_scatter"));
    {
      detail::Sink sink(corr_path, out);
      write_correlations(sink.stream(), m);
      sink.finish();
    }
    if (!scatter_path.empty()) {
      detail::Sink sink(scatter_path, out);
      write_scatter(sink.stream(), rows, m);
      sink.finish();
    }
  } catch (const InputError& ex) {
    err << "correlation: " << ex.what() << '\n';
    return kInputError;
  }
  return failed ? kInputError : kOk;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Input-output tables as absorbing Markov chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  AnalyzeFlags analyze;
  auto* a = app.add_subcommand("analyze", "Full analysis report (JSON)");
  add_table_flags(*a, analyze.table);
  a->add_option("-o,--output", analyze.output, "Report path (default stdout)");
  a->add_option("--orientation", analyze.orientation, "Chain used for components: direct|indirect")
      ->check(CLI::IsMember({"direct", "indirect"}));
  a->add_option("--top-k", analyze.top_k, "Number of extreme sensitivities reported");
  a->add_option("--band", analyze.band, "Half-width of the fair-division band");

  GraphFlags graph;
  auto* g = app.add_subcommand("graph", "Essential-flow web (DOT)");
  add_table_flags(*g, graph.table);
  g->add_option("--orientation", graph.orientation, "direct|indirect")
      ->check(CLI::IsMember({"direct", "indirect"}));
  g->add_option("--threshold", graph.threshold, "'fair' (1/(n+1)) or a number in (0, 1]");
  g->add_option("--dot", graph.dot, "DOT output path (default stdout)");
  g->add_flag("--self-loops", graph.self_loops, "Keep self-loops in the DOT output");

  SimulateFlags sim;
  auto* s = app.add_subcommand("simulate", "Monte-Carlo check of absorption times and visits (JSON)");
  add_table_flags(*s, sim.table);
  s->add_option("--start", sim.start, "Pole code of the start state")->required();
  s->add_option("--walks", sim.walks, "Number of walks");
  s->add_option("--seed", sim.seed, "Random seed");
  s->add_option("--step-cap", sim.step_cap, "Steps after which a walk is censored");
  s->add_option("--partitions", sim.partitions, "Independent random streams (worker threads)");
  s->add_option("--orientation", sim.orientation, "direct|indirect")
      ->check(CLI::IsMember({"direct", "indirect"}));
  s->add_option("-o,--output", sim.output, "Output path (default stdout)");

  BenchFlags bench;
  auto* b = app.add_subcommand("bench", "Cross-country panel summary and correlations (CSV)");
  b->add_option("panel", bench.panel, "Panel CSV: country,growth_rate,table_path");
  b->add_option("--summary-override", bench.summary_override, "Precomputed summary rows (summary CSV format)");
  b->add_option("--exclude", bench.exclude, "Country codes left out of the correlations")->delimiter(',');
  b->add_option("--fields", bench.fields, "Fields to correlate")->delimiter(',');
  b->add_option("--out", bench.out, "Summary CSV path (default stdout)");
  b->add_option("--corr-out", bench.corr_out, "Correlation CSV path (default <out>_correlation.csv)");
  b->add_option("--scatter-out", bench.scatter_out, "Scatter CSV path (default <out>_scatter.csv)");
  b->add_option("--band", bench.band, "Half-width of the fair-division band");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kInputError;
  }

  try {
    if (a->parsed()) return cmd_analyze(analyze, out);
    if (g->parsed()) return cmd_graph(graph, out);
    if (s->parsed()) return cmd_simulate(sim, out);
    if (b->parsed()) return cmd_bench(bench, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace iochain::cli
