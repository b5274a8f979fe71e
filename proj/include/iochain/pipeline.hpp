#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iochain/absorbing_chain.hpp"
#include "iochain/dominance.hpp"
#include "iochain/error.hpp"
#include "iochain/graph.hpp"
#include "iochain/io_table.hpp"
#include "iochain/statistics.hpp"

namespace iochain {

inline constexpr const char* kToolVersion = "0.1.0";

inline FlowTable read_flow_table(const std::string& path, const ParseOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_flow_table(in, opts);
}

struct TimeRow {
  std::string pole;
  double t = 1.0;
  double t_upper = 1.0;  // may be +inf
  double t_lower = 1.0;
  std::optional<double> dt;

  friend bool operator==(const TimeRow&, const TimeRow&) = default;
};

struct ExtremeRow {
  double value = 0.0;
  std::string origin;
  std::string target;

  friend bool operator==(const ExtremeRow&, const ExtremeRow&) = default;
};

struct ComponentRow {
  std::vector<std::string> members;
  bool closed = false;

  friend bool operator==(const ComponentRow&, const ComponentRow&) = default;
};

struct StateRow {
  std::string state;
  std::string kind;

  friend bool operator==(const StateRow&, const StateRow&) = default;
};

/// Everything `analyze` reports for one table.
struct AnalysisReport {
  // metadata
  std::string source;
  std::size_t pole_count = 0;
  std::string orientation = "indirect";
  std::string version = kToolVersion;
  // spectral
  double lambda_star = 0.0;
  double gap = 1.0;
  double t_rel = 1.0;
  double node_min = 0.0;
  double node_mean = 0.0;
  double node_max = 0.0;
  std::optional<double> f_value;
  std::optional<std::string> structure;
  // local view
  std::string transformation_pole;
  std::string outlet_pole;
  std::vector<TimeRow> times;
  std::string sensitivity_kind = to_string(SensitivityKind::output_wrt_final_demand);
  std::vector<ExtremeRow> top;
  std::vector<ExtremeRow> bottom;
  std::vector<ComponentRow> components;
  std::vector<StateRow> states;
  std::vector<std::string> diagnostics;

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

struct AnalysisOptions {
  Orientation orientation = Orientation::indirect;  // chain used for components and states
  std::size_t top_k = 5;
  double structure_band = kDefaultStructureBand;
  SensitivityKind sensitivity = SensitivityKind::output_wrt_final_demand;
};

/// Results of the full pipeline on one table, kept together for reuse.
struct EconomyAnalysis {
  FlowTable table;
  CoefficientSet coefficients;
  ChainAnalysis chain;
  SpectralSummary spectral;

  explicit EconomyAnalysis(FlowTable t, double band = kDefaultStructureBand)
      : table(std::move(t)),
        coefficients(iochain::coefficients(table)),
        chain(coefficients),
        spectral(spectral_summary(coefficients, band)) {}
};

inline AnalysisReport build_report(const EconomyAnalysis& e, const std::string& source,
                                   const AnalysisOptions& opts = {}) {
  const auto& poles = e.coefficients.poles;
  AnalysisReport r;
  r.source = source;
  r.pole_count = poles.size();
  r.orientation = to_string(opts.orientation);
  r.lambda_star = e.spectral.lambda_star;
  r.gap = e.spectral.gap;
  r.t_rel = e.spectral.t_rel;
  r.node_min = e.spectral.nodes.low;
  r.node_mean = e.spectral.nodes.mean;
  r.node_max = e.spectral.nodes.high;
  r.f_value = e.spectral.f_value;
  if (e.spectral.structure) r.structure = to_string(*e.spectral.structure);

  const auto& chain = e.chain;
  r.transformation_pole = poles[chain.bounds().transformation_pole];
  r.outlet_pole = poles[chain.bounds().outlet_pole];
  for (std::size_t i = 0; i < poles.size(); ++i)
    r.times.push_back({poles[i], chain.t()[i], chain.t_upper()[i], chain.t_lower()[i], chain.dt_ratio()[i]});

  r.sensitivity_kind = to_string(opts.sensitivity);
  auto to_rows = [&](const std::vector<SensitivityEntry>& entries) {
    std::vector<ExtremeRow> rows;
    for (const auto& s : entries) rows.push_back({s.value, poles[s.origin], poles[s.target]});
    return rows;
  };
  r.top = to_rows(extreme_sensitivities(chain, opts.sensitivity, opts.top_k, true));
  r.bottom = to_rows(extreme_sensitivities(chain, opts.sensitivity, opts.top_k, false));

  const AugmentedChain augmented = augment(e.coefficients, opts.orientation);
  const Digraph web = adjacency_from_matrix(augmented.transition, augmented.labels);
  const ComponentPartition parts = strong_components(web);
  for (std::size_t c = 0; c < parts.components.size(); ++c) {
    ComponentRow row;
    for (std::size_t v : parts.components[c]) row.members.push_back(web.labels()[v]);
    row.closed = parts.condensation.successors(c).empty();
    r.components.push_back(std::move(row));
  }
  const StateClassification states = classify_states(web);
  for (std::size_t v = 0; v < web.size(); ++v) r.states.push_back({web.labels()[v], to_string(states.kinds[v])});

  r.diagnostics = e.table.diagnostics;
  return r;
}

/// Panel summary of one country from its flow table.
inline PanelRow summarize_country(const std::string& country, double growth_rate, const EconomyAnalysis& e) {
  PanelRow row;
  row.country = country;
  row.growth_rate = growth_rate;
  row.lambda_star = e.spectral.lambda_star;
  row.t_rel = e.spectral.t_rel;
  row.node_max = e.spectral.nodes.high;
  row.node_mean = e.spectral.nodes.mean;
  row.node_min = e.spectral.nodes.low;
  row.f_value = e.spectral.f_value;
  const Vector& t = e.chain.t();
  const auto hi = static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin());
  const auto lo = static_cast<std::size_t>(std::min_element(t.begin(), t.end()) - t.begin());
  row.max_t = t[hi];
  row.argmax_t = e.coefficients.poles[hi];
  row.min_t = t[lo];
  row.argmin_t = e.coefficients.poles[lo];
  return row;
}

}  // namespace iochain
