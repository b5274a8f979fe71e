#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iochain/error.hpp"
#include "iochain/graph.hpp"
#include "iochain/io_table.hpp"
#include "iochain/pipeline.hpp"
#include "iochain/simulation.hpp"
#include "iochain/statistics.hpp"

namespace iochain {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that reads back to the same double; "inf" for +infinity.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline Json number_or_inf(double v) {
  if (std::isnan(v)) throw NumericalError("refusing to serialise NaN");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double read_number_or_inf(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw InputError("unexpected numeric token '" + s + "'");
  }
  return j.get<double>();
}

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json extremes_json(const std::vector<ExtremeRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows)
    arr.push_back(Json{{"value", number_or_inf(r.value)}, {"origin", r.origin}, {"target", r.target}});
  return arr;
}

inline std::vector<ExtremeRow> extremes_from_json(const Json& arr) {
  std::vector<ExtremeRow> rows;
  for (const auto& r : arr)
    rows.push_back({read_number_or_inf(r.at("value")), r.at("origin").get<std::string>(),
                    r.at("target").get<std::string>()});
  return rows;
}

}  // namespace detail

inline Json to_json(const AnalysisReport& r) {
  Json j;
  j["metadata"] = {{"source", r.source},
                   {"poles", r.pole_count},
                   {"orientation", r.orientation},
                   {"version", r.version}};
  j["spectral"] = {{"lambda_star", detail::number_or_inf(r.lambda_star)},
                   {"gap", detail::number_or_inf(r.gap)},
                   {"t_rel", detail::number_or_inf(r.t_rel)},
                   {"node_min", r.node_min},
                   {"node_mean", r.node_mean},
                   {"node_max", r.node_max},
                   {"f_value", detail::optional_json(r.f_value)},
                   {"structure", detail::optional_json(r.structure)}};
  Json times = Json::array();
  for (const auto& t : r.times)
    times.push_back(Json{{"pole", t.pole},
                         {"t", detail::number_or_inf(t.t)},
                         {"t_upper", detail::number_or_inf(t.t_upper)},
                         {"t_lower", detail::number_or_inf(t.t_lower)},
                         {"dt", detail::optional_json(t.dt)}});
  j["times"] = {{"transformation_pole", r.transformation_pole},
                {"outlet_pole", r.outlet_pole},
                {"poles", std::move(times)}};
  j["sensitivity_extremes"] = {{"kind", r.sensitivity_kind},
                               {"top", detail::extremes_json(r.top)},
                               {"bottom", detail::extremes_json(r.bottom)}};
  Json comps = Json::array();
  for (const auto& c : r.components) comps.push_back(Json{{"members", c.members}, {"closed", c.closed}});
  j["components"] = std::move(comps);
  Json states = Json::array();
  for (const auto& s : r.states) states.push_back(Json{{"state", s.state}, {"kind", s.kind}});
  j["states"] = std::move(states);
  j["diagnostics"] = r.diagnostics;
  return j;
}

inline AnalysisReport report_from_json(const Json& j) {
  AnalysisReport r;
  const auto& meta = j.at("metadata");
  r.source = meta.at("source").get<std::string>();
  r.pole_count = meta.at("poles").get<std::size_t>();
  r.orientation = meta.at("orientation").get<std::string>();
  r.version = meta.at("version").get<std::string>();
  const auto& s = j.at("spectral");
  r.lambda_star = detail::read_number_or_inf(s.at("lambda_star"));
  r.gap = detail::read_number_or_inf(s.at("gap"));
  r.t_rel = detail::read_number_or_inf(s.at("t_rel"));
  r.node_min = s.at("node_min").get<double>();
  r.node_mean = s.at("node_mean").get<double>();
  r.node_max = s.at("node_max").get<double>();
  if (!s.at("f_value").is_null()) r.f_value = s.at("f_value").get<double>();
  if (!s.at("structure").is_null()) r.structure = s.at("structure").get<std::string>();
  const auto& times = j.at("times");
  r.transformation_pole = times.at("transformation_pole").get<std::string>();
  r.outlet_pole = times.at("outlet_pole").get<std::string>();
  for (const auto& t : times.at("poles")) {
    TimeRow row{t.at("pole").get<std::string>(), detail::read_number_or_inf(t.at("t")),
                detail::read_number_or_inf(t.at("t_upper")), detail::read_number_or_inf(t.at("t_lower")),
                std::nullopt};
    if (!t.at("dt").is_null()) row.dt = t.at("dt").get<double>();
    r.times.push_back(std::move(row));
  }
  const auto& sens = j.at("sensitivity_extremes");
  r.sensitivity_kind = sens.at("kind").get<std::string>();
  r.top = detail::extremes_from_json(sens.at("top"));
  r.bottom = detail::extremes_from_json(sens.at("bottom"));
  for (const auto& c : j.at("components"))
    r.components.push_back({c.at("members").get<std::vector<std::string>>(), c.at("closed").get<bool>()});
  for (const auto& st : j.at("states"))
    r.states.push_back({st.at("state").get<std::string>(), st.at("kind").get<std::string>()});
  r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  return r;
}

inline Json to_json(const WalkStats& w, const std::vector<std::string>& labels) {
  auto label = [&](std::size_t s) { return s < labels.size() ? labels[s] : std::to_string(s); };
  Json visits = Json::array();
  for (std::size_t k = 0; k < w.transient.size(); ++k)
    visits.push_back(Json{{"state", label(w.transient[k])},
                          {"mean", w.mean_visits[k]},
                          {"stderr", w.stderr_visits[k]}});
  Json absorb = Json::array();
  for (std::size_t k = 0; k < w.absorbing.size(); ++k)
    absorb.push_back(Json{{"state", label(w.absorbing[k])}, {"frequency", w.absorb_freq[k]}});
  return Json{{"start", label(w.start_state)},
              {"walks", w.n_walks},
              {"seed", w.seed},
              {"partitions", w.partitions},
              {"mean_steps", w.mean_steps},
              {"stderr_steps", w.stderr_steps},
              {"visits", std::move(visits)},
              {"absorption", std::move(absorb)},
              {"censored", w.censored}};
}

inline Json to_json(const ComparisonReport& c) {
  Json scores = Json::array();
  for (const auto& z : c.scores)
    scores.push_back(Json{{"quantity", z.quantity},
                          {"empirical", z.empirical},
                          {"analytic", z.analytic},
                          {"stderr", z.stderr_value},
                          {"z", detail::number_or_inf(z.z)},
                          {"flagged", z.flagged}});
  return Json{{"z_limit", c.z_limit},
              {"censored", c.censored},
              {"flagged", c.flagged_count()},
              {"certified", c.certified()},
              {"scores", std::move(scores)}};
}

/// Writes a table in the CSV layout read by parse_flow_table, W row included.
inline void write_flow_table(std::ostream& out, const FlowTable& t) {
  out << "pole";
  for (const auto& p : t.poles) out << ',' << p;
  out << ",Y\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << t.poles[i];
    for (std::size_t j = 0; j < t.size(); ++j) out << ',' << format_number(t.flows(i, j));
    out << ',' << format_number(t.final_demand[i]) << '\n';
  }
  out << 'W';
  for (double w : t.value_added) out << ',' << format_number(w);
  out << ",\n";
}

// --- DOT -------------------------------------------------------------------

struct DotOptions {
  bool self_loops = false;
  std::string name = "flows";
  std::string absorbing_label = kFinalExpenditureLabel;
};

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace detail

/// One node per state, one edge per arc labelled with its weight to 6 decimals.
inline std::size_t write_dot(std::ostream& out, const Digraph& g, const DotOptions& opts = {}) {
  out << "digraph " << detail::dot_quote(opts.name) << " {\n";
  out << "  rankdir=LR;\n";
  for (const auto& label : g.labels()) {
    out << "  " << detail::dot_quote(label);
    if (label == opts.absorbing_label) out << " [shape=doublecircle]";
    out << ";\n";
  }
  std::size_t edges = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!g.has_arc(i, j) || (i == j && !opts.self_loops)) continue;
      out << "  " << detail::dot_quote(g.labels()[i]) << " -> " << detail::dot_quote(g.labels()[j]);
      if (g.weights()) {
        std::ostringstream w;
        w << std::fixed << std::setprecision(6) << (*g.weights())(i, j);
        out << " [label=\"" << w.str() << "\"]";
      }
      out << ";\n";
      ++edges;
    }
  out << "}\n";
  return edges;
}

// --- panel CSV ---------------------------------------------------------------

inline const char* kPanelSummaryHeader =
    "country,growth_rate,lambda_star,t_rel,node_max,node_mean,node_min,f_value,max_t,argmax_t,min_t,argmin_t";

inline void write_panel_summary(std::ostream& out, const std::vector<PanelRow>& rows) {
  out << kPanelSummaryHeader << '\n';
  for (const auto& r : rows)
    out << r.country << ',' << format_number(r.growth_rate) << ',' << format_number(r.lambda_star) << ','
        << format_number(r.t_rel) << ',' << format_number(r.node_max) << ',' << format_number(r.node_mean)
        << ',' << format_number(r.node_min) << ',' << (r.f_value ? format_number(*r.f_value) : "") << ','
        << format_number(r.max_t) << ',' << r.argmax_t << ',' << format_number(r.min_t) << ','
        << r.argmin_t << '\n';
}

inline std::vector<PanelRow> read_panel_summary(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  std::vector<PanelRow> rows;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    if (detail::is_blank(raw)) continue;
    const auto cells = detail::split_csv_line(raw);
    if (!header_seen) {
      header_seen = true;
      if (cells.empty() || cells.front() != "country")
        throw ParseError(line, 1, "summary header must start with 'country'");
      if (cells.size() != 12) throw ParseError(line, cells.size(), "summary header needs 12 columns");
      continue;
    }
    if (cells.size() != 12) throw ParseError(line, cells.size(), "summary row needs 12 columns");
    PanelRow r;
    r.country = cells[0];
    r.growth_rate = detail::parse_number(cells[1], line, 2);
    r.lambda_star = detail::parse_number(cells[2], line, 3);
    r.t_rel = detail::parse_number(cells[3], line, 4);
    r.node_max = detail::parse_number(cells[4], line, 5);
    r.node_mean = detail::parse_number(cells[5], line, 6);
    r.node_min = detail::parse_number(cells[6], line, 7);
    if (!cells[7].empty()) r.f_value = detail::parse_number(cells[7], line, 8);
    r.max_t = detail::parse_number(cells[8], line, 9);
    r.argmax_t = cells[9];
    r.min_t = detail::parse_number(cells[10], line, 11);
    r.argmin_t = cells[11];
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError(line, 1, "empty summary file");
  return rows;
}

struct PanelEntry {
  std::string country;
  double growth_rate = 0.0;
  std::string table_path;  // may be empty when the summary comes from an override
};

/// Panel index: `country,growth_rate,table_path`.
inline std::vector<PanelEntry> read_panel_index(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  std::vector<PanelEntry> out;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    if (detail::is_blank(raw)) continue;
    const auto cells = detail::split_csv_line(raw);
    if (!header_seen) {
      header_seen = true;
      if (cells.size() != 3 || cells[0] != "country" || cells[1] != "growth_rate" || cells[2] != "table_path")
        throw ParseError(line, 1, "panel header must read 'country,growth_rate,table_path'");
      continue;
    }
    if (cells.size() != 3) throw ParseError(line, cells.size(), "panel row needs 3 columns");
    out.push_back({cells[0], detail::parse_number(cells[1], line, 2), cells[2]});
  }
  if (!header_seen) throw ParseError(line, 1, "empty panel file");
  return out;
}

inline void write_correlations(std::ostream& out, const CorrelationMatrix& m) {
  out << "field_x,field_y,r,p_value,n,exact\n";
  for (std::size_t i = 0; i < m.fields.size(); ++i)
    for (std::size_t j = 0; j < m.fields.size(); ++j) {
      const auto& c = m.at(i, j);
      out << to_string(m.fields[i]) << ',' << to_string(m.fields[j]) << ',' << format_number(c.r) << ','
          << format_number(c.p.value) << ',' << c.n << ',' << (c.p.exact ? "true" : "false") << '\n';
    }
}

/// Plot-ready pairs: one line per (field pair, country).
inline void write_scatter(std::ostream& out, const std::vector<PanelRow>& rows, const CorrelationMatrix& m) {
  out << "x_field,y_field,x,y,label\n";
  for (std::size_t i = 0; i < m.fields.size(); ++i)
    for (std::size_t j = i + 1; j < m.fields.size(); ++j)
      for (const auto& r : rows) {
        if (std::find(m.countries.begin(), m.countries.end(), r.country) == m.countries.end()) continue;
        out << to_string(m.fields[i]) << ',' << to_string(m.fields[j]) << ','
            << format_number(r.field(m.fields[i])) << ',' << format_number(r.field(m.fields[j])) << ','
            << r.country << '\n';
      }
}

}  // namespace iochain
