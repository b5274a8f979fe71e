#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iochain/error.hpp"
#include "iochain/matrix.hpp"

namespace iochain {

/// Square boolean matrix stored as bytes.
class BoolMatrix {
public:
  explicit BoolMatrix(std::size_t n = 0, bool fill = false) : n_(n), bits_(n * n, fill ? 1 : 0) {}

  std::size_t size() const noexcept { return n_; }
  bool operator()(std::size_t i, std::size_t j) const noexcept { return bits_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v = true) noexcept { bits_[i * n_ + j] = v ? 1 : 0; }

  friend bool operator==(const BoolMatrix&, const BoolMatrix&) = default;

private:
  std::size_t n_;
  std::vector<std::uint8_t> bits_;
};

/**
 * Weighted digraph over labelled vertices.
 *
 * When weights are present they are zero wherever there is no arc.
 */
class Digraph {
public:
  Digraph(std::vector<std::string> labels, BoolMatrix adjacency,
          std::optional<Matrix> weights = std::nullopt)
      : labels_(std::move(labels)), adjacency_(std::move(adjacency)), weights_(std::move(weights)) {
    if (adjacency_.size() != labels_.size())
      throw DimensionMismatch("adjacency size does not match label count");
    std::set<std::string> seen;
    for (const auto& l : labels_)
      if (!seen.insert(l).second) throw ValidationError("duplicate vertex label '" + l + "'");
    if (weights_) {
      if (weights_->rows() != size() || weights_->cols() != size())
        throw DimensionMismatch("weight matrix does not match vertex count");
      for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = 0; j < size(); ++j)
          if (!adjacency_(i, j)) (*weights_)(i, j) = 0.0;
    }
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const BoolMatrix& adjacency() const noexcept { return adjacency_; }
  const std::optional<Matrix>& weights() const noexcept { return weights_; }
  bool has_arc(std::size_t i, std::size_t j) const noexcept { return adjacency_(i, j); }

  std::size_t arc_count() const noexcept {
    std::size_t c = 0;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j) c += adjacency_(i, j) ? 1 : 0;
    return c;
  }

  std::vector<std::size_t> successors(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < size(); ++j)
      if (adjacency_(v, j)) out.push_back(j);
    return out;
  }

private:
  std::vector<std::string> labels_;
  BoolMatrix adjacency_;
  std::optional<Matrix> weights_;
};

/// Arc i->j iff weights(i,j) > tol.
inline Digraph adjacency_from_matrix(const Matrix& weights, std::vector<std::string> labels,
                                     double tol = 0.0) {
  if (!weights.is_square()) throw DimensionMismatch("weight matrix must be square");
  if (labels.size() != weights.rows())
    throw DimensionMismatch("expected " + std::to_string(weights.rows()) + " labels, got " +
                            std::to_string(labels.size()));
  BoolMatrix adj(weights.rows());
  for (std::size_t i = 0; i < weights.rows(); ++i)
    for (std::size_t j = 0; j < weights.cols(); ++j) {
      if (weights(i, j) < 0.0) throw InputError("arc weights must be nonnegative");
      adj.set(i, j, weights(i, j) > tol);
    }
  return Digraph(std::move(labels), std::move(adj), weights);
}

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

struct ReachabilitySummary {
  BoolMatrix accessibility;  // R, reflexive
  std::vector<std::size_t> distance;  // D, row-major; kUnreachable marks no path

  std::size_t dist(std::size_t i, std::size_t j) const noexcept {
    return distance[i * accessibility.size() + j];
  }
};

/// Accessibility by Warshall closure, distances by BFS from every source.
inline ReachabilitySummary accessibility(const Digraph& g) {
  const std::size_t n = g.size();
  ReachabilitySummary out{BoolMatrix(n), std::vector<std::size_t>(n * n, kUnreachable)};
  BoolMatrix& r = out.accessibility;
  for (std::size_t i = 0; i < n; ++i) {
    r.set(i, i);
    for (std::size_t j = 0; j < n; ++j)
      if (g.has_arc(i, j)) r.set(i, j);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (!r(i, k)) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (r(k, j)) r.set(i, j);
    }

  for (std::size_t s = 0; s < n; ++s) {
    std::size_t* row = out.distance.data() + s * n;
    row[s] = 0;
    std::queue<std::size_t> frontier;
    frontier.push(s);
    while (!frontier.empty()) {
      const std::size_t v = frontier.front();
      frontier.pop();
      for (std::size_t w = 0; w < n; ++w) {
        if (!g.has_arc(v, w) || row[w] != kUnreachable) continue;
        row[w] = row[v] + 1;
        frontier.push(w);
      }
    }
  }
  return out;
}

struct ComponentPartition {
  std::vector<std::size_t> component_of;
  std::vector<std::vector<std::size_t>> components;  // each sorted; ordered by smallest member
  Digraph condensation;
};

namespace detail {

// Iterative Tarjan; returns a raw component id per vertex.
inline std::vector<std::size_t> tarjan_ids(const Digraph& g) {
  const std::size_t n = g.size();
  constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (vertex, next successor to try)
  std::size_t counter = 0, next_comp = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next == 0 && index[v] == unvisited) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (next < n) {
        const std::size_t w = next++;
        if (!g.has_arc(v, w)) continue;
        if (index[w] == unvisited) {
          call.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;

      const std::size_t done = v;
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
        } while (w != done);
        ++next_comp;
      }
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  return comp;
}

}  // namespace detail

/**
 * Builds a canonical partition from any per-vertex class labelling:
 * components are numbered by their smallest member and the condensation
 * carries one vertex per component (label = member labels joined by '+').
 */
inline ComponentPartition partition_from_ids(const Digraph& g, const std::vector<std::size_t>& raw) {
  const std::size_t n = g.size();
  std::vector<std::size_t> remap(n, kUnreachable);
  ComponentPartition out{std::vector<std::size_t>(n), {}, Digraph({}, BoolMatrix(0))};
  for (std::size_t v = 0; v < n; ++v) {
    if (remap[raw[v]] == kUnreachable) {
      remap[raw[v]] = out.components.size();
      out.components.emplace_back();
    }
    out.component_of[v] = remap[raw[v]];
    out.components[out.component_of[v]].push_back(v);
  }

  const std::size_t k = out.components.size();
  std::vector<std::string> labels;
  labels.reserve(k);
  for (const auto& members : out.components) {
    std::string label;
    for (std::size_t v : members) {
      if (!label.empty()) label += '+';
      label += g.labels()[v];
    }
    labels.push_back(std::move(label));
  }
  BoolMatrix adj(k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g.has_arc(i, j) && out.component_of[i] != out.component_of[j])
        adj.set(out.component_of[i], out.component_of[j]);
  out.condensation = Digraph(std::move(labels), std::move(adj));
  return out;
}

/// Strong components (Tarjan) and the condensation digraph.
inline ComponentPartition strong_components(const Digraph& g) {
  return partition_from_ids(g, detail::tarjan_ids(g));
}

/// Kahn's algorithm; empty optional when the graph has a cycle (self-loops count).
inline std::optional<std::vector<std::size_t>> topological_order(const Digraph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g.has_arc(i, j)) ++indegree[j];
  std::vector<std::size_t> ready, order;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    const std::size_t v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (std::size_t w = 0; w < n; ++w)
      if (g.has_arc(v, w) && --indegree[w] == 0) ready.push_back(w);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

enum class StateKind { transient, recurrent, absorbing };

inline const char* to_string(StateKind k) {
  switch (k) {
    case StateKind::transient: return "transient";
    case StateKind::recurrent: return "recurrent";
    case StateKind::absorbing: return "absorbing";
  }
  return "transient";
}

struct StateClassification {
  std::vector<StateKind> kinds;
  std::vector<std::vector<std::size_t>> closed_sets;

  std::vector<std::size_t> states_of(StateKind k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < kinds.size(); ++i)
      if (kinds[i] == k) out.push_back(i);
    return out;
  }
};

/**
 * Transient/recurrent/absorbing classification of a Markov chain given as
 * a weighted digraph. Recurrent states are exactly the members of closed
 * strong components; an absorbing state is a closed singleton whose
 * self-loop carries probability one.
 */
inline StateClassification classify_states(const Digraph& g, double tol = 1e-9) {
  if (!g.weights()) throw NotStochastic("state classification needs transition probabilities");
  const Matrix& p = *g.weights();
  const Vector sums = p.row_sums();
  for (std::size_t i = 0; i < sums.size(); ++i)
    if (std::abs(sums[i] - 1.0) > tol)
      throw NotStochastic("row '" + g.labels()[i] + "' sums to " + std::to_string(sums[i]));

  const ComponentPartition parts = strong_components(g);
  StateClassification out{std::vector<StateKind>(g.size(), StateKind::transient), {}};
  for (std::size_t c = 0; c < parts.components.size(); ++c) {
    const bool closed = parts.condensation.successors(c).empty();
    if (!closed) continue;
    const auto& members = parts.components[c];
    out.closed_sets.push_back(members);
    for (std::size_t v : members) out.kinds[v] = StateKind::recurrent;
    if (members.size() == 1 && std::abs(p(members[0], members[0]) - 1.0) <= tol)
      out.kinds[members[0]] = StateKind::absorbing;
  }
  return out;
}

/// Keeps arcs whose weight strictly exceeds the threshold.
inline Digraph essential_flows(const Digraph& g, double threshold) {
  if (!g.weights()) throw InputError("essential_flows needs a weighted graph");
  if (!(threshold > 0.0) || threshold > 1.0)
    throw InputError("essential-flow threshold must lie in (0, 1]");
  const Matrix& w = *g.weights();
  BoolMatrix adj(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) adj.set(i, j, g.has_arc(i, j) && w(i, j) > threshold);
  return Digraph(g.labels(), std::move(adj), w);
}

/// The fair-division threshold 1/(state count).
inline double fair_division_threshold(std::size_t state_count) {
  return 1.0 / static_cast<double>(state_count);
}

}  // namespace iochain
