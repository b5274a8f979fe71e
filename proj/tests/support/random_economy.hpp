#pragma once

// Random fixtures for property tests. Everything here is built from raw
// flows or explicit probabilities, without the library's inverse or solver.

#include <algorithm>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "iochain/graph.hpp"
#include "iochain/io_table.hpp"
#include "iochain/matrix.hpp"

namespace iochain::fixtures {

inline std::vector<std::string> pole_labels(std::size_t n, const std::string& prefix = "P") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

// Flow table with n in [1, max_n] and every final-demand rate at least min_y.
// Final demand is chosen so that value added is nonnegative.
inline FlowTable random_flow_table(std::mt19937_64& rng, std::size_t max_n = 10, double min_y = 0.05,
                                   double sparsity = 0.3) {
  std::uniform_int_distribution<std::size_t> size(1, max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = size(rng);
  Matrix flows(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (unit(rng) >= sparsity) flows(i, j) = 10.0 * unit(rng);
  const Vector r = flows.row_sums();
  const Vector c = flows.col_sums();
  Vector demand(n);
  for (std::size_t i = 0; i < n; ++i)
    demand[i] = std::max(c[i] - r[i], r[i] * min_y / (1.0 - min_y)) + 0.01 + 5.0 * unit(rng);
  return make_flow_table(pole_labels(n), std::move(flows), std::move(demand));
}

// Row-stochastic augmented chain: n transient states in [1, max_n] and one
// absorbing state last. Row i sends y_i >= min_y to the absorbing state.
inline Matrix random_absorbing_chain(std::mt19937_64& rng, std::size_t max_n = 6, double min_y = 0.1) {
  std::uniform_int_distribution<std::size_t> size(1, max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = size(rng);
  Matrix p(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = min_y + (1.0 - min_y) * unit(rng);
    Vector weights(n, 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (unit(rng) >= 0.3) total += (weights[j] = unit(rng));
    if (total == 0.0) {
      p(i, n) = 1.0;
      continue;
    }
    double assigned = 0.0;
    for (std::size_t j = 0; j < n; ++j) assigned += (p(i, j) = (1.0 - y) * weights[j] / total);
    p(i, n) = 1.0 - assigned;
  }
  p(n, n) = 1.0;
  return p;
}

inline Digraph random_digraph(std::mt19937_64& rng, std::size_t max_n) {
  std::uniform_int_distribution<std::size_t> size(1, max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = size(rng);
  const double density = 0.05 + 0.4 * unit(rng);
  BoolMatrix adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (unit(rng) < density) adj.set(i, j);
  return Digraph(pole_labels(n, "v"), std::move(adj));
}

}  // namespace iochain::fixtures
