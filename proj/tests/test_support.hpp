#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "coordsim/digraph.hpp"

namespace coordsim::testing {

/// Seeded random digraph: order in [2, max_n], each ordered pair present
/// with a per-graph probability drawn from [0.05, 0.6].
inline Digraph random_digraph(std::mt19937_64& rng, int max_n = 8) {
  std::uniform_int_distribution<int> order(2, max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = order(rng);
  const double p = 0.05 + 0.55 * unit(rng);
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i != j && unit(rng) < p) edges.push_back({i, j});
    }
  }
  return Digraph(n, std::move(edges));
}

/// Random family of `m` digraphs on n nodes whose union is connected while
/// (with high probability) the members are not.
inline std::vector<Digraph> random_joint_family(std::mt19937_64& rng, int n, int m) {
  // random spanning tree rooted at node 1, edges dealt round-robin to members
  std::vector<int> order(n - 1);
  for (int i = 0; i < n - 1; ++i) order[i] = i + 2;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<Edge>> parts(m);
  std::vector<int> placed{1};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, placed.size() - 1);
    const int parent = placed[pick(rng)];
    parts[k % m].push_back({order[k], parent});
    placed.push_back(order[k]);
  }
  std::vector<Digraph> out;
  for (auto& p : parts) out.emplace_back(n, std::move(p));
  return out;
}

}  // namespace coordsim::testing
