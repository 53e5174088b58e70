#include "coordsim/digraph.hpp"

#include <algorithm>
#include <string>

#include <fmt/format.h>

#include "coordsim/errors.hpp"

namespace coordsim {

Digraph::Digraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 1) {
    throw ArgumentError(fmt::format("digraph order must be >= 1, got {}", n_));
  }
  for (const auto& e : edges_) {
    if (e.receiver < 1 || e.receiver > n_ || e.sender < 1 || e.sender > n_) {
      throw ArgumentError(
          fmt::format("edge ({}, {}) has a node outside 1..{}", e.receiver, e.sender, n_));
    }
    if (e.receiver == e.sender) {
      throw ArgumentError(fmt::format("self-loop ({}, {}) not allowed", e.receiver, e.sender));
    }
  }
  std::sort(edges_.begin(), edges_.end());
  auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw ArgumentError(fmt::format("duplicate edge ({}, {})", dup->receiver, dup->sender));
  }
}

bool Digraph::has_edge(int receiver, int sender) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{receiver, sender});
}

std::vector<int> Digraph::in_neighbors(int i) const {
  std::vector<int> out;
  for (const auto& e : edges_) {
    if (e.receiver == i) out.push_back(e.sender);
  }
  return out;
}

bool Digraph::is_symmetric() const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [this](const Edge& e) { return has_edge(e.sender, e.receiver); });
}

Eigen::MatrixXi adjacency(const Digraph& d) {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(d.size(), d.size());
  for (const auto& e : d.edges()) a(e.receiver - 1, e.sender - 1) = 1;
  return a;
}

Eigen::MatrixXi laplacian(const Digraph& d) {
  const Eigen::MatrixXi a = adjacency(d);
  Eigen::MatrixXi l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

DigraphUnion union_digraphs(std::span<const Digraph> ds) {
  if (ds.empty()) throw ArgumentError("union of an empty digraph list");
  const int n = ds.front().size();
  std::vector<Edge> edges;
  Eigen::MatrixXi summed = Eigen::MatrixXi::Zero(n, n);
  for (const auto& d : ds) {
    if (d.size() != n) {
      throw DimensionError(fmt::format("digraph orders differ: {} vs {}", n, d.size()));
    }
    edges.insert(edges.end(), d.edges().begin(), d.edges().end());
    summed += laplacian(d);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return {Digraph(n, std::move(edges)), std::move(summed)};
}

bool contains_spanning_tree(const Digraph& d) {
  const int n = d.size();
  // out[j] lists receivers of j's transmissions
  std::vector<std::vector<int>> out(n);
  for (const auto& e : d.edges()) out[e.sender - 1].push_back(e.receiver - 1);

  std::vector<int> stack;
  std::vector<char> seen(n);
  for (int root = 0; root < n; ++root) {
    std::fill(seen.begin(), seen.end(), 0);
    seen[root] = 1;
    int reached = 1;
    stack.assign(1, root);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : out[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++reached;
          stack.push_back(v);
        }
      }
    }
    if (reached == n) return true;
  }
  return false;
}

bool jointly_connected(std::span<const Digraph> ds) {
  return contains_spanning_tree(union_digraphs(ds).digraph);
}

Digraph symmetrized(const Digraph& d) {
  std::vector<Edge> edges;
  for (const auto& e : d.edges()) {
    edges.push_back(e);
    edges.push_back({e.sender, e.receiver});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return Digraph(d.size(), std::move(edges));
}

}  // namespace coordsim
