#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace coordsim {

/// Directed edge (receiver, sender): information flows from `sender` to `receiver`.
/// Node labels are 1-based.
struct Edge {
  int receiver = 0;
  int sender = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Communication digraph on nodes 1..n.
///
/// Edges are stored receiver-first, so edge (i, j) puts j in the neighborhood
/// of i and yields [A]_ij = 1. Immutable after construction; the constructor
/// rejects self-loops, out-of-range labels and duplicate edges.
class Digraph {
 public:
  Digraph(int n, std::vector<Edge> edges);
  explicit Digraph(int n) : Digraph(n, {}) {}

  int size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_edge(int receiver, int sender) const;

  /// Senders j with (i, j) in the edge set.
  std::vector<int> in_neighbors(int i) const;

  /// True when every edge has its reverse.
  bool is_symmetric() const;

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  int n_;
  std::vector<Edge> edges_;  // sorted
};

Eigen::MatrixXi adjacency(const Digraph& d);

/// In-degree Laplacian L = diag(A 1) - A.
Eigen::MatrixXi laplacian(const Digraph& d);

struct DigraphUnion {
  Digraph digraph;
  /// Sum of member Laplacians; differs from laplacian(digraph) when an edge
  /// occurs in more than one member.
  Eigen::MatrixXi summed_laplacian;
};

DigraphUnion union_digraphs(std::span<const Digraph> ds);

/// Root exists from which every node is reachable along transmission direction.
bool contains_spanning_tree(const Digraph& d);

bool jointly_connected(std::span<const Digraph> ds);

/// Each edge plus its reverse.
Digraph symmetrized(const Digraph& d);

}  // namespace coordsim
