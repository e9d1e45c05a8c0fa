#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "ftdo/graph.hpp"

namespace ftdo {

/// Query-time graph: explicit edges plus implicit cliques and bicliques, each
/// with a positive integer weight. Implicit groups are never materialized;
/// shortest paths expand a group once, at the first settled member.
class AuxGraph {
public:
  explicit AuxGraph(Vertex n);

  Vertex n() const { return n_; }
  void add_edge(Vertex u, Vertex v, std::uint64_t weight = 1);
  void add_clique(std::vector<Vertex> members, std::uint64_t weight = 1);
  void add_biclique(std::vector<Vertex> left, std::vector<Vertex> right, std::uint64_t weight = 1);

  /// True if (u,v) is an explicit edge or implied by some group.
  bool contains(Vertex u, Vertex v) const;
  std::size_t explicit_edges() const { return explicit_count_; }
  std::size_t groups() const { return groups_.size(); }

  /// Weighted single-source distances (plain BFS when all weights are 1).
  std::vector<Distance> distances(Vertex source) const;
  Distance distance(Vertex a, Vertex b) const;

private:
  struct Group {
    std::vector<Vertex> left;
    std::vector<Vertex> right; ///< empty for cliques
    std::uint64_t weight = 1;
  };
  struct Membership {
    std::uint32_t group;
    bool right_side;
  };

  Vertex n_;
  bool unit_ = true;
  std::size_t explicit_count_ = 0;
  std::vector<std::vector<std::pair<Vertex, std::uint64_t>>> adj_;
  std::vector<Group> groups_;
  std::vector<std::vector<Membership>> member_of_;
  std::unordered_set<std::uint64_t> edge_keys_;
};

} // namespace ftdo
