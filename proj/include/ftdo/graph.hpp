#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ftdo/rational.hpp"

namespace ftdo {

using Vertex = std::uint32_t;

/// Index of an unordered vertex pair in the C(n,2) edge universe.
struct EdgeId {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(const EdgeId &, const EdgeId &) = default;
};

struct EdgeIdHash {
  std::size_t operator()(const EdgeId &e) const noexcept {
    return std::hash<std::uint64_t>{}(e.value);
  }
};

struct VertexPair {
  Vertex u = 0;
  Vertex v = 0;

  friend constexpr auto operator<=>(const VertexPair &, const VertexPair &) = default;
};

/// Size of the edge universe for n vertices.
constexpr std::uint64_t edge_universe(Vertex n) {
  return static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2;
}

/// Lexicographic pair index: id(u,v) = u(2n-u-1)/2 + (v-u-1) for u < v.
/// Argument order is irrelevant; throws SelfLoop / OutOfRange.
EdgeId edge_id(Vertex u, Vertex v, Vertex n);

/// Inverse of edge_id; the returned pair has u < v.
VertexPair edge_from_id(EdgeId e, Vertex n);

/// Hop distance, or Unreachable. Unreachable orders after every finite value.
class Distance {
public:
  constexpr Distance() = default;
  constexpr explicit Distance(std::uint64_t hops) : reachable_(true), hops_(hops) {}

  static constexpr Distance unreachable() { return Distance{}; }

  constexpr bool reachable() const { return reachable_; }
  /// Throws std::logic_error on Unreachable.
  std::uint64_t hops() const;

  /// Multiplies finite values; Unreachable stays Unreachable.
  Distance scaled(std::uint64_t factor) const {
    return reachable_ ? Distance(hops_ * factor) : unreachable();
  }

  friend constexpr bool operator==(const Distance &a, const Distance &b) {
    return a.reachable_ == b.reachable_ && (!a.reachable_ || a.hops_ == b.hops_);
  }
  friend constexpr std::strong_ordering operator<=>(const Distance &a, const Distance &b) {
    if (!a.reachable_ || !b.reachable_)
      return static_cast<int>(!a.reachable_) <=> static_cast<int>(!b.reachable_);
    return a.hops_ <=> b.hops_;
  }

  std::string str() const { return reachable_ ? std::to_string(hops_) : "inf"; }

private:
  bool reachable_ = false;
  std::uint64_t hops_ = 0;
};

/// Set of vertices drawn from [0, universe). Small universes keep a bitmap
/// next to the sorted member list so membership is O(1).
class VertexSet {
public:
  static constexpr Vertex kBitmapLimit = 4096;

  VertexSet() = default;
  VertexSet(Vertex universe, std::vector<Vertex> members);

  static VertexSet all(Vertex universe);

  Vertex universe() const { return universe_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(Vertex v) const;
  const std::vector<Vertex> &members() const { return members_; }

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  friend bool operator==(const VertexSet &a, const VertexSet &b) {
    return a.universe_ == b.universe_ && a.members_ == b.members_;
  }

private:
  Vertex universe_ = 0;
  std::vector<Vertex> members_;
  std::vector<std::uint64_t> bitmap_;
};

/// Immutable simple undirected graph with sorted adjacency lists and a sorted
/// canonical edge list.
class Graph {
public:
  Graph() = default;
  explicit Graph(Vertex n);

  /// Throws SelfLoop, OutOfRange or DuplicateEdge.
  static Graph from_pairs(Vertex n, std::span<const VertexPair> pairs);
  /// Throws OutOfRange if an id is outside the universe, DuplicateEdge on
  /// repeats.
  static Graph from_edge_ids(Vertex n, std::span<const EdgeId> ids);

  Vertex n() const { return n_; }
  std::size_t m() const { return edges_.size(); }
  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_.at(v); }
  std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }
  std::size_t min_degree() const;
  std::size_t max_degree() const;
  const std::vector<EdgeId> &edges() const { return edges_; }
  bool has_edge(Vertex u, Vertex v) const;
  bool has_edge(EdgeId e) const;
  std::vector<VertexPair> pairs() const;

  /// Copy of this graph without the listed edges; throws InvalidDeletion if
  /// one of them is absent.
  Graph without(std::span<const EdgeId> removed) const;
  /// Copy with extra edges; throws DuplicateEdge if one is already present.
  Graph with(std::span<const EdgeId> added) const;

  friend bool operator==(const Graph &a, const Graph &b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

private:
  Vertex n_ = 0;
  std::vector<EdgeId> edges_;
  std::vector<std::vector<Vertex>> adjacency_;
};

/// Graph plus a positive integer weight per edge, aligned with graph.edges().
struct WeightedGraph {
  Graph graph;
  std::vector<std::uint64_t> weights;

  std::uint64_t weight(EdgeId e) const;
};

/// Edge-list text: "n m" header, then m lines "u v" or "u v w"; '#' lines are
/// comments. Throws MalformedLine, DuplicateEdge, SelfLoop, OutOfRange.
Graph parse_edge_list(std::string_view text);
/// Same format; unweighted lines get weight 1.
WeightedGraph parse_weighted_edge_list(std::string_view text);
std::string format_edge_list(const Graph &g);
std::string format_weighted_edge_list(const WeightedGraph &g);

std::vector<Distance> bfs_distances(const Graph &g, Vertex source);

/// Distance between every ordered pair; row-major n*n.
std::vector<Distance> all_pairs_distances(const Graph &g);

struct InducedSubgraph {
  Graph graph;                  ///< relabelled 0..|vs|-1
  std::vector<Vertex> to_parent; ///< local id -> parent id
};

InducedSubgraph induced_subgraph(const Graph &g, const VertexSet &vs);
/// Induced subgraph kept in the parent's vertex numbering.
Graph induced_edges(const Graph &g, const VertexSet &vs);

std::vector<VertexSet> connected_components(const Graph &g, const VertexSet &within);

/// phi(S) = delta(S) / min(Vol(S), Vol(V\S)). Throws DegenerateCut or EmptyGraph.
Rational conductance(const Graph &g, const VertexSet &s);
/// psi(S) = phi(S) / log2(Vol(V) / min(Vol(S), Vol(V\S))). Irrational in
/// general, so returned as a double.
double lopsided_conductance(const Graph &g, const VertexSet &s);

/// Conductance where the volume of v is `volume[v]` instead of deg(v); used
/// when cut edges are kept as virtual self-loops.
Rational conductance_with_volumes(const Graph &g, const VertexSet &s,
                                  std::span<const std::uint64_t> volume);

struct CutResult {
  Rational phi;
  VertexSet side;
};

/// Minimum conductance over all 2^n - 2 cuts. n <= 20.
CutResult brute_force_expansion(const Graph &g);
CutResult brute_force_expansion(const Graph &g, std::span<const std::uint64_t> volume);

/// Largest dist(a,b) over a in `from`, b in `to` (Unreachable if any pair is
/// disconnected). Bit-parallel BFS, 64 sources per sweep.
Distance max_distance_between(const Graph &g, const VertexSet &from, const VertexSet &to);

/// Exact diameter of g restricted to `within` (induced). Empty or single
/// vertex sets give 0.
Distance diameter(const Graph &g, const VertexSet &within);

} // namespace ftdo
