#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ftdo/aux_graph.hpp"
#include "ftdo/bits.hpp"
#include "ftdo/graph.hpp"
#include "ftdo/syndrome.hpp"

namespace ftdo {

/// Root gate used at query time.
enum class StarGate {
  /// Root decrease <= TargetDegree / 2, high threshold high_mult * f^{1/3} / log2(n)^2.
  Literal,
  /// Per star, with d* its minimum star degree and f_s the number of its
  /// edges deleted: root decrease <= d*/2 and d*^2 >= 2 * high_mult * f_s;
  /// high threshold max(1, ceil(high_mult * f_s / d*)).
  Certified,
};

struct StarConfig {
  std::uint64_t f = 0;
  double covering_mult = 10.0; ///< CoveringThreshold = ceil(covering_mult * f^{1/3})
  double target_mult = 1.0;    ///< TargetDegree = ceil(target_mult * n^{1/2} f^{1/3} log2 n)
  double sketch_mult = 100.0;  ///< sketch sparsity floor(sketch_mult * f^{1/3})
  double high_mult = 5.0;
  StarGate gate = StarGate::Literal;
};

struct StarRecord {
  Vertex root = 0;
  std::uint8_t hops = 1;
  VertexSet l1;
  VertexSet l2;
  std::uint64_t build_degree = 0;       ///< the sweep value d this star was built at
  std::vector<Vertex> members;          ///< root, L1 and L2, sorted
  std::vector<std::uint32_t> degrees;   ///< star degree, aligned with members
  std::vector<SyndromeSketch> sketches; ///< aligned with members
  std::uint32_t build_index = 0;

  bool in_star(Vertex v) const;
  std::size_t local_index(Vertex v) const;
  /// Smallest star degree over members (d*).
  std::uint32_t min_degree() const;
};

/// Structural eligibility of (u,w) for a star, independent of edge existence.
bool star_covers(const StarRecord &s, Vertex u, Vertex w);
bool star_covers(const StarRecord &s, EdgeId e, Vertex n);

/// 1-hop or 2-hop star around v in a graph with minimum degree >= d. Only
/// vertex layers are filled in. Throws DegreeTooLow.
StarRecord construct_star(const Graph &g, Vertex v, std::uint64_t d);

struct StarBuildReport {
  bool f_in_range = false;       ///< n <= f <= n^{3/2}
  bool roots_exhausted = false;
  std::size_t stars_meeting_degree_condition = 0; ///< d*/2 >= high_mult * f / d*
};

class StarOracle {
public:
  static StarOracle build(const Graph &g, const StarConfig &cfg);

  Vertex n() const { return n_; }
  const StarConfig &config() const { return cfg_; }
  const std::vector<StarRecord> &stars() const { return stars_; }
  const std::vector<EdgeId> &remaining() const { return remaining_; }
  std::uint32_t covering_threshold() const { return threshold_; }
  std::uint64_t target_degree() const { return target_; }
  std::uint32_t sketch_k() const { return k_; }
  const StarBuildReport &report() const { return report_; }

  /// Indices of the stars covering e, replayed from eligibility in build order.
  std::vector<std::uint32_t> covering_stars(EdgeId e) const;

  /// G_approx for a deletion set. Throws BudgetExceeded, InvalidDeletion,
  /// DecodeFailure.
  AuxGraph approximate_graph(std::span<const EdgeId> deletions) const;
  /// 7 * dist in G_approx.
  Distance report_distance(std::span<const EdgeId> deletions, Vertex s, Vertex t) const;

  std::vector<std::uint8_t> serialize() const;
  static StarOracle deserialize(std::span<const std::uint8_t> bytes);
  std::uint64_t measured_bits() const { return serialize().size() * 8; }

  static constexpr std::uint64_t kStretch = 7;

private:
  Vertex n_ = 0;
  StarConfig cfg_;
  std::uint32_t threshold_ = 1;
  std::uint64_t target_ = 1;
  std::uint32_t k_ = 0;
  std::uint64_t q_ = 2;
  std::vector<StarRecord> stars_;
  std::vector<EdgeId> remaining_;
  StarBuildReport report_;
};

} // namespace ftdo
