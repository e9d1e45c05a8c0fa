#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "ftdo/aux_graph.hpp"
#include "ftdo/bits.hpp"
#include "ftdo/decomposition.hpp"
#include "ftdo/graph.hpp"
#include "ftdo/syndrome.hpp"

namespace ftdo {

struct OracleConfig {
  std::uint64_t f = 0;
  double c_D = 8.0;       ///< D = c_D * sqrt(f) * log2(n)^deg_exponent
  double c_stop = 1.0;    ///< stop once fewer than c_stop * n * sqrt(f) * log2(n)^(2+deg_exponent) edges remain
  double c_stretch = 1.0; ///< reported multiplier constant
  int deg_exponent = 1;   ///< 1 or 2
  double peel_multiplier = 1.0;
  std::optional<Rational> phi_target; ///< default_phi_target(n) when unset
  std::uint32_t max_levels = 64;
};

/// log2(n) as used by every size formula; 1 for n <= 2.
double log2n(Vertex n);
std::uint64_t oracle_degree(Vertex n, const OracleConfig &cfg);
double oracle_stop_threshold(Vertex n, const OracleConfig &cfg);
std::uint64_t oracle_stretch(Vertex n, const OracleConfig &cfg);

struct ExpanderComponent {
  std::uint32_t level = 0;
  VertexSet vertices;
  std::vector<std::uint32_t> degrees;    ///< aligned with vertices.members()
  std::vector<SyndromeSketch> sketches;  ///< aligned with vertices.members()

  std::size_t local_index(Vertex v) const;
};

struct ComponentRef {
  std::uint32_t level = 0;
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(const ComponentRef &, const ComponentRef &) = default;
};

class QuerySession;

/// Deterministic f-fault-tolerant distance oracle built from repeated
/// expander decompositions with per-vertex syndrome sketches.
class ExpanderOracle {
public:
  static ExpanderOracle build(const Graph &g, const OracleConfig &cfg);

  Vertex n() const { return n_; }
  const OracleConfig &config() const { return cfg_; }
  std::uint64_t D() const { return D_; }
  std::uint32_t k() const { return k_; }
  std::uint64_t stretch() const { return stretch_; }
  std::size_t level_count() const { return levels_.size(); }
  const std::vector<std::vector<ExpanderComponent>> &levels() const { return levels_; }
  const ExpanderComponent &component(ComponentRef r) const { return levels_.at(r.level).at(r.index); }
  const std::vector<EdgeId> &residual() const { return residual_; }

  /// First component (level ascending) containing both endpoints, or nullopt
  /// for the residual. Throws UnknownEdge when no component matches and e is
  /// not a residual edge.
  std::optional<ComponentRef> locate_edge(EdgeId e) const;

  /// Throws BudgetExceeded or InvalidDeletion.
  QuerySession open_session(std::span<const EdgeId> deletions) const;

  std::vector<std::uint8_t> serialize() const;
  static ExpanderOracle deserialize(std::span<const std::uint8_t> bytes);
  void write_body(BitWriter &w) const;
  static ExpanderOracle read_body(BitReader &r);
  std::uint64_t measured_bits() const { return serialize().size() * 8; }

private:
  void index_levels();

  Vertex n_ = 0;
  OracleConfig cfg_;
  std::uint64_t D_ = 1;
  std::uint32_t k_ = 0;
  std::uint64_t q_ = 2;
  std::uint64_t stretch_ = 1;
  std::vector<std::vector<ExpanderComponent>> levels_;
  std::vector<EdgeId> residual_;
  std::vector<std::vector<std::uint32_t>> owner_; ///< per level: vertex -> component index
};

/// Deletion-applied view of an oracle. The oracle itself is never modified.
class QuerySession {
public:
  Vertex n() const { return oracle_->n(); }
  std::span<const EdgeId> deletions() const { return deletions_; }
  const std::vector<EdgeId> &residual() const { return residual_; }
  std::uint32_t degree(ComponentRef c, std::size_t local) const;
  const SyndromeSketch &sketch(ComponentRef c, std::size_t local) const;

  /// Auxiliary graph H, built on first use. Throws DecodeFailure.
  const AuxGraph &aux() const;
  /// Adds this session's H into `out` with every edge weighted `weight`.
  void append_to(AuxGraph &out, std::uint64_t weight) const;

  Distance aux_distance(Vertex a, Vertex b) const;
  /// stretch * dist_H(a, b).
  Distance query_distance(Vertex a, Vertex b) const;

private:
  friend class ExpanderOracle;
  struct VertexState {
    std::uint32_t degree;
    SyndromeSketch sketch;
  };
  using Key = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>;

  const ExpanderOracle *oracle_ = nullptr;
  std::vector<EdgeId> deletions_;
  std::vector<EdgeId> residual_;
  std::map<Key, VertexState> touched_;
  mutable std::shared_ptr<AuxGraph> aux_;
};

struct WeightedDeletion {
  EdgeId edge;
  std::uint64_t weight = 1;
};

/// One unweighted oracle per weight class [2^i, 2^{i+1}); bucket i is scaled
/// by 2^i at query time.
class WeightedOracle {
public:
  static WeightedOracle build(const WeightedGraph &g, const OracleConfig &cfg);

  Vertex n() const { return n_; }
  const std::vector<std::optional<ExpanderOracle>> &buckets() const { return buckets_; }
  std::size_t populated_buckets() const;
  /// Twice the unweighted multiplier: bucket rounding loses up to a factor 2.
  std::uint64_t stretch() const;

  /// Throws BudgetExceeded, InvalidDeletion.
  Distance query(std::span<const WeightedDeletion> deletions, Vertex a, Vertex b) const;
  /// Unscaled weighted distance in the union of bucket auxiliary graphs.
  Distance aux_distance(std::span<const WeightedDeletion> deletions, Vertex a, Vertex b) const;

  std::vector<std::uint8_t> serialize() const;
  static WeightedOracle deserialize(std::span<const std::uint8_t> bytes);

private:
  AuxGraph combined(std::span<const WeightedDeletion> deletions) const;

  Vertex n_ = 0;
  OracleConfig cfg_;
  std::vector<std::optional<ExpanderOracle>> buckets_;
};

std::size_t weight_bucket(std::uint64_t w);

/// Adds one component's contribution to H: a clique on vertices whose degree
/// is at least k + 1 and the decoded neighborhoods of the others. Throws
/// DecodeFailure.
void append_expander_component(AuxGraph &out, const VertexSet &vertices, std::uint32_t k,
                               const std::function<std::uint32_t(std::size_t)> &degree,
                               const std::function<const SyndromeSketch &(std::size_t)> &sketch,
                               std::uint64_t weight = 1);

} // namespace ftdo
