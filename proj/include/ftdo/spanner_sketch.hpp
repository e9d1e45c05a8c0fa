#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ftdo/bits.hpp"
#include "ftdo/graph.hpp"
#include "ftdo/l0_sampler.hpp"
#include "ftdo/rational.hpp"
#include "ftdo/sparse_recovery.hpp"

namespace ftdo {

struct SpannerConfig {
  std::uint64_t f = 0;
  double c_ladder = 8.0;    ///< ladder stops below c_ladder * sqrt(f) * log2(n)
  double c_level = 1.0;     ///< decompose again while >= c_level * n * D * log2(n)^2 edges remain
  double c_comp = 1.0;      ///< component samplers: ceil(c_comp * |E_j| * log2(n)^comp_log_exp / D)
  double comp_log_exp = 5.0;
  double delta_exp = 2.0;   ///< sampler failure probability n^-delta_exp
  double c_span = 1.0;      ///< stretch bound c_span * log2(n) * log2(log2(n))
  double peel_multiplier = 1.0;
  std::optional<Rational> phi_target;
  std::uint32_t max_levels = 64;
};

std::uint64_t spanner_stretch(Vertex n, const SpannerConfig &cfg);
double spanner_ladder_floor(Vertex n, const SpannerConfig &cfg);

/// One independent neighborhood sampler: s-sparse recovery for the exact
/// neighborhood plus an l0-sampler that still yields an edge when the
/// neighborhood is too dense to decode.
struct NeighborhoodCopy {
  SparseRecovery exact;
  L0Sketch sampler;

  void update(std::uint64_t e, int sign) {
    exact.update(e, sign);
    sampler.update(e, sign);
  }
};

struct SpannerComponent {
  std::uint64_t D = 0;
  std::uint32_t rung = 0;  ///< position in the degree ladder
  std::uint32_t level = 0;
  std::uint32_t ordinal = 0; ///< index within (rung, level)
  VertexSet vertices;
  std::vector<std::uint32_t> degrees;                 ///< aligned with vertices
  std::vector<std::vector<NeighborhoodCopy>> bundles; ///< aligned with vertices
  std::vector<L0Sketch> edge_samplers;
  std::uint64_t edge_count = 0;
  std::size_t sparsity = 0; ///< floor(4f/D): what each neighborhood copy decodes

  std::size_t local_index(Vertex v) const;
};

struct SpannerRecovery {
  Graph spanner;
  std::size_t decoded_vertices = 0;  ///< low-degree neighborhoods fully recovered
  std::size_t sampled_edges = 0;     ///< edges contributed by component samplers
  std::size_t rejected_edges = 0;    ///< sampled edges dropped by the soundness filter
};

/// Randomized sketch from which a spanner of G - F is recovered for any
/// deletion set F chosen independently of the seed.
class SpannerSketch {
public:
  static SpannerSketch build(const Graph &g, const SpannerConfig &cfg, std::uint64_t seed);

  Vertex n() const { return n_; }
  const SpannerConfig &config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint64_t> &ladder() const { return ladder_; }
  const std::vector<SpannerComponent> &components() const { return components_; }
  const std::vector<EdgeId> &residual() const { return residual_; }

  /// Index of the component absorbing e (largest D, then smallest level), or
  /// nullopt for the residual.
  std::optional<std::size_t> locate_edge(EdgeId e) const;

  /// Throws BudgetExceeded, InvalidDeletion, SamplerExhausted.
  SpannerRecovery recover(std::span<const EdgeId> deletions) const;

  std::vector<std::uint8_t> serialize() const;
  static SpannerSketch deserialize(std::span<const std::uint8_t> bytes);
  std::uint64_t measured_bits() const { return serialize().size() * 8; }

private:
  void index_components();

  Vertex n_ = 0;
  SpannerConfig cfg_;
  std::uint64_t seed_ = 0;
  std::vector<std::uint64_t> ladder_;
  std::vector<SpannerComponent> components_; ///< in location order
  std::vector<EdgeId> residual_;
  std::vector<std::vector<std::uint32_t>> owner_; ///< per (rung, level) group: vertex -> component + 1
  std::vector<std::uint32_t> group_of_;           ///< component -> group index
};

/// Component with empty sketches, sized for `edge_count` build-time edges.
SpannerComponent make_spanner_component(Vertex n, const SpannerConfig &cfg, std::uint64_t seed, std::uint64_t D,
                                        std::uint32_t rung, std::uint32_t level, std::uint32_t ordinal,
                                        VertexSet vertices, std::uint64_t edge_count);
/// Signed update of one edge inside c: degrees, neighborhood copies of both
/// endpoints and the component samplers. Throws InvalidDeletion on degree
/// underflow.
void update_component_edge(SpannerComponent &c, EdgeId e, Vertex n, int sign);
/// Opens every sampler of c and appends the surviving edges to `out`. Edges
/// listed in `removed` (sorted) are never emitted. Throws SamplerExhausted.
void open_component(const SpannerComponent &c, std::span<const EdgeId> removed, Vertex n,
                    std::vector<EdgeId> &out, SpannerRecovery &stats);

/// Convenience wrapper: recover(...).spanner.
Graph recover_spanner(const SpannerSketch &s, std::span<const EdgeId> deletions);

/// Sampler failure probability used for an n-vertex sketch.
double spanner_delta(Vertex n, const SpannerConfig &cfg);

/// Seeds for each randomized structure.
std::uint64_t bundle_seed(std::uint64_t master, std::uint64_t D, std::uint32_t level, std::uint32_t ordinal,
                          Vertex v, std::size_t copy);
std::uint64_t component_sampler_seed(std::uint64_t master, std::uint64_t D, std::uint32_t level,
                                     std::uint32_t ordinal, std::size_t copy);

} // namespace ftdo
