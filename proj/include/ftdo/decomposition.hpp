#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftdo/bits.hpp"
#include "ftdo/graph.hpp"
#include "ftdo/rational.hpp"

namespace ftdo {

enum class Certifier { Spectral, BruteForce };

struct DecompositionConfig {
  std::uint64_t D = 1;
  Rational phi_target{1, 4};
  /// The first peel runs at ceil(D * peel_multiplier); later re-peels at D.
  double peel_multiplier = 1.0;
  /// BruteForce is exact but only applies to parts with at most 20 vertices;
  /// larger parts fall back to Spectral.
  Certifier certifier = Certifier::Spectral;
};

/// Default expansion target 1/(2 ceil(log2 n)), at most 1/2.
Rational default_phi_target(Vertex n);

struct PeelResult {
  VertexSet kept;
  std::size_t removed_edges = 0;
};

/// Maximal induced subgraph of `within` with minimum degree >= d (the d-core).
PeelResult peel(const Graph &g, std::uint64_t d);
PeelResult peel(const Graph &g, const VertexSet &within, std::uint64_t d);

enum class Verdict { Accepted, Refuted, Inconclusive };

struct ExpansionEvidence {
  Verdict verdict = Verdict::Inconclusive;
  Certifier certifier = Certifier::Spectral;
  /// Spectral: lambda2 / 2, a lower bound on conductance. BruteForce: the
  /// exact minimum conductance.
  double lower_bound = 0.0;
  /// Best cut found (sweep cut or exact minimizer) and its conductance.
  std::optional<VertexSet> cut;
  std::optional<Rational> cut_phi;
};

/// Certifies conductance >= phi_target of g, measured with per-vertex
/// `volume` (empty span: plain degrees). Cut vertex sets use g's numbering.
/// Throws EmptyGraph for graphs without edges.
ExpansionEvidence certify_expansion(const Graph &g, Rational phi_target, Certifier certifier,
                                    std::span<const std::uint64_t> volume = {});

struct Decomposition {
  std::vector<VertexSet> components;
  std::vector<EdgeId> crossing; ///< sorted
  std::vector<ExpansionEvidence> certificates;
};

Decomposition decompose(const Graph &g, const DecompositionConfig &cfg);

/// Component count, per component a sorted vertex list, then crossing ids.
void write_decomposition(BitWriter &w, const Decomposition &d, Vertex n);
std::string format_decomposition(const Decomposition &d);

struct RobustnessReport {
  VertexSet good;
  VertexSet bad;
  Distance good_diameter;
  /// Largest H-F distance among vertices whose H-F degree is >= 4f/D + 1.
  Distance max_high_pair_distance;
  std::size_t high_vertices = 0;
};

/// Throws InvalidDeletion if some deleted edge is not in h.
RobustnessReport robustness_report(const Graph &h, std::span<const EdgeId> deletions, std::uint64_t f,
                                   std::uint64_t D);

} // namespace ftdo
