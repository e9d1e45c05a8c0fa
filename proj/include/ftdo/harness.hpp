#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftdo/expander_oracle.hpp"
#include "ftdo/graph.hpp"
#include "ftdo/spanner_sketch.hpp"
#include "ftdo/star_oracle.hpp"
#include "ftdo/streaming.hpp"

namespace ftdo {

enum class Family { RandomRegular, GnpDense, CliquePlusBridges, BipartiteComplete, TwoHopStarFamily, ExpanderCertified };

struct FamilyParams {
  std::uint32_t d = 4;     ///< RandomRegular degree; ExpanderCertified minimum degree
  double p = 0.5;          ///< GnpDense edge probability
  std::uint32_t parts = 2; ///< CliquePlusBridges / TwoHopStarFamily block count
  std::uint32_t left = 0;  ///< BipartiteComplete left side (0: n/2)
  std::optional<Rational> phi; ///< ExpanderCertified target (default_phi_target(n) if unset)
};

const char *family_name(Family f);
Family parse_family(const std::string &name);

/// Deterministic given seed. Throws InfeasibleParams.
Graph generate_graph(Family family, Vertex n, const FamilyParams &params, std::uint64_t seed);

enum class Adversary { RandomF, DegreeTargeted, AdaptiveGreedy, RootTargeted };

const char *adversary_name(Adversary a);
Adversary parse_adversary(const std::string &name);

/// Reported distance after deleting the given edges; used by AdaptiveGreedy.
using DistanceProbe = std::function<Distance(std::span<const EdgeId>, Vertex, Vertex)>;

struct AdversaryContext {
  std::uint64_t seed = 0;
  DistanceProbe probe;           ///< required by AdaptiveGreedy
  std::optional<std::uint64_t> probe_budget; ///< per deletion; default 10 f
  std::optional<Vertex> root;    ///< RootTargeted target; default max-degree vertex
};

/// Throws BudgetExceeded when f > m, InfeasibleParams when AdaptiveGreedy
/// has no probe.
std::vector<EdgeId> adversary_deletions(Adversary kind, const Graph &g, std::uint64_t f,
                                        const AdversaryContext &ctx);

enum class Artifact { Oracle, Stars, Spanner, StreamOracle, StreamSpanner };

const char *artifact_name(Artifact a);
Artifact parse_artifact(const std::string &name);

struct Scenario {
  Artifact artifact = Artifact::Oracle;
  Family family = Family::GnpDense;
  FamilyParams family_params;
  Vertex n = 16;
  std::uint64_t f = 1;
  Adversary adversary = Adversary::RandomF;
  std::uint64_t seed = 1;
  std::uint32_t trials = 1;
  OracleConfig oracle;
  StarConfig stars;
  SpannerConfig spanner;
  StreamConfig stream;
  /// Fresh graph per trial instead of one graph for every trial.
  bool regenerate_graph = false;
};

struct TrialRecord {
  std::uint32_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t deletions = 0;
  std::size_t pairs_checked = 0;
  double max_stretch = 0.0;      ///< largest answer / truth over reachable pairs
  bool containment_ok = true;    ///< oracles: G-F inside H; spanners: H inside G-F
  bool lower_bound_ok = true;
  bool upper_bound_ok = true;
  bool applicable = true;        ///< build-time preconditions held
  std::size_t decode_failures = 0;
  std::uint64_t peak_bits = 0;
  std::uint64_t stretch_bound = 0;
  std::string error;

  /// Hard invariants: containment, lower bound, no unexpected error.
  bool hard_ok() const { return containment_ok && lower_bound_ok && error.empty(); }
};

struct VerificationReport {
  Scenario scenario;
  std::vector<TrialRecord> trials;

  bool hard_ok() const;
  std::size_t upper_bound_failures() const;
  /// One JSON object per trial, then a summary object.
  std::string json_lines() const;
  std::string csv() const;
};

VerificationReport run_verification(const Scenario &sc);

std::uint64_t measure_space(const ExpanderOracle &o);
std::uint64_t measure_space(const StarOracle &o);
std::uint64_t measure_space(const SpannerSketch &s);
std::uint64_t measure_space(const StreamProcessor &s);
std::uint64_t measure_space(const SyndromeSketch &s);

/// Inserts every edge of g in a seeded random order, then the deletions.
std::vector<StreamEvent> stream_from_graph(const Graph &g, std::span<const EdgeId> deletions, std::uint64_t seed);

} // namespace ftdo
