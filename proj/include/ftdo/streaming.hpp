#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ftdo/aux_graph.hpp"
#include "ftdo/expander_oracle.hpp"
#include "ftdo/graph.hpp"
#include "ftdo/greedy_spanner.hpp"
#include "ftdo/spanner_sketch.hpp"

namespace ftdo {

enum class StreamOp { Insert, Delete };

struct StreamEvent {
  EdgeId edge;
  StreamOp op = StreamOp::Insert;
};

struct RawStreamEvent {
  StreamOp op = StreamOp::Insert;
  Vertex u = 0;
  Vertex v = 0;
};

/// One event per line, "+ u v" or "- u v"; '#' lines and blank lines are
/// skipped. Throws MalformedLine.
std::vector<RawStreamEvent> parse_stream(std::string_view text);
/// Throws SelfLoop or OutOfRange.
std::vector<StreamEvent> resolve_stream(std::span<const RawStreamEvent> raw, Vertex n);
std::string format_stream(std::span<const StreamEvent> events, Vertex n);

enum class StreamMode { Oracle, Spanner };

struct StreamConfig {
  std::uint64_t f = 0;
  StreamMode mode = StreamMode::Oracle;
  double c_D = 1.0;        ///< D = c_D * n^(1/3) f^(1/3) log2(n)^2
  double c_capacity = 1.0; ///< capacity = c_capacity * n^(4/3) f^(1/3) log2(n)^4
  double c_stretch = 1.0;  ///< oracle answers are scaled like the static oracle
  double peel_multiplier = 1.0;
  std::optional<Rational> phi_target;
  /// Use the greedy fault-tolerant spanner when f <= sqrt(n).
  bool greedy_fallback = true;
  /// Track live edges to reject invalid events. Not part of the measured state.
  bool validate = true;
  /// Record which component absorbed every insertion (testing aid).
  bool track_shadow = false;
  // Spanner mode sampling.
  double c_comp = 1.0;
  double comp_log_exp = 5.0;
  double delta_exp = 2.0;
  double c_span = 1.0;
};

std::uint64_t stream_degree(Vertex n, const StreamConfig &cfg);
std::uint64_t stream_capacity(Vertex n, const StreamConfig &cfg);

struct StreamStats {
  std::uint64_t events = 0;
  std::uint64_t inserts = 0;
  std::uint64_t deletes = 0;
  std::uint64_t refills = 0;
  std::uint64_t peak_buffer = 0;
  std::uint64_t peak_bits = 0;
};

/// Bounded-deletion stream processor: buffer-and-decompose with either
/// syndrome sketches (deterministic oracle) or sampler bundles (oblivious
/// spanner) per absorbed component.
class StreamProcessor {
public:
  static constexpr std::int64_t kInBuffer = -1;
  static constexpr std::int64_t kUntracked = -2;

  StreamProcessor(Vertex n, const StreamConfig &cfg, std::uint64_t seed = 0);

  Vertex n() const { return n_; }
  const StreamConfig &config() const { return cfg_; }
  bool uses_greedy() const { return greedy_.has_value(); }
  std::uint64_t D() const { return D_; }
  std::uint32_t k() const { return k_; }
  std::uint64_t capacity() const { return capacity_; }
  /// Multiplier applied to oracle answers, or the spanner stretch bound.
  std::uint64_t stretch() const;

  /// Throws InvalidEvent or DeletionBudgetExceeded.
  void process(const StreamEvent &ev);
  void process_all(std::span<const StreamEvent> events);

  std::uint64_t buffer_size() const { return buffer_total_; }
  std::size_t component_count() const;
  const std::vector<EdgeId> &deletions() const { return deletions_; }
  /// Peak bits include the current state.
  StreamStats stats() const;

  /// First component (append order) containing both endpoints.
  std::optional<std::size_t> locate_edge(EdgeId e) const;
  /// Component that absorbed the latest insertion of e, kInBuffer, or
  /// kUntracked. Requires track_shadow.
  std::int64_t shadow_owner(EdgeId e) const;

  /// Oracle mode. Throws DecodeFailure.
  AuxGraph oracle_graph() const;
  Distance query(Vertex a, Vertex b) const;
  /// Spanner mode. Throws SamplerExhausted.
  Graph recover() const;

  std::vector<std::uint8_t> serialize() const;
  std::uint64_t measured_bits() const { return serialize().size() * 8; }

private:
  void refill();
  void note_bits();
  SpannerConfig sampling_config() const;
  std::map<EdgeId, std::int64_t> replayed_buffer() const;

  Vertex n_ = 0;
  StreamConfig cfg_;
  std::uint64_t seed_ = 0;
  std::uint64_t D_ = 1;
  std::uint32_t k_ = 0;
  std::uint64_t q_ = 2;
  std::uint64_t capacity_ = 1;
  std::uint32_t round_ = 0;
  std::optional<GreedyFaultTolerantSpanner> greedy_;

  std::vector<EdgeId> deletions_;
  std::map<EdgeId, std::uint32_t> buffer_;
  std::uint64_t buffer_total_ = 0;
  std::vector<ExpanderComponent> oracle_components_;
  std::vector<SpannerComponent> spanner_components_;
  std::vector<std::vector<std::uint32_t>> owner_; ///< per round: vertex -> component + 1

  std::unordered_set<EdgeId, EdgeIdHash> live_;
  std::unordered_map<EdgeId, std::int64_t, EdgeIdHash> shadow_;
  StreamStats stats_;
};

} // namespace ftdo
