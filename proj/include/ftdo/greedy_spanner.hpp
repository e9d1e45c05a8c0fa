#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ftdo/bits.hpp"
#include "ftdo/graph.hpp"

namespace ftdo {

/// 2 ceil(log2 n) - 1, at least 1.
std::uint64_t greedy_stretch(Vertex n);

/// Insertion-only f-fault-tolerant spanner: f + 1 greedy layers. An arriving
/// edge joins the first layer in which its endpoints are farther apart than
/// the stretch, and is dropped if every layer already spans it. At most f
/// deletions touch at most f layers, so one layer stays intact.
class GreedyFaultTolerantSpanner {
public:
  GreedyFaultTolerantSpanner() = default;
  GreedyFaultTolerantSpanner(Vertex n, std::uint64_t f, std::uint64_t stretch);

  Vertex n() const { return n_; }
  std::uint64_t stretch() const { return stretch_; }
  std::size_t layer_count() const { return layers_.size(); }

  /// Layer that kept the edge, or -1 if it was dropped.
  int insert(EdgeId e);
  /// Kept edges with multiplicity, in insertion order per layer.
  const std::vector<std::vector<EdgeId>> &layers() const { return kept_; }
  /// Kept edges minus `deletions` (with multiplicity), as a simple graph.
  Graph surviving(std::span<const EdgeId> deletions) const;

  void write_body(BitWriter &w) const;

private:
  bool within(std::size_t layer, Vertex a, Vertex b) const;

  Vertex n_ = 0;
  std::uint64_t stretch_ = 1;
  std::vector<std::vector<std::vector<Vertex>>> layers_;
  std::vector<std::vector<EdgeId>> kept_;
};

/// Offline version over the edges of g in id order.
Graph greedy_fault_tolerant_spanner(const Graph &g, std::uint64_t f, std::uint64_t stretch);

} // namespace ftdo
