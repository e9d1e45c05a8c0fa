#include "ftdo/greedy_spanner.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "ftdo/error.hpp"

namespace ftdo {

std::uint64_t greedy_stretch(Vertex n) {
  const std::uint64_t lg = n <= 2 ? 1 : std::bit_width(static_cast<std::uint64_t>(n - 1));
  return 2 * lg - 1;
}

GreedyFaultTolerantSpanner::GreedyFaultTolerantSpanner(Vertex n, std::uint64_t f, std::uint64_t stretch)
    : n_(n), stretch_(std::max<std::uint64_t>(stretch, 1)),
      layers_(f + 1, std::vector<std::vector<Vertex>>(n)), kept_(f + 1) {}

bool GreedyFaultTolerantSpanner::within(std::size_t layer, Vertex a, Vertex b) const {
  const auto &adj = layers_[layer];
  if (adj[a].empty() || adj[b].empty())
    return false;
  std::vector<std::uint32_t> dist(n_, UINT32_MAX);
  std::vector<Vertex> frontier{a}, next;
  dist[a] = 0;
  for (std::uint64_t depth = 0; depth < stretch_ && !frontier.empty(); ++depth) {
    next.clear();
    for (Vertex x : frontier)
      for (Vertex y : adj[x])
        if (dist[y] == UINT32_MAX) {
          if (y == b)
            return true;
          dist[y] = static_cast<std::uint32_t>(depth + 1);
          next.push_back(y);
        }
    frontier.swap(next);
  }
  return false;
}

int GreedyFaultTolerantSpanner::insert(EdgeId e) {
  const auto p = edge_from_id(e, n_);
  for (std::size_t layer = 0; layer < layers_.size(); ++layer) {
    if (within(layer, p.u, p.v))
      continue;
    layers_[layer][p.u].push_back(p.v);
    layers_[layer][p.v].push_back(p.u);
    kept_[layer].push_back(e);
    return static_cast<int>(layer);
  }
  return -1;
}

Graph GreedyFaultTolerantSpanner::surviving(std::span<const EdgeId> deletions) const {
  std::map<EdgeId, std::int64_t> count;
  for (const auto &layer : kept_)
    for (EdgeId e : layer)
      ++count[e];
  for (EdgeId e : deletions) {
    const auto it = count.find(e);
    if (it != count.end())
      --it->second;
  }
  std::vector<EdgeId> out;
  for (const auto &[e, c] : count)
    if (c > 0)
      out.push_back(e);
  return Graph::from_edge_ids(n_, out);
}

void GreedyFaultTolerantSpanner::write_body(BitWriter &w) const {
  const unsigned ebits = bits_for(std::max<std::uint64_t>(edge_universe(n_), 2));
  w.write(kept_.size(), 32);
  for (const auto &layer : kept_) {
    w.write_u64(layer.size());
    for (EdgeId e : layer)
      w.write(e.value, ebits);
  }
}

Graph greedy_fault_tolerant_spanner(const Graph &g, std::uint64_t f, std::uint64_t stretch) {
  GreedyFaultTolerantSpanner s(g.n(), f, stretch);
  for (EdgeId e : g.edges())
    s.insert(e);
  return s.surviving({});
}

} // namespace ftdo
