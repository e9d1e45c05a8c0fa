#include "ftdo/aux_graph.hpp"

#include <algorithm>
#include <queue>

#include "ftdo/error.hpp"

namespace ftdo {

namespace {
std::uint64_t key(Vertex u, Vertex v) {
  if (u > v)
    std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}
} // namespace

AuxGraph::AuxGraph(Vertex n) : n_(n), adj_(n), member_of_(n) {}

void AuxGraph::add_edge(Vertex u, Vertex v, std::uint64_t weight) {
  if (u >= n_ || v >= n_)
    throw Error(ErrorCode::OutOfRange, "aux edge endpoint out of range");
  if (u == v)
    return;
  if (weight != 1)
    unit_ = false;
  adj_[u].emplace_back(v, weight);
  adj_[v].emplace_back(u, weight);
  edge_keys_.insert(key(u, v));
  ++explicit_count_;
}

void AuxGraph::add_clique(std::vector<Vertex> members, std::uint64_t weight) {
  if (members.size() < 2)
    return;
  if (weight != 1)
    unit_ = false;
  const auto id = static_cast<std::uint32_t>(groups_.size());
  for (Vertex v : members)
    member_of_.at(v).push_back({id, false});
  groups_.push_back({std::move(members), {}, weight});
}

void AuxGraph::add_biclique(std::vector<Vertex> left, std::vector<Vertex> right, std::uint64_t weight) {
  if (left.empty() || right.empty())
    return;
  if (weight != 1)
    unit_ = false;
  const auto id = static_cast<std::uint32_t>(groups_.size());
  for (Vertex v : left)
    member_of_.at(v).push_back({id, false});
  for (Vertex v : right)
    member_of_.at(v).push_back({id, true});
  groups_.push_back({std::move(left), std::move(right), weight});
}

bool AuxGraph::contains(Vertex u, Vertex v) const {
  if (u == v || u >= n_ || v >= n_)
    return false;
  if (edge_keys_.count(key(u, v)))
    return true;
  for (const auto &mu : member_of_[u])
    for (const auto &mv : member_of_[v]) {
      if (mu.group != mv.group)
        continue;
      const bool clique = groups_[mu.group].right.empty();
      if (clique || mu.right_side != mv.right_side)
        return true;
    }
  return false;
}

std::vector<Distance> AuxGraph::distances(Vertex source) const {
  if (source >= n_)
    throw Error(ErrorCode::OutOfRange, "source out of range");
  constexpr std::uint64_t kInf = UINT64_MAX;
  std::vector<std::uint64_t> dist(n_, kInf);
  // One flag per group side: 0 = left members triggered, 1 = right.
  std::vector<char> expanded(groups_.size() * 2, 0);
  dist[source] = 0;

  const auto expand = [&](Vertex u, auto &&relax) {
    for (const auto &[w, wt] : adj_[u])
      relax(w, dist[u] + wt);
    for (const auto &m : member_of_[u]) {
      const auto slot = static_cast<std::size_t>(m.group) * 2 + (m.right_side ? 1 : 0);
      if (expanded[slot])
        continue;
      expanded[slot] = 1;
      const Group &g = groups_[m.group];
      const auto &targets = g.right.empty() ? g.left : (m.right_side ? g.left : g.right);
      for (Vertex w : targets)
        relax(w, dist[u] + g.weight);
    }
  };

  if (unit_) {
    std::vector<Vertex> queue{source};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Vertex u = queue[head];
      expand(u, [&](Vertex w, std::uint64_t d) {
        if (dist[w] == kInf) {
          dist[w] = d;
          queue.push_back(w);
        }
      });
    }
  } else {
    using Item = std::pair<std::uint64_t, Vertex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    std::vector<char> done(n_, 0);
    pq.emplace(0, source);
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (done[u] || d != dist[u])
        continue;
      done[u] = 1;
      expand(u, [&](Vertex w, std::uint64_t nd) {
        if (nd < dist[w]) {
          dist[w] = nd;
          pq.emplace(nd, w);
        }
      });
    }
  }
  std::vector<Distance> out(n_);
  for (Vertex v = 0; v < n_; ++v)
    if (dist[v] != kInf)
      out[v] = Distance(dist[v]);
  return out;
}

Distance AuxGraph::distance(Vertex a, Vertex b) const {
  if (b >= n_)
    throw Error(ErrorCode::OutOfRange, "target out of range");
  return distances(a)[b];
}

} // namespace ftdo
