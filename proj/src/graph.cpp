#include "ftdo/graph.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ftdo/error.hpp"

namespace ftdo {

namespace {

std::uint64_t row_start(std::uint64_t u, std::uint64_t n) { return u * (2 * n - u - 1) / 2; }

void check_vertex(Vertex v, Vertex n) {
  if (v >= n)
    throw Error(ErrorCode::OutOfRange, "vertex " + std::to_string(v) + " >= n=" + std::to_string(n));
}

} // namespace

EdgeId edge_id(Vertex u, Vertex v, Vertex n) {
  check_vertex(u, n);
  check_vertex(v, n);
  if (u == v)
    throw Error(ErrorCode::SelfLoop, "self-loop at vertex " + std::to_string(u));
  if (u > v)
    std::swap(u, v);
  return EdgeId{row_start(u, n) + (v - u - 1)};
}

VertexPair edge_from_id(EdgeId e, Vertex n) {
  if (e.value >= edge_universe(n))
    throw Error(ErrorCode::OutOfRange, "edge id " + std::to_string(e.value) + " outside universe");
  std::uint64_t lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const std::uint64_t mid = (lo + hi) / 2;
    if (row_start(mid, n) <= e.value)
      lo = mid;
    else
      hi = mid;
  }
  const auto u = static_cast<Vertex>(lo);
  const auto v = static_cast<Vertex>(e.value - row_start(lo, n) + lo + 1);
  return {u, v};
}

std::uint64_t Distance::hops() const {
  if (!reachable_)
    throw std::logic_error("hops() on unreachable distance");
  return hops_;
}

VertexSet::VertexSet(Vertex universe, std::vector<Vertex> members)
    : universe_(universe), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.back() >= universe_)
    throw Error(ErrorCode::OutOfRange, "vertex set member outside universe");
  if (universe_ <= kBitmapLimit) {
    bitmap_.assign((universe_ + 63) / 64, 0);
    for (Vertex v : members_)
      bitmap_[v / 64] |= std::uint64_t{1} << (v % 64);
  }
}

VertexSet VertexSet::all(Vertex universe) {
  std::vector<Vertex> m(universe);
  for (Vertex v = 0; v < universe; ++v)
    m[v] = v;
  return VertexSet(universe, std::move(m));
}

bool VertexSet::contains(Vertex v) const {
  if (v >= universe_)
    return false;
  if (!bitmap_.empty())
    return (bitmap_[v / 64] >> (v % 64)) & 1U;
  return std::binary_search(members_.begin(), members_.end(), v);
}

Graph::Graph(Vertex n) : n_(n), adjacency_(n) {}

Graph Graph::from_edge_ids(Vertex n, std::span<const EdgeId> ids) {
  Graph g(n);
  g.edges_.assign(ids.begin(), ids.end());
  std::sort(g.edges_.begin(), g.edges_.end());
  const std::uint64_t universe = edge_universe(n);
  for (std::size_t i = 0; i < g.edges_.size(); ++i) {
    if (g.edges_[i].value >= universe)
      throw Error(ErrorCode::OutOfRange, "edge id outside universe");
    if (i > 0 && g.edges_[i] == g.edges_[i - 1]) {
      const auto p = edge_from_id(g.edges_[i], n);
      throw Error(ErrorCode::DuplicateEdge,
                  "duplicate edge " + std::to_string(p.u) + " " + std::to_string(p.v));
    }
  }
  for (EdgeId e : g.edges_) {
    const auto p = edge_from_id(e, n);
    g.adjacency_[p.u].push_back(p.v);
    g.adjacency_[p.v].push_back(p.u);
  }
  for (auto &adj : g.adjacency_)
    std::sort(adj.begin(), adj.end());
  return g;
}

Graph Graph::from_pairs(Vertex n, std::span<const VertexPair> pairs) {
  std::vector<EdgeId> ids;
  ids.reserve(pairs.size());
  for (const auto &p : pairs)
    ids.push_back(edge_id(p.u, p.v, n));
  return from_edge_ids(n, ids);
}

std::size_t Graph::min_degree() const {
  std::size_t best = n_ == 0 ? 0 : adjacency_[0].size();
  for (const auto &adj : adjacency_)
    best = std::min(best, adj.size());
  return best;
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (const auto &adj : adjacency_)
    best = std::max(best, adj.size());
  return best;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  if (u >= n_ || v >= n_ || u == v)
    return false;
  const auto &a = adjacency_[u].size() <= adjacency_[v].size() ? adjacency_[u] : adjacency_[v];
  const Vertex other = &a == &adjacency_[u] ? v : u;
  return std::binary_search(a.begin(), a.end(), other);
}

bool Graph::has_edge(EdgeId e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }

std::vector<VertexPair> Graph::pairs() const {
  std::vector<VertexPair> out;
  out.reserve(edges_.size());
  for (EdgeId e : edges_)
    out.push_back(edge_from_id(e, n_));
  return out;
}

Graph Graph::without(std::span<const EdgeId> removed) const {
  std::vector<EdgeId> r(removed.begin(), removed.end());
  std::sort(r.begin(), r.end());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!has_edge(r[i]) || (i > 0 && r[i] == r[i - 1]))
      throw Error(ErrorCode::InvalidDeletion, "edge id " + std::to_string(r[i].value) + " not present");
  }
  std::vector<EdgeId> kept;
  kept.reserve(edges_.size() - r.size());
  std::set_difference(edges_.begin(), edges_.end(), r.begin(), r.end(), std::back_inserter(kept));
  return from_edge_ids(n_, kept);
}

Graph Graph::with(std::span<const EdgeId> added) const {
  std::vector<EdgeId> all = edges_;
  all.insert(all.end(), added.begin(), added.end());
  return from_edge_ids(n_, all);
}

std::uint64_t WeightedGraph::weight(EdgeId e) const {
  const auto &es = graph.edges();
  const auto it = std::lower_bound(es.begin(), es.end(), e);
  if (it == es.end() || *it != e)
    throw Error(ErrorCode::UnknownEdge, "edge id " + std::to_string(e.value));
  return weights[static_cast<std::size_t>(it - es.begin())];
}

namespace {

std::vector<std::uint64_t> split_numbers(std::string_view line, std::size_t line_no) {
  std::vector<std::uint64_t> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i >= line.size())
      break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    std::uint64_t value = 0;
    const auto *first = line.data() + i;
    const auto *last = line.data() + j;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
      throw Error(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_no) + ": bad token '" + std::string(first, last) + "'");
    out.push_back(value);
    i = j;
  }
  return out;
}

WeightedGraph parse_impl(std::string_view text, bool allow_weights) {
  std::vector<std::vector<std::uint64_t>> rows;
  std::vector<std::size_t> line_numbers;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#')
      continue;
    rows.push_back(split_numbers(line, line_no));
    line_numbers.push_back(line_no);
  }
  if (rows.empty() || rows[0].size() != 2)
    throw Error(ErrorCode::MalformedLine, "missing 'n m' header");
  if (rows[0][0] > 0xFFFFFFFFULL)
    throw Error(ErrorCode::MalformedLine, "vertex count too large");
  const auto n = static_cast<Vertex>(rows[0][0]);
  const std::uint64_t m = rows[0][1];
  if (rows.size() - 1 != m)
    throw Error(ErrorCode::MalformedLine, "header declares " + std::to_string(m) + " edges, found " +
                                              std::to_string(rows.size() - 1));
  std::vector<std::pair<EdgeId, std::uint64_t>> edges;
  edges.reserve(m);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto &r = rows[i];
    const std::string where = "line " + std::to_string(line_numbers[i]);
    if (r.size() != 2 && !(allow_weights && r.size() == 3))
      throw Error(ErrorCode::MalformedLine, where + ": expected 'u v' or 'u v w'");
    if (r[0] >= n || r[1] >= n)
      throw Error(ErrorCode::OutOfRange, where + ": vertex out of range");
    if (r[0] == r[1])
      throw Error(ErrorCode::SelfLoop, where + ": self-loop");
    const std::uint64_t w = r.size() == 3 ? r[2] : 1;
    if (w == 0)
      throw Error(ErrorCode::MalformedLine, where + ": weight must be positive");
    edges.emplace_back(edge_id(static_cast<Vertex>(r[0]), static_cast<Vertex>(r[1]), n), w);
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i].first == edges[i - 1].first) {
      const auto p = edge_from_id(edges[i].first, n);
      throw Error(ErrorCode::DuplicateEdge,
                  "duplicate edge " + std::to_string(p.u) + " " + std::to_string(p.v));
    }
  WeightedGraph out;
  std::vector<EdgeId> ids;
  ids.reserve(edges.size());
  for (const auto &[e, w] : edges) {
    ids.push_back(e);
    out.weights.push_back(w);
  }
  out.graph = Graph::from_edge_ids(n, ids);
  return out;
}

} // namespace

Graph parse_edge_list(std::string_view text) { return parse_impl(text, true).graph; }

WeightedGraph parse_weighted_edge_list(std::string_view text) { return parse_impl(text, true); }

std::string format_edge_list(const Graph &g) {
  std::ostringstream os;
  os << g.n() << ' ' << g.m() << '\n';
  for (const auto &p : g.pairs())
    os << p.u << ' ' << p.v << '\n';
  return os.str();
}

std::string format_weighted_edge_list(const WeightedGraph &g) {
  std::ostringstream os;
  os << g.graph.n() << ' ' << g.graph.m() << '\n';
  const auto pairs = g.graph.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i)
    os << pairs[i].u << ' ' << pairs[i].v << ' ' << g.weights[i] << '\n';
  return os.str();
}

std::vector<Distance> bfs_distances(const Graph &g, Vertex source) {
  check_vertex(source, g.n());
  std::vector<Distance> dist(g.n());
  std::vector<std::uint32_t> raw(g.n(), UINT32_MAX);
  std::vector<Vertex> queue{source};
  raw[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex u = queue[head];
    for (Vertex w : g.neighbors(u))
      if (raw[w] == UINT32_MAX) {
        raw[w] = raw[u] + 1;
        queue.push_back(w);
      }
  }
  for (Vertex v = 0; v < g.n(); ++v)
    if (raw[v] != UINT32_MAX)
      dist[v] = Distance(raw[v]);
  return dist;
}

std::vector<Distance> all_pairs_distances(const Graph &g) {
  std::vector<Distance> out;
  out.reserve(static_cast<std::size_t>(g.n()) * g.n());
  for (Vertex s = 0; s < g.n(); ++s) {
    auto row = bfs_distances(g, s);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

InducedSubgraph induced_subgraph(const Graph &g, const VertexSet &vs) {
  if (!vs.empty() && vs.members().back() >= g.n())
    throw Error(ErrorCode::OutOfRange, "induced subgraph vertex outside graph");
  std::vector<Vertex> local(g.n(), UINT32_MAX);
  InducedSubgraph out;
  out.to_parent = vs.members();
  for (std::size_t i = 0; i < out.to_parent.size(); ++i)
    local[out.to_parent[i]] = static_cast<Vertex>(i);
  const auto k = static_cast<Vertex>(out.to_parent.size());
  std::vector<EdgeId> ids;
  for (Vertex u : vs)
    for (Vertex w : g.neighbors(u))
      if (u < w && local[w] != UINT32_MAX)
        ids.push_back(edge_id(local[u], local[w], k));
  out.graph = Graph::from_edge_ids(k, ids);
  return out;
}

Graph induced_edges(const Graph &g, const VertexSet &vs) {
  std::vector<EdgeId> ids;
  for (Vertex u : vs) {
    check_vertex(u, g.n());
    for (Vertex w : g.neighbors(u))
      if (u < w && vs.contains(w))
        ids.push_back(edge_id(u, w, g.n()));
  }
  return Graph::from_edge_ids(g.n(), ids);
}

std::vector<VertexSet> connected_components(const Graph &g, const VertexSet &within) {
  std::vector<char> seen(g.n(), 0);
  std::vector<VertexSet> out;
  for (Vertex s : within) {
    if (seen[s])
      continue;
    std::vector<Vertex> comp{s};
    seen[s] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head)
      for (Vertex w : g.neighbors(comp[head]))
        if (!seen[w] && within.contains(w)) {
          seen[w] = 1;
          comp.push_back(w);
        }
    out.emplace_back(g.n(), std::move(comp));
  }
  return out;
}

namespace {

struct CutStats {
  std::uint64_t boundary = 0;
  std::uint64_t vol_s = 0;
  std::uint64_t vol_total = 0;
};

CutStats cut_stats(const Graph &g, const VertexSet &s, std::span<const std::uint64_t> volume) {
  if (g.n() == 0)
    throw Error(ErrorCode::EmptyGraph, "graph has no vertices");
  if (s.empty() || s.size() >= g.n())
    throw Error(ErrorCode::DegenerateCut, "cut side must be a proper nonempty subset");
  CutStats st;
  for (Vertex v = 0; v < g.n(); ++v)
    st.vol_total += volume.empty() ? g.degree(v) : volume[v];
  if (st.vol_total == 0)
    throw Error(ErrorCode::EmptyGraph, "graph has no edges");
  for (Vertex u : s) {
    check_vertex(u, g.n());
    st.vol_s += volume.empty() ? g.degree(u) : volume[u];
    for (Vertex w : g.neighbors(u))
      if (!s.contains(w))
        ++st.boundary;
  }
  const std::uint64_t small = std::min(st.vol_s, st.vol_total - st.vol_s);
  if (small == 0)
    throw Error(ErrorCode::DegenerateCut, "one side of the cut has zero volume");
  return st;
}

} // namespace

Rational conductance(const Graph &g, const VertexSet &s) {
  const auto st = cut_stats(g, s, {});
  return Rational(static_cast<std::int64_t>(st.boundary),
                  static_cast<std::int64_t>(std::min(st.vol_s, st.vol_total - st.vol_s)));
}

Rational conductance_with_volumes(const Graph &g, const VertexSet &s,
                                  std::span<const std::uint64_t> volume) {
  const auto st = cut_stats(g, s, volume);
  return Rational(static_cast<std::int64_t>(st.boundary),
                  static_cast<std::int64_t>(std::min(st.vol_s, st.vol_total - st.vol_s)));
}

double lopsided_conductance(const Graph &g, const VertexSet &s) {
  const auto st = cut_stats(g, s, {});
  const std::uint64_t small = std::min(st.vol_s, st.vol_total - st.vol_s);
  const double phi = static_cast<double>(st.boundary) / static_cast<double>(small);
  return phi / std::log2(static_cast<double>(st.vol_total) / static_cast<double>(small));
}

CutResult brute_force_expansion(const Graph &g) { return brute_force_expansion(g, {}); }

CutResult brute_force_expansion(const Graph &g, std::span<const std::uint64_t> volume) {
  const Vertex n = g.n();
  if (n > 20)
    throw Error(ErrorCode::OutOfRange, "brute-force expansion limited to n <= 20");
  std::vector<std::uint32_t> adj(n, 0);
  std::vector<std::uint64_t> vol(n, 0);
  std::uint64_t total = 0;
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex w : g.neighbors(v))
      adj[v] |= 1U << w;
    vol[v] = volume.empty() ? g.degree(v) : volume[v];
    total += vol[v];
  }
  if (n < 2 || total == 0)
    throw Error(ErrorCode::EmptyGraph, "no cut with positive volume");
  bool found = false;
  Rational best;
  std::uint32_t best_mask = 0;
  std::uint32_t mask = 0;
  std::int64_t boundary = 0;
  std::uint64_t vol_s = 0;
  const std::uint64_t limit = std::uint64_t{1} << (n - 1);
  for (std::uint64_t i = 1; i < limit; ++i) {
    const auto v = static_cast<Vertex>(std::countr_zero(i));
    const auto inside = static_cast<std::int64_t>(std::popcount(adj[v] & mask));
    const auto deg = static_cast<std::int64_t>(std::popcount(adj[v]));
    if (mask & (1U << v)) {
      mask &= ~(1U << v);
      boundary -= deg - 2 * inside;
      vol_s -= vol[v];
    } else {
      mask |= 1U << v;
      boundary += deg - 2 * inside;
      vol_s += vol[v];
    }
    const std::uint64_t small = std::min(vol_s, total - vol_s);
    if (small == 0)
      continue;
    const Rational phi(boundary, static_cast<std::int64_t>(small));
    if (!found || phi < best || (phi == best && mask < best_mask)) {
      found = true;
      best = phi;
      best_mask = mask;
    }
  }
  if (!found)
    throw Error(ErrorCode::DegenerateCut, "every cut has a zero-volume side");
  std::vector<Vertex> side;
  for (Vertex v = 0; v < n; ++v)
    if (best_mask & (1U << v))
      side.push_back(v);
  return {best, VertexSet(n, std::move(side))};
}

Distance max_distance_between(const Graph &g, const VertexSet &from, const VertexSet &to) {
  const Vertex n = g.n();
  if (from.empty() || to.empty())
    return Distance(0);
  std::vector<std::uint64_t> visited(n), frontier(n), next(n);
  std::uint64_t worst = 0;
  const auto &sources = from.members();
  for (std::size_t base = 0; base < sources.size(); base += 64) {
    const std::size_t count = std::min<std::size_t>(64, sources.size() - base);
    const std::uint64_t full = count == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << count) - 1);
    std::fill(visited.begin(), visited.end(), 0);
    std::fill(frontier.begin(), frontier.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
      const Vertex s = sources[base + i];
      visited[s] |= std::uint64_t{1} << i;
      frontier[s] |= std::uint64_t{1} << i;
    }
    std::uint64_t level = 0;
    bool active = true;
    while (active) {
      active = false;
      ++level;
      bool touched_target = false;
      for (Vertex v = 0; v < n; ++v) {
        std::uint64_t acc = 0;
        for (Vertex w : g.neighbors(v))
          acc |= frontier[w];
        next[v] = acc & ~visited[v];
      }
      for (Vertex v = 0; v < n; ++v) {
        if (next[v]) {
          active = true;
          visited[v] |= next[v];
          if (to.contains(v))
            touched_target = true;
        }
      }
      std::swap(frontier, next);
      if (touched_target)
        worst = std::max(worst, level);
    }
    for (Vertex t : to)
      if (visited[t] != full)
        return Distance::unreachable();
  }
  return Distance(worst);
}

Distance diameter(const Graph &g, const VertexSet &within) {
  if (within.size() <= 1)
    return Distance(0);
  const auto sub = induced_subgraph(g, within);
  const auto all = VertexSet::all(sub.graph.n());
  return max_distance_between(sub.graph, all, all);
}

} // namespace ftdo
