#include "ftdo/star_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "ftdo/decomposition.hpp"
#include "ftdo/error.hpp"
#include "ftdo/expander_oracle.hpp"
#include "ftdo/field.hpp"

namespace ftdo {

bool StarRecord::in_star(Vertex v) const { return std::binary_search(members.begin(), members.end(), v); }

std::size_t StarRecord::local_index(Vertex v) const {
  const auto it = std::lower_bound(members.begin(), members.end(), v);
  if (it == members.end() || *it != v)
    throw Error(ErrorCode::OutOfRange, "vertex not in star");
  return static_cast<std::size_t>(it - members.begin());
}

std::uint32_t StarRecord::min_degree() const {
  if (degrees.empty())
    return 0;
  return *std::min_element(degrees.begin(), degrees.end());
}

bool star_covers(const StarRecord &s, Vertex u, Vertex w) {
  if (u == w)
    return false;
  const bool u_core = u == s.root || s.l1.contains(u);
  const bool w_core = w == s.root || s.l1.contains(w);
  if (s.hops == 1)
    return u_core && w_core;
  if (u == s.root || w == s.root)
    return s.l1.contains(u == s.root ? w : u);
  return (s.l1.contains(u) && s.l2.contains(w)) || (s.l2.contains(u) && s.l1.contains(w));
}

bool star_covers(const StarRecord &s, EdgeId e, Vertex n) {
  const auto p = edge_from_id(e, n);
  return star_covers(s, p.u, p.v);
}

namespace {

void finish_members(StarRecord &s) {
  s.members.clear();
  s.members.push_back(s.root);
  s.members.insert(s.members.end(), s.l1.begin(), s.l1.end());
  s.members.insert(s.members.end(), s.l2.begin(), s.l2.end());
  std::sort(s.members.begin(), s.members.end());
}

} // namespace

StarRecord construct_star(const Graph &g, Vertex v, std::uint64_t d) {
  const Vertex n = g.n();
  if (v >= n)
    throw Error(ErrorCode::OutOfRange, "star root out of range");
  if (g.min_degree() < d)
    throw Error(ErrorCode::DegreeTooLow, "graph minimum degree " + std::to_string(g.min_degree()) +
                                             " below " + std::to_string(d));
  StarRecord s;
  s.root = v;
  s.build_degree = d;
  const auto nb = g.neighbors(v);
  const VertexSet gamma(n, std::vector<Vertex>(nb.begin(), nb.end()));

  std::uint64_t inner = 0;
  for (Vertex x : gamma)
    for (Vertex y : g.neighbors(x))
      if (x < y && gamma.contains(y))
        ++inner;
  if (10 * inner >= gamma.size() * d) {
    s.hops = 1;
    s.l1 = peel(g, gamma, (d + 9) / 10).kept;
    finish_members(s);
    return s;
  }

  // Bipartite graph between Gamma(v) and the vertices two hops away.
  std::vector<char> side(n, 0); // 1 = Gamma(v), 2 = second layer
  for (Vertex x : gamma)
    side[x] = 1;
  std::vector<EdgeId> bip;
  for (Vertex x : gamma)
    for (Vertex y : g.neighbors(x))
      if (y != v && side[y] != 1) {
        side[y] = 2;
        bip.push_back(edge_id(x, y, n));
      }
  std::vector<Vertex> layer2;
  for (Vertex y = 0; y < n; ++y)
    if (side[y] == 2)
      layer2.push_back(y);
  std::sort(bip.begin(), bip.end());
  bip.erase(std::unique(bip.begin(), bip.end()), bip.end());
  const Graph b = Graph::from_edge_ids(n, bip);
  std::vector<Vertex> both(gamma.begin(), gamma.end());
  both.insert(both.end(), layer2.begin(), layer2.end());
  const std::uint64_t need = (d * d + 2 * n - 1) / (2 * n);
  const auto kept = peel(b, VertexSet(n, both), std::max<std::uint64_t>(need, 1)).kept;
  std::vector<Vertex> l1, l2;
  for (Vertex x : kept)
    (side[x] == 1 ? l1 : l2).push_back(x);
  if (l1.empty() || l2.empty()) {
    s.hops = 1;
    s.l1 = gamma;
  } else {
    s.hops = 2;
    s.l1 = VertexSet(n, std::move(l1));
    s.l2 = VertexSet(n, std::move(l2));
  }
  finish_members(s);
  return s;
}

StarOracle StarOracle::build(const Graph &g, const StarConfig &cfg) {
  StarOracle o;
  const Vertex n = g.n();
  o.n_ = n;
  o.cfg_ = cfg;
  const double cf = std::cbrt(static_cast<double>(cfg.f));
  o.threshold_ = static_cast<std::uint32_t>(std::max(1.0, std::ceil(cfg.covering_mult * cf - 1e-9)));
  o.target_ = static_cast<std::uint64_t>(
      std::max(1.0, std::ceil(cfg.target_mult * std::sqrt(static_cast<double>(n)) * cf * log2n(n) - 1e-9)));
  o.k_ = static_cast<std::uint32_t>(std::floor(cfg.sketch_mult * cf + 1e-9));
  const std::uint64_t universe = edge_universe(n);
  o.q_ = choose_prime(std::max<std::uint64_t>(universe, 2));
  o.report_.f_in_range = cfg.f >= n && static_cast<double>(cfg.f) <= std::pow(static_cast<double>(n), 1.5);

  const auto &edges = g.edges();
  std::vector<std::uint32_t> counts(edges.size(), 0);
  const auto edge_index = [&](EdgeId e) {
    return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), e) - edges.begin());
  };
  std::vector<char> unused(n, 1);

  const auto unsaturated = [&] {
    std::vector<EdgeId> live;
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (counts[i] < o.threshold_)
        live.push_back(edges[i]);
    return Graph::from_edge_ids(n, live);
  };

  for (std::uint64_t d = n / 2; d >= o.target_ && d >= 1 && !o.report_.roots_exhausted; d /= 2) {
    for (;;) {
      const Graph current = unsaturated();
      const auto kept = peel(current, d).kept;
      if (kept.empty())
        break;
      Vertex root = n;
      for (Vertex v : kept)
        if (unused[v]) {
          root = v;
          break;
        }
      if (root == n) {
        o.report_.roots_exhausted = true;
        break;
      }
      const auto sub = induced_subgraph(current, kept);
      const auto local_root = static_cast<Vertex>(
          std::lower_bound(sub.to_parent.begin(), sub.to_parent.end(), root) - sub.to_parent.begin());
      const StarRecord local = construct_star(sub.graph, local_root, d);

      StarRecord s;
      s.root = root;
      s.hops = local.hops;
      s.build_degree = d;
      s.build_index = static_cast<std::uint32_t>(o.stars_.size());
      std::vector<Vertex> l1, l2;
      for (Vertex x : local.l1)
        l1.push_back(sub.to_parent[x]);
      for (Vertex x : local.l2)
        l2.push_back(sub.to_parent[x]);
      s.l1 = VertexSet(n, std::move(l1));
      s.l2 = VertexSet(n, std::move(l2));
      finish_members(s);
      s.degrees.assign(s.members.size(), 0);
      s.sketches.assign(s.members.size(), SyndromeSketch(universe, o.k_, o.q_));
      for (std::size_t i = 0; i < s.members.size(); ++i) {
        const Vertex x = s.members[i];
        for (Vertex y : current.neighbors(x)) {
          if (!star_covers(s, x, y))
            continue;
          const EdgeId e = edge_id(x, y, n);
          ++s.degrees[i];
          s.sketches[i].update(e.value, +1);
          if (x < y)
            ++counts[edge_index(e)];
        }
      }
      const std::uint64_t dstar = s.min_degree();
      if (static_cast<double>(dstar * dstar) >= 2.0 * cfg.high_mult * static_cast<double>(cfg.f))
        ++o.report_.stars_meeting_degree_condition;
      unused[root] = 0;
      o.stars_.push_back(std::move(s));
    }
    if (d == 1)
      break;
  }
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (counts[i] < o.threshold_)
      o.remaining_.push_back(edges[i]);
  return o;
}

std::vector<std::uint32_t> StarOracle::covering_stars(EdgeId e) const {
  const auto p = edge_from_id(e, n_);
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < stars_.size() && out.size() < threshold_; ++i)
    if (star_covers(stars_[i], p.u, p.v))
      out.push_back(i);
  return out;
}

namespace {

struct StarSession {
  std::vector<std::uint32_t> degrees;
  std::map<std::size_t, SyndromeSketch> sketches;
  std::uint64_t root_decrease = 0;
  std::uint64_t deleted = 0;
};

} // namespace

AuxGraph StarOracle::approximate_graph(std::span<const EdgeId> deletions) const {
  if (deletions.size() > cfg_.f)
    throw Error(ErrorCode::BudgetExceeded,
                std::to_string(deletions.size()) + " deletions exceed budget " + std::to_string(cfg_.f));
  std::vector<EdgeId> sorted(deletions.begin(), deletions.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] == sorted[i - 1])
      throw Error(ErrorCode::InvalidDeletion, "edge deleted twice");

  std::vector<EdgeId> residual = remaining_;
  std::map<std::uint32_t, StarSession> touched;
  for (EdgeId e : deletions) {
    if (e.value >= edge_universe(n_))
      throw Error(ErrorCode::InvalidDeletion, "edge id outside universe");
    const auto p = edge_from_id(e, n_);
    const auto cover = covering_stars(e);
    const auto it = std::lower_bound(residual.begin(), residual.end(), e);
    const bool in_residual = it != residual.end() && *it == e;
    if (cover.size() < threshold_) {
      if (!in_residual)
        throw Error(ErrorCode::InvalidDeletion,
                    "edge " + std::to_string(p.u) + " " + std::to_string(p.v) + " is not in the graph");
      residual.erase(it);
    }
    for (std::uint32_t si : cover) {
      const StarRecord &s = stars_[si];
      auto [st, fresh] = touched.try_emplace(si);
      if (fresh)
        st->second.degrees = s.degrees;
      ++st->second.deleted;
      for (Vertex x : {p.u, p.v}) {
        const std::size_t local = s.local_index(x);
        if (st->second.degrees[local] == 0)
          throw Error(ErrorCode::InvalidDeletion, "star degree underflow at vertex " + std::to_string(x));
        --st->second.degrees[local];
        auto sk = st->second.sketches.try_emplace(local, s.sketches[local]).first;
        sk->second.update(e.value, -1);
        if (x == s.root)
          ++st->second.root_decrease;
      }
    }
  }

  AuxGraph aux(n_);
  for (EdgeId e : residual) {
    const auto p = edge_from_id(e, n_);
    aux.add_edge(p.u, p.v);
  }
  const double cf = std::cbrt(static_cast<double>(cfg_.f));
  const double lg = log2n(n_);
  const auto literal_high =
      static_cast<std::uint64_t>(std::max(1.0, std::ceil(cfg_.high_mult * cf / (lg * lg) - 1e-9)));
  std::vector<std::uint64_t> candidates;

  for (std::uint32_t si = 0; si < stars_.size(); ++si) {
    const StarRecord &s = stars_[si];
    const auto st = touched.find(si);
    const auto degree = [&](std::size_t local) {
      return st == touched.end() ? s.degrees[local] : st->second.degrees[local];
    };
    const auto sketch = [&](std::size_t local) -> const SyndromeSketch & {
      if (st != touched.end()) {
        const auto it = st->second.sketches.find(local);
        if (it != st->second.sketches.end())
          return it->second;
      }
      return s.sketches[local];
    };
    const std::uint64_t root_decrease = st == touched.end() ? 0 : st->second.root_decrease;
    const std::uint64_t deleted = st == touched.end() ? 0 : st->second.deleted;
    const std::uint64_t dstar = s.min_degree();

    bool gated = false;
    std::uint64_t high_threshold = 1;
    if (cfg_.gate == StarGate::Literal) {
      gated = 2 * root_decrease <= target_;
      high_threshold = literal_high;
    } else {
      gated = dstar > 0 && 2 * root_decrease <= dstar &&
              static_cast<double>(dstar * dstar) >= 2.0 * cfg_.high_mult * static_cast<double>(deleted);
      if (dstar > 0)
        high_threshold = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(std::ceil(cfg_.high_mult * static_cast<double>(deleted) /
                                                        static_cast<double>(dstar) - 1e-9)));
    }

    std::vector<Vertex> high_core, high_outer;
    for (std::size_t local = 0; local < s.members.size(); ++local) {
      const Vertex x = s.members[local];
      const std::uint32_t deg = degree(local);
      if (gated && deg >= high_threshold) {
        (s.l2.contains(x) ? high_outer : high_core).push_back(x);
        continue;
      }
      if (deg == 0)
        continue;
      if (deg > k_) {
        if (gated)
          throw Error(ErrorCode::DecodeFailure, "low vertex " + std::to_string(x) + " in star " +
                                                    std::to_string(si) + " exceeds sketch capacity");
        continue;
      }
      candidates.clear();
      for (Vertex y : s.members)
        if (star_covers(s, x, y))
          candidates.push_back(edge_id(x, y, n_).value);
      const auto decoded = sketch(local).decode(candidates);
      if (!decoded || decoded->size() != deg)
        throw Error(ErrorCode::DecodeFailure,
                    "sketch of vertex " + std::to_string(x) + " in star " + std::to_string(si) + " not decodable");
      for (std::uint64_t id : *decoded) {
        const auto p = edge_from_id(EdgeId{id}, n_);
        aux.add_edge(p.u, p.v);
      }
    }
    if (s.hops == 1) {
      aux.add_clique(std::move(high_core));
    } else {
      aux.add_biclique(high_core, std::move(high_outer));
      aux.add_clique(std::move(high_core));
    }
  }
  return aux;
}

Distance StarOracle::report_distance(std::span<const EdgeId> deletions, Vertex s, Vertex t) const {
  if (s >= n_ || t >= n_)
    throw Error(ErrorCode::OutOfRange, "query vertex out of range");
  const auto aux = approximate_graph(deletions);
  if (s == t)
    return Distance(0);
  return aux.distance(s, t).scaled(kStretch);
}

namespace {
void write_double(BitWriter &w, double x) { w.write_u64(std::bit_cast<std::uint64_t>(x)); }
double read_double(BitReader &r) { return std::bit_cast<double>(r.read_u64()); }

void write_set(BitWriter &w, const VertexSet &s, unsigned vbits) {
  w.write(s.size(), 32);
  for (Vertex v : s)
    w.write(v, vbits);
}

VertexSet read_set(BitReader &r, Vertex n, unsigned vbits) {
  const std::uint64_t size = r.read(32);
  if (size > n)
    throw Error(ErrorCode::CorruptData, "vertex set larger than graph");
  std::vector<Vertex> vs(size);
  for (auto &v : vs) {
    v = static_cast<Vertex>(r.read(vbits));
    if (v >= n)
      throw Error(ErrorCode::CorruptData, "vertex out of range");
  }
  return VertexSet(n, std::move(vs));
}
} // namespace

std::vector<std::uint8_t> StarOracle::serialize() const {
  BitWriter w;
  write_header(w, ArtifactKind::StarOracle);
  w.write(n_, 32);
  w.write_u64(cfg_.f);
  write_double(w, cfg_.covering_mult);
  write_double(w, cfg_.target_mult);
  write_double(w, cfg_.sketch_mult);
  write_double(w, cfg_.high_mult);
  w.write(static_cast<std::uint64_t>(cfg_.gate), 8);
  w.write(threshold_, 32);
  w.write_u64(target_);
  w.write(k_, 32);
  w.write_u64(q_);
  w.write(report_.f_in_range, 1);
  w.write(report_.roots_exhausted, 1);
  w.write(report_.stars_meeting_degree_condition, 32);
  const unsigned vbits = bits_for(std::max<Vertex>(n_, 2));
  w.write(stars_.size(), 32);
  for (const auto &s : stars_) {
    w.write(s.root, vbits);
    w.write(s.hops, 2);
    w.write(s.build_degree, 32);
    write_set(w, s.l1, vbits);
    write_set(w, s.l2, vbits);
    for (std::uint32_t d : s.degrees)
      w.write(d, vbits);
    for (const auto &sk : s.sketches)
      sk.write_body(w);
  }
  const unsigned ebits = bits_for(std::max<std::uint64_t>(edge_universe(n_), 2));
  w.write_u64(remaining_.size());
  for (EdgeId e : remaining_)
    w.write(e.value, ebits);
  return w.bytes();
}

StarOracle StarOracle::deserialize(std::span<const std::uint8_t> bytes) {
  BitReader r(bytes);
  read_header(r, ArtifactKind::StarOracle);
  StarOracle o;
  o.n_ = static_cast<Vertex>(r.read(32));
  o.cfg_.f = r.read_u64();
  o.cfg_.covering_mult = read_double(r);
  o.cfg_.target_mult = read_double(r);
  o.cfg_.sketch_mult = read_double(r);
  o.cfg_.high_mult = read_double(r);
  const std::uint64_t gate = r.read(8);
  if (gate > 1)
    throw Error(ErrorCode::CorruptData, "unknown gate");
  o.cfg_.gate = static_cast<StarGate>(gate);
  o.threshold_ = static_cast<std::uint32_t>(r.read(32));
  o.target_ = r.read_u64();
  o.k_ = static_cast<std::uint32_t>(r.read(32));
  o.q_ = r.read_u64();
  o.report_.f_in_range = r.read(1) != 0;
  o.report_.roots_exhausted = r.read(1) != 0;
  o.report_.stars_meeting_degree_condition = r.read(32);
  const std::uint64_t universe = edge_universe(o.n_);
  if (o.q_ < universe || !is_prime(o.q_) || o.threshold_ == 0)
    throw Error(ErrorCode::CorruptData, "bad star oracle parameters");
  const unsigned vbits = bits_for(std::max<Vertex>(o.n_, 2));
  const std::uint64_t count = r.read(32);
  if (count > o.n_)
    throw Error(ErrorCode::CorruptData, "more stars than roots");
  for (std::uint64_t i = 0; i < count; ++i) {
    StarRecord s;
    s.root = static_cast<Vertex>(r.read(vbits));
    s.hops = static_cast<std::uint8_t>(r.read(2));
    s.build_degree = r.read(32);
    s.l1 = read_set(r, o.n_, vbits);
    s.l2 = read_set(r, o.n_, vbits);
    s.build_index = static_cast<std::uint32_t>(i);
    finish_members(s);
    s.degrees.resize(s.members.size());
    for (auto &d : s.degrees)
      d = static_cast<std::uint32_t>(r.read(vbits));
    s.sketches.assign(s.members.size(), SyndromeSketch(universe, o.k_, o.q_));
    for (auto &sk : s.sketches)
      sk.read_body(r);
    o.stars_.push_back(std::move(s));
  }
  const unsigned ebits = bits_for(std::max<std::uint64_t>(universe, 2));
  const std::uint64_t rcount = r.read_u64();
  if (rcount > universe)
    throw Error(ErrorCode::CorruptData, "residual larger than universe");
  for (std::uint64_t i = 0; i < rcount; ++i) {
    const std::uint64_t id = r.read(ebits);
    if (id >= universe)
      throw Error(ErrorCode::CorruptData, "residual edge outside universe");
    o.remaining_.push_back(EdgeId{id});
  }
  return o;
}

} // namespace ftdo
