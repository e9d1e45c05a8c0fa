#include "ftdo/expander_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

#include "ftdo/error.hpp"
#include "ftdo/field.hpp"

namespace ftdo {

double log2n(Vertex n) { return n <= 2 ? 1.0 : std::log2(static_cast<double>(n)); }

std::uint64_t oracle_degree(Vertex n, const OracleConfig &cfg) {
  const double d = cfg.c_D * std::sqrt(static_cast<double>(cfg.f)) * std::pow(log2n(n), cfg.deg_exponent);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(d - 1e-9)));
}

double oracle_stop_threshold(Vertex n, const OracleConfig &cfg) {
  return cfg.c_stop * static_cast<double>(n) * std::sqrt(static_cast<double>(cfg.f)) *
         std::pow(log2n(n), 2 + cfg.deg_exponent);
}

std::uint64_t oracle_stretch(Vertex n, const OracleConfig &cfg) {
  const double lg = log2n(n);
  const double raw = cfg.deg_exponent >= 2 ? cfg.c_stretch * lg * lg * lg
                                           : cfg.c_stretch * lg * std::log2(lg + 2.0);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(raw - 1e-9)));
}

std::size_t ExpanderComponent::local_index(Vertex v) const {
  const auto &m = vertices.members();
  const auto it = std::lower_bound(m.begin(), m.end(), v);
  if (it == m.end() || *it != v)
    throw Error(ErrorCode::OutOfRange, "vertex not in component");
  return static_cast<std::size_t>(it - m.begin());
}

ExpanderOracle ExpanderOracle::build(const Graph &g, const OracleConfig &cfg) {
  if (cfg.f > edge_universe(g.n()))
    throw Error(ErrorCode::OutOfRange, "fault budget exceeds the edge universe");
  if (cfg.deg_exponent < 1 || cfg.deg_exponent > 2)
    throw Error(ErrorCode::OutOfRange, "deg_exponent must be 1 or 2");
  ExpanderOracle o;
  o.n_ = g.n();
  o.cfg_ = cfg;
  o.D_ = oracle_degree(g.n(), cfg);
  o.k_ = static_cast<std::uint32_t>(4 * cfg.f / o.D_);
  const std::uint64_t universe = edge_universe(g.n());
  o.q_ = choose_prime(std::max<std::uint64_t>(universe, 2));
  o.stretch_ = oracle_stretch(g.n(), cfg);

  DecompositionConfig dc;
  dc.D = o.D_;
  dc.phi_target = cfg.phi_target.value_or(default_phi_target(g.n()));
  dc.peel_multiplier = cfg.peel_multiplier;

  const double stop = oracle_stop_threshold(g.n(), cfg);
  Graph current = g;
  while (static_cast<double>(current.m()) >= stop && current.m() > 0 && o.levels_.size() < cfg.max_levels) {
    const auto level = static_cast<std::uint32_t>(o.levels_.size());
    const auto dec = decompose(current, dc);
    if (dec.components.empty())
      break;
    std::vector<ExpanderComponent> comps;
    for (const auto &vs : dec.components) {
      ExpanderComponent c;
      c.level = level;
      c.vertices = vs;
      c.degrees.assign(vs.size(), 0);
      c.sketches.assign(vs.size(), SyndromeSketch(universe, o.k_, o.q_));
      const auto &m = vs.members();
      for (std::size_t i = 0; i < m.size(); ++i)
        for (Vertex w : current.neighbors(m[i]))
          if (vs.contains(w)) {
            ++c.degrees[i];
            c.sketches[i].update(edge_id(m[i], w, g.n()).value, +1);
          }
      comps.push_back(std::move(c));
    }
    o.levels_.push_back(std::move(comps));
    current = Graph::from_edge_ids(g.n(), dec.crossing);
  }
  o.residual_ = current.edges();
  o.index_levels();
  return o;
}

void ExpanderOracle::index_levels() {
  owner_.assign(levels_.size(), std::vector<std::uint32_t>(n_, UINT32_MAX));
  for (std::size_t j = 0; j < levels_.size(); ++j)
    for (std::size_t i = 0; i < levels_[j].size(); ++i)
      for (Vertex v : levels_[j][i].vertices)
        owner_[j][v] = static_cast<std::uint32_t>(i);
}

std::optional<ComponentRef> ExpanderOracle::locate_edge(EdgeId e) const {
  const auto p = edge_from_id(e, n_);
  for (std::size_t j = 0; j < owner_.size(); ++j) {
    const std::uint32_t a = owner_[j][p.u];
    if (a != UINT32_MAX && a == owner_[j][p.v])
      return ComponentRef{static_cast<std::uint32_t>(j), a};
  }
  if (!std::binary_search(residual_.begin(), residual_.end(), e))
    throw Error(ErrorCode::UnknownEdge,
                "edge " + std::to_string(p.u) + " " + std::to_string(p.v) + " is not in the build-time graph");
  return std::nullopt;
}

QuerySession ExpanderOracle::open_session(std::span<const EdgeId> deletions) const {
  if (deletions.size() > cfg_.f)
    throw Error(ErrorCode::BudgetExceeded,
                std::to_string(deletions.size()) + " deletions exceed budget " + std::to_string(cfg_.f));
  QuerySession s;
  s.oracle_ = this;
  s.deletions_.assign(deletions.begin(), deletions.end());
  s.residual_ = residual_;
  std::vector<EdgeId> sorted = s.deletions_;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] == sorted[i - 1])
      throw Error(ErrorCode::InvalidDeletion, "edge deleted twice");
  for (EdgeId e : s.deletions_) {
    std::optional<ComponentRef> where;
    try {
      where = locate_edge(e);
    } catch (const Error &err) {
      if (err.code() == ErrorCode::UnknownEdge || err.code() == ErrorCode::OutOfRange)
        throw Error(ErrorCode::InvalidDeletion, err.what());
      throw;
    }
    if (!where) {
      const auto it = std::lower_bound(s.residual_.begin(), s.residual_.end(), e);
      s.residual_.erase(it);
      continue;
    }
    const auto &comp = component(*where);
    const auto p = edge_from_id(e, n_);
    for (Vertex v : {p.u, p.v}) {
      const auto local = comp.local_index(v);
      const QuerySession::Key key{where->level, where->index, static_cast<std::uint32_t>(local)};
      auto it = s.touched_.find(key);
      if (it == s.touched_.end())
        it = s.touched_.emplace(key, QuerySession::VertexState{comp.degrees[local], comp.sketches[local]}).first;
      if (it->second.degree == 0)
        throw Error(ErrorCode::InvalidDeletion, "vertex " + std::to_string(v) + " has no remaining edges");
      --it->second.degree;
      it->second.sketch.update(e.value, -1);
    }
  }
  return s;
}

std::uint32_t QuerySession::degree(ComponentRef c, std::size_t local) const {
  const auto it = touched_.find({c.level, c.index, static_cast<std::uint32_t>(local)});
  return it != touched_.end() ? it->second.degree : oracle_->component(c).degrees[local];
}

const SyndromeSketch &QuerySession::sketch(ComponentRef c, std::size_t local) const {
  const auto it = touched_.find({c.level, c.index, static_cast<std::uint32_t>(local)});
  return it != touched_.end() ? it->second.sketch : oracle_->component(c).sketches[local];
}

void append_expander_component(AuxGraph &out, const VertexSet &vertices, std::uint32_t k,
                               const std::function<std::uint32_t(std::size_t)> &degree,
                               const std::function<const SyndromeSketch &(std::size_t)> &sketch,
                               std::uint64_t weight) {
  const Vertex n = out.n();
  const auto &members = vertices.members();
  std::vector<Vertex> high;
  std::vector<std::uint64_t> candidates;
  for (std::size_t local = 0; local < members.size(); ++local) {
    const Vertex v = members[local];
    const std::uint32_t deg = degree(local);
    if (deg >= k + 1) {
      high.push_back(v);
      continue;
    }
    if (deg == 0)
      continue;
    candidates.clear();
    for (Vertex w : members)
      if (w != v)
        candidates.push_back(edge_id(v, w, n).value);
    const auto decoded = sketch(local).decode(candidates);
    if (!decoded || decoded->size() != deg)
      throw Error(ErrorCode::DecodeFailure, "sketch of vertex " + std::to_string(v) + " is not decodable");
    for (std::uint64_t id : *decoded) {
      const auto p = edge_from_id(EdgeId{id}, n);
      out.add_edge(p.u, p.v, weight);
    }
  }
  out.add_clique(std::move(high), weight);
}

void QuerySession::append_to(AuxGraph &out, std::uint64_t weight) const {
  const Vertex n = oracle_->n();
  for (EdgeId e : residual_) {
    const auto p = edge_from_id(e, n);
    out.add_edge(p.u, p.v, weight);
  }
  const auto &levels = oracle_->levels();
  for (std::uint32_t j = 0; j < levels.size(); ++j)
    for (std::uint32_t i = 0; i < levels[j].size(); ++i) {
      const ComponentRef ref{j, i};
      append_expander_component(
          out, levels[j][i].vertices, oracle_->k(), [&](std::size_t local) { return degree(ref, local); },
          [&](std::size_t local) -> const SyndromeSketch & { return sketch(ref, local); }, weight);
    }
}

const AuxGraph &QuerySession::aux() const {
  if (!aux_) {
    auto h = std::make_shared<AuxGraph>(oracle_->n());
    append_to(*h, 1);
    aux_ = std::move(h);
  }
  return *aux_;
}

Distance QuerySession::aux_distance(Vertex a, Vertex b) const {
  if (a >= n() || b >= n())
    throw Error(ErrorCode::OutOfRange, "query vertex out of range");
  if (a == b)
    return Distance(0);
  return aux().distance(a, b);
}

Distance QuerySession::query_distance(Vertex a, Vertex b) const {
  return aux_distance(a, b).scaled(oracle_->stretch());
}

namespace {

void write_double(BitWriter &w, double x) { w.write_u64(std::bit_cast<std::uint64_t>(x)); }
double read_double(BitReader &r) { return std::bit_cast<double>(r.read_u64()); }

} // namespace

void ExpanderOracle::write_body(BitWriter &w) const {
  w.write(n_, 32);
  w.write_u64(cfg_.f);
  write_double(w, cfg_.c_D);
  write_double(w, cfg_.c_stop);
  write_double(w, cfg_.c_stretch);
  w.write(static_cast<std::uint64_t>(cfg_.deg_exponent), 8);
  write_double(w, cfg_.peel_multiplier);
  w.write(cfg_.phi_target ? 1 : 0, 1);
  if (cfg_.phi_target) {
    w.write_i64(cfg_.phi_target->num());
    w.write_i64(cfg_.phi_target->den());
  }
  w.write(cfg_.max_levels, 32);
  w.write_u64(D_);
  w.write(k_, 32);
  w.write_u64(q_);
  w.write_u64(stretch_);
  const unsigned vbits = bits_for(std::max<Vertex>(n_, 2));
  w.write(levels_.size(), 32);
  for (const auto &level : levels_) {
    w.write(level.size(), 32);
    for (const auto &c : level) {
      w.write(c.vertices.size(), 32);
      for (Vertex v : c.vertices)
        w.write(v, vbits);
      for (std::uint32_t d : c.degrees)
        w.write(d, vbits);
      for (const auto &s : c.sketches)
        s.write_body(w);
    }
  }
  const unsigned ebits = bits_for(std::max<std::uint64_t>(edge_universe(n_), 2));
  w.write_u64(residual_.size());
  for (EdgeId e : residual_)
    w.write(e.value, ebits);
}

ExpanderOracle ExpanderOracle::read_body(BitReader &r) {
  ExpanderOracle o;
  o.n_ = static_cast<Vertex>(r.read(32));
  o.cfg_.f = r.read_u64();
  o.cfg_.c_D = read_double(r);
  o.cfg_.c_stop = read_double(r);
  o.cfg_.c_stretch = read_double(r);
  o.cfg_.deg_exponent = static_cast<int>(r.read(8));
  o.cfg_.peel_multiplier = read_double(r);
  if (r.read(1)) {
    const std::int64_t num = r.read_i64();
    const std::int64_t den = r.read_i64();
    if (den <= 0)
      throw Error(ErrorCode::CorruptData, "bad phi target");
    o.cfg_.phi_target = Rational(num, den);
  }
  o.cfg_.max_levels = static_cast<std::uint32_t>(r.read(32));
  o.D_ = r.read_u64();
  o.k_ = static_cast<std::uint32_t>(r.read(32));
  o.q_ = r.read_u64();
  o.stretch_ = r.read_u64();
  const std::uint64_t universe = edge_universe(o.n_);
  if (o.q_ < universe || !is_prime(o.q_) || o.k_ > 4 * universe + 4)
    throw Error(ErrorCode::CorruptData, "bad oracle parameters");
  const unsigned vbits = bits_for(std::max<Vertex>(o.n_, 2));
  const std::uint64_t level_count = r.read(32);
  for (std::uint64_t j = 0; j < level_count; ++j) {
    std::vector<ExpanderComponent> level;
    const std::uint64_t comp_count = r.read(32);
    for (std::uint64_t i = 0; i < comp_count; ++i) {
      ExpanderComponent c;
      c.level = static_cast<std::uint32_t>(j);
      const std::uint64_t size = r.read(32);
      if (size > o.n_)
        throw Error(ErrorCode::CorruptData, "component larger than graph");
      std::vector<Vertex> vs(size);
      for (auto &v : vs)
        v = static_cast<Vertex>(r.read(vbits));
      c.vertices = VertexSet(o.n_, std::move(vs));
      if (c.vertices.size() != size)
        throw Error(ErrorCode::CorruptData, "repeated component vertex");
      c.degrees.resize(size);
      for (auto &d : c.degrees)
        d = static_cast<std::uint32_t>(r.read(vbits));
      c.sketches.assign(size, SyndromeSketch(universe, o.k_, o.q_));
      for (auto &s : c.sketches)
        s.read_body(r);
      level.push_back(std::move(c));
    }
    o.levels_.push_back(std::move(level));
  }
  const unsigned ebits = bits_for(std::max<std::uint64_t>(universe, 2));
  const std::uint64_t rcount = r.read_u64();
  if (rcount > universe)
    throw Error(ErrorCode::CorruptData, "residual larger than universe");
  for (std::uint64_t i = 0; i < rcount; ++i) {
    const std::uint64_t id = r.read(ebits);
    if (id >= universe)
      throw Error(ErrorCode::CorruptData, "residual edge outside universe");
    o.residual_.push_back(EdgeId{id});
  }
  o.index_levels();
  return o;
}

std::vector<std::uint8_t> ExpanderOracle::serialize() const {
  BitWriter w;
  write_header(w, ArtifactKind::ExpanderOracle);
  write_body(w);
  return w.bytes();
}

ExpanderOracle ExpanderOracle::deserialize(std::span<const std::uint8_t> bytes) {
  BitReader r(bytes);
  read_header(r, ArtifactKind::ExpanderOracle);
  return read_body(r);
}

std::size_t weight_bucket(std::uint64_t w) {
  if (w == 0)
    throw Error(ErrorCode::OutOfRange, "weights must be positive");
  return static_cast<std::size_t>(std::bit_width(w) - 1);
}

WeightedOracle WeightedOracle::build(const WeightedGraph &g, const OracleConfig &cfg) {
  WeightedOracle o;
  o.n_ = g.graph.n();
  o.cfg_ = cfg;
  std::vector<std::vector<EdgeId>> per_bucket;
  const auto &edges = g.graph.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::size_t b = weight_bucket(g.weights.at(i));
    if (per_bucket.size() <= b)
      per_bucket.resize(b + 1);
    per_bucket[b].push_back(edges[i]);
  }
  o.buckets_.resize(per_bucket.size());
  for (std::size_t b = 0; b < per_bucket.size(); ++b)
    if (!per_bucket[b].empty())
      o.buckets_[b] = ExpanderOracle::build(Graph::from_edge_ids(o.n_, per_bucket[b]), cfg);
  return o;
}

std::size_t WeightedOracle::populated_buckets() const {
  return static_cast<std::size_t>(
      std::count_if(buckets_.begin(), buckets_.end(), [](const auto &b) { return b.has_value(); }));
}

std::uint64_t WeightedOracle::stretch() const { return 2 * oracle_stretch(n_, cfg_); }

AuxGraph WeightedOracle::combined(std::span<const WeightedDeletion> deletions) const {
  if (deletions.size() > cfg_.f)
    throw Error(ErrorCode::BudgetExceeded, "too many deletions");
  std::vector<std::vector<EdgeId>> routed(buckets_.size());
  for (const auto &d : deletions) {
    const std::size_t b = weight_bucket(d.weight);
    if (b >= buckets_.size() || !buckets_[b])
      throw Error(ErrorCode::InvalidDeletion, "no edges of weight " + std::to_string(d.weight));
    routed[b].push_back(d.edge);
  }
  AuxGraph aux(n_);
  for (std::size_t b = 0; b < buckets_.size(); ++b)
    if (buckets_[b]) {
      const auto session = buckets_[b]->open_session(routed[b]);
      session.append_to(aux, std::uint64_t{1} << b);
    }
  return aux;
}

Distance WeightedOracle::aux_distance(std::span<const WeightedDeletion> deletions, Vertex a, Vertex b) const {
  if (a >= n_ || b >= n_)
    throw Error(ErrorCode::OutOfRange, "query vertex out of range");
  const auto aux = combined(deletions);
  return a == b ? Distance(0) : aux.distance(a, b);
}

Distance WeightedOracle::query(std::span<const WeightedDeletion> deletions, Vertex a, Vertex b) const {
  return aux_distance(deletions, a, b).scaled(stretch());
}

std::vector<std::uint8_t> WeightedOracle::serialize() const {
  BitWriter w;
  write_header(w, ArtifactKind::WeightedOracle);
  w.write(n_, 32);
  w.write(buckets_.size(), 8);
  for (const auto &b : buckets_) {
    w.write(b ? 1 : 0, 1);
    if (b)
      b->write_body(w);
  }
  return w.bytes();
}

WeightedOracle WeightedOracle::deserialize(std::span<const std::uint8_t> bytes) {
  BitReader r(bytes);
  read_header(r, ArtifactKind::WeightedOracle);
  WeightedOracle o;
  o.n_ = static_cast<Vertex>(r.read(32));
  o.buckets_.resize(r.read(8));
  for (auto &b : o.buckets_)
    if (r.read(1)) {
      b = ExpanderOracle::read_body(r);
      o.cfg_ = b->config();
    }
  return o;
}

} // namespace ftdo
