#include "ftdo/spanner_sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

#include "ftdo/decomposition.hpp"
#include "ftdo/error.hpp"
#include "ftdo/expander_oracle.hpp"
#include "ftdo/hashing.hpp"

namespace ftdo {

namespace {

constexpr std::uint64_t kVertexLabel = 0;
constexpr std::uint64_t kComponentLabel = 1;

void write_double(BitWriter &w, double x) { w.write_u64(std::bit_cast<std::uint64_t>(x)); }
double read_double(BitReader &r) { return std::bit_cast<double>(r.read_u64()); }

bool contains_sorted(std::span<const EdgeId> sorted, EdgeId e) {
  return std::binary_search(sorted.begin(), sorted.end(), e);
}

} // namespace

std::uint64_t spanner_stretch(Vertex n, const SpannerConfig &cfg) {
  const double lg = log2n(n);
  const double lglg = std::max(1.0, std::log2(lg));
  return static_cast<std::uint64_t>(std::max(1.0, std::ceil(cfg.c_span * lg * lglg - 1e-9)));
}

double spanner_ladder_floor(Vertex n, const SpannerConfig &cfg) {
  return cfg.c_ladder * std::sqrt(static_cast<double>(cfg.f)) * log2n(n);
}

double spanner_delta(Vertex n, const SpannerConfig &cfg) {
  return std::min(0.5, std::pow(static_cast<double>(std::max<Vertex>(n, 2)), -cfg.delta_exp));
}

std::uint64_t bundle_seed(std::uint64_t master, std::uint64_t D, std::uint32_t level, std::uint32_t ordinal,
                          Vertex v, std::size_t copy) {
  return derive_seed(master, {D, level, ordinal, kVertexLabel, v, copy});
}

std::uint64_t component_sampler_seed(std::uint64_t master, std::uint64_t D, std::uint32_t level,
                                     std::uint32_t ordinal, std::size_t copy) {
  return derive_seed(master, {D, level, ordinal, kComponentLabel, copy});
}

std::size_t SpannerComponent::local_index(Vertex v) const {
  const auto &m = vertices.members();
  const auto it = std::lower_bound(m.begin(), m.end(), v);
  if (it == m.end() || *it != v)
    throw Error(ErrorCode::OutOfRange, "vertex not in component");
  return static_cast<std::size_t>(it - m.begin());
}

SpannerComponent make_spanner_component(Vertex n, const SpannerConfig &cfg, std::uint64_t seed, std::uint64_t D,
                                 std::uint32_t rung, std::uint32_t level, std::uint32_t ordinal, VertexSet vs,
                                 std::uint64_t edge_count) {
  const std::uint64_t universe = std::max<std::uint64_t>(edge_universe(n), 1);
  const double delta = spanner_delta(n, cfg);
  SpannerComponent c;
  c.D = D;
  c.rung = rung;
  c.level = level;
  c.ordinal = ordinal;
  c.vertices = std::move(vs);
  c.edge_count = edge_count;
  c.sparsity = static_cast<std::size_t>(4 * cfg.f / D);
  c.degrees.assign(c.vertices.size(), 0);
  c.bundles.resize(c.vertices.size());
  const auto &m = c.vertices.members();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t copy = 0; copy <= c.sparsity; ++copy) {
      const std::uint64_t s = bundle_seed(seed, D, level, ordinal, m[i], copy);
      c.bundles[i].push_back(NeighborhoodCopy{SparseRecovery(universe, c.sparsity, derive_seed(s, {0})),
                                              L0Sketch(universe, delta, derive_seed(s, {1}))});
    }
  const double lg = log2n(n);
  const auto samplers = static_cast<std::size_t>(std::max(
      1.0, std::ceil(cfg.c_comp * static_cast<double>(edge_count) * std::pow(lg, cfg.comp_log_exp) /
                         static_cast<double>(D) - 1e-9)));
  c.edge_samplers.reserve(samplers);
  for (std::size_t copy = 0; copy < samplers; ++copy)
    c.edge_samplers.emplace_back(universe, delta, component_sampler_seed(seed, D, level, ordinal, copy));
  return c;
}

void update_component_edge(SpannerComponent &c, EdgeId e, Vertex n, int sign) {
  const auto p = edge_from_id(e, n);
  for (Vertex x : {p.u, p.v}) {
    const std::size_t local = c.local_index(x);
    if (sign < 0 && c.degrees[local] == 0)
      throw Error(ErrorCode::InvalidDeletion, "component degree underflow at vertex " + std::to_string(x));
    c.degrees[local] = sign < 0 ? c.degrees[local] - 1 : c.degrees[local] + 1;
    for (auto &copy : c.bundles[local])
      copy.update(e.value, sign);
  }
  for (auto &sampler : c.edge_samplers)
    sampler.update(e.value, sign);
}

void open_component(const SpannerComponent &c, std::span<const EdgeId> removed, Vertex n,
                    std::vector<EdgeId> &out, SpannerRecovery &stats) {
  const std::uint64_t universe = edge_universe(n);
  const auto &m = c.vertices.members();
  std::vector<L0Sketch> samplers;
  bool samplers_copied = false;
  std::set<std::uint64_t> subtracted;

  for (std::size_t i = 0; i < m.size(); ++i) {
    const Vertex x = m[i];
    const std::uint32_t deg = c.degrees[i];
    if (deg == 0)
      continue;
    std::set<std::uint64_t> found;
    const auto accept = [&](std::uint64_t id) {
      if (id >= universe) {
        ++stats.rejected_edges;
        return;
      }
      const auto p = edge_from_id(EdgeId{id}, n);
      const Vertex other = p.u == x ? p.v : (p.v == x ? p.u : n);
      if (other == n || !c.vertices.contains(other) || contains_sorted(removed, EdgeId{id})) {
        ++stats.rejected_edges;
        return;
      }
      found.insert(id);
    };
    for (const auto &copy : c.bundles[i]) {
      for (std::uint64_t id : copy.exact.recover().elements)
        accept(id);
      const L0Sample sample = copy.sampler.sample();
      if (sample.kind == L0Sample::Kind::Element)
        accept(sample.element);
    }
    if (deg <= c.sparsity) {
      if (found.size() != deg)
        throw Error(ErrorCode::SamplerExhausted,
                    "vertex " + std::to_string(x) + " recovered " + std::to_string(found.size()) + " of " +
                        std::to_string(deg) + " neighbors");
      ++stats.decoded_vertices;
      if (2 * static_cast<std::uint64_t>(deg) < c.D) {
        if (!samplers_copied) {
          samplers = c.edge_samplers;
          samplers_copied = true;
        }
        for (std::uint64_t id : found)
          if (subtracted.insert(id).second)
            for (auto &sampler : samplers)
              sampler.update(id, -1);
      }
    }
    for (std::uint64_t id : found)
      out.push_back(EdgeId{id});
  }

  const auto &opened = samplers_copied ? samplers : c.edge_samplers;
  for (const auto &sampler : opened) {
    const L0Sample sample = sampler.sample();
    if (sample.kind != L0Sample::Kind::Element)
      continue;
    const std::uint64_t id = sample.element;
    if (id >= universe) {
      ++stats.rejected_edges;
      continue;
    }
    const auto p = edge_from_id(EdgeId{id}, n);
    if (!c.vertices.contains(p.u) || !c.vertices.contains(p.v) || contains_sorted(removed, EdgeId{id})) {
      ++stats.rejected_edges;
      continue;
    }
    out.push_back(EdgeId{id});
    ++stats.sampled_edges;
  }
}

SpannerSketch SpannerSketch::build(const Graph &g, const SpannerConfig &cfg, std::uint64_t seed) {
  const Vertex n = g.n();
  if (cfg.f > edge_universe(n))
    throw Error(ErrorCode::OutOfRange, "fault budget exceeds the edge universe");
  SpannerSketch s;
  s.n_ = n;
  s.cfg_ = cfg;
  s.seed_ = seed;
  const double floor_degree = spanner_ladder_floor(n, cfg);
  for (std::uint64_t D = n / 2; D >= 1 && static_cast<double>(D) >= floor_degree; D /= 2)
    s.ladder_.push_back(D);

  DecompositionConfig dc;
  dc.phi_target = cfg.phi_target.value_or(default_phi_target(n));
  dc.peel_multiplier = cfg.peel_multiplier;
  const double lg = log2n(n);
  std::vector<EdgeId> residual = g.edges();
  for (std::uint32_t rung = 0; rung < s.ladder_.size(); ++rung) {
    const std::uint64_t D = s.ladder_[rung];
    dc.D = D;
    const double stop = cfg.c_level * static_cast<double>(n) * static_cast<double>(D) * lg * lg;
    for (std::uint32_t level = 0; level < cfg.max_levels; ++level) {
      const Graph current = Graph::from_edge_ids(n, residual);
      if (current.m() == 0 || static_cast<double>(current.m()) < stop)
        break;
      const auto dec = decompose(current, dc);
      if (dec.components.empty())
        break;
      for (std::uint32_t j = 0; j < dec.components.size(); ++j) {
        const auto &vs = dec.components[j];
        const Graph inside = induced_edges(current, vs);
        SpannerComponent c = make_spanner_component(n, cfg, seed, D, rung, level, j, vs, inside.m());
        const auto &m = c.vertices.members();
        for (std::size_t i = 0; i < m.size(); ++i) {
          c.degrees[i] = static_cast<std::uint32_t>(inside.degree(m[i]));
          for (Vertex w : inside.neighbors(m[i])) {
            const std::uint64_t e = edge_id(m[i], w, n).value;
            for (auto &copy : c.bundles[i])
              copy.update(e, +1);
          }
        }
        for (EdgeId e : inside.edges())
          for (auto &sampler : c.edge_samplers)
            sampler.update(e.value, +1);
        s.components_.push_back(std::move(c));
      }
      residual = dec.crossing;
    }
  }
  s.residual_ = std::move(residual);
  s.index_components();
  return s;
}

void SpannerSketch::index_components() {
  owner_.clear();
  group_of_.clear();
  std::pair<std::uint32_t, std::uint32_t> last{UINT32_MAX, UINT32_MAX};
  for (std::uint32_t i = 0; i < components_.size(); ++i) {
    const auto &c = components_[i];
    if (std::pair(c.rung, c.level) != last) {
      owner_.emplace_back(n_, 0);
      last = {c.rung, c.level};
    }
    group_of_.push_back(static_cast<std::uint32_t>(owner_.size() - 1));
    for (Vertex v : c.vertices)
      owner_.back()[v] = i + 1;
  }
}

std::optional<std::size_t> SpannerSketch::locate_edge(EdgeId e) const {
  const auto p = edge_from_id(e, n_);
  for (const auto &owner : owner_)
    if (owner[p.u] != 0 && owner[p.u] == owner[p.v])
      return owner[p.u] - 1;
  return std::nullopt;
}

SpannerRecovery SpannerSketch::recover(std::span<const EdgeId> deletions) const {
  if (deletions.size() > cfg_.f)
    throw Error(ErrorCode::BudgetExceeded,
                std::to_string(deletions.size()) + " deletions exceed budget " + std::to_string(cfg_.f));
  std::vector<EdgeId> removed(deletions.begin(), deletions.end());
  std::sort(removed.begin(), removed.end());
  for (std::size_t i = 1; i < removed.size(); ++i)
    if (removed[i] == removed[i - 1])
      throw Error(ErrorCode::InvalidDeletion, "edge deleted twice");

  const std::uint64_t universe = edge_universe(n_);
  std::vector<EdgeId> residual = residual_;
  std::map<std::size_t, SpannerComponent> touched;
  for (EdgeId e : deletions) {
    if (e.value >= universe)
      throw Error(ErrorCode::InvalidDeletion, "edge id outside universe");
    const auto where = locate_edge(e);
    if (!where) {
      const auto it = std::lower_bound(residual.begin(), residual.end(), e);
      if (it == residual.end() || *it != e)
        throw Error(ErrorCode::InvalidDeletion, "edge " + std::to_string(e.value) + " is not in the graph");
      residual.erase(it);
      continue;
    }
    auto [it, fresh] = touched.try_emplace(*where);
    if (fresh)
      it->second = components_[*where];
    update_component_edge(it->second, e, n_, -1);
  }

  SpannerRecovery out;
  std::vector<EdgeId> h = residual;
  for (std::size_t ci = 0; ci < components_.size(); ++ci) {
    const auto t = touched.find(ci);
    open_component(t == touched.end() ? components_[ci] : t->second, removed, n_, h, out);
  }
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  out.spanner = Graph::from_edge_ids(n_, h);
  return out;
}

Graph recover_spanner(const SpannerSketch &s, std::span<const EdgeId> deletions) {
  return s.recover(deletions).spanner;
}

std::vector<std::uint8_t> SpannerSketch::serialize() const {
  BitWriter w;
  write_header(w, ArtifactKind::SpannerSketch);
  w.write(n_, 32);
  w.write_u64(cfg_.f);
  for (double x : {cfg_.c_ladder, cfg_.c_level, cfg_.c_comp, cfg_.comp_log_exp, cfg_.delta_exp, cfg_.c_span,
                   cfg_.peel_multiplier})
    write_double(w, x);
  w.write(cfg_.phi_target ? 1 : 0, 1);
  if (cfg_.phi_target) {
    w.write_i64(cfg_.phi_target->num());
    w.write_i64(cfg_.phi_target->den());
  }
  w.write(cfg_.max_levels, 32);
  w.write_u64(seed_);
  w.write(ladder_.size(), 32);
  for (std::uint64_t D : ladder_)
    w.write_u64(D);
  const unsigned vbits = bits_for(std::max<Vertex>(n_, 2));
  w.write(components_.size(), 32);
  for (const auto &c : components_) {
    w.write(c.rung, 32);
    w.write(c.level, 32);
    w.write(c.ordinal, 32);
    w.write_u64(c.edge_count);
    w.write(c.vertices.size(), 32);
    for (Vertex v : c.vertices)
      w.write(v, vbits);
    for (std::uint32_t d : c.degrees)
      w.write(d, vbits);
    for (const auto &bundle : c.bundles)
      for (const auto &copy : bundle) {
        copy.exact.write_body(w);
        copy.sampler.write_body(w);
      }
    w.write(c.edge_samplers.size(), 32);
    for (const auto &sampler : c.edge_samplers)
      sampler.write_body(w);
  }
  const unsigned ebits = bits_for(std::max<std::uint64_t>(edge_universe(n_), 2));
  w.write_u64(residual_.size());
  for (EdgeId e : residual_)
    w.write(e.value, ebits);
  return w.bytes();
}

SpannerSketch SpannerSketch::deserialize(std::span<const std::uint8_t> bytes) {
  BitReader r(bytes);
  read_header(r, ArtifactKind::SpannerSketch);
  SpannerSketch s;
  s.n_ = static_cast<Vertex>(r.read(32));
  s.cfg_.f = r.read_u64();
  for (double *x : {&s.cfg_.c_ladder, &s.cfg_.c_level, &s.cfg_.c_comp, &s.cfg_.comp_log_exp, &s.cfg_.delta_exp,
                    &s.cfg_.c_span, &s.cfg_.peel_multiplier})
    *x = read_double(r);
  if (r.read(1)) {
    const std::int64_t num = r.read_i64();
    const std::int64_t den = r.read_i64();
    if (den <= 0)
      throw Error(ErrorCode::CorruptData, "bad phi target");
    s.cfg_.phi_target = Rational(num, den);
  }
  s.cfg_.max_levels = static_cast<std::uint32_t>(r.read(32));
  s.seed_ = r.read_u64();
  const std::uint64_t rungs = r.read(32);
  if (rungs > 64)
    throw Error(ErrorCode::CorruptData, "degree ladder too long");
  for (std::uint64_t i = 0; i < rungs; ++i) {
    s.ladder_.push_back(r.read_u64());
    if (s.ladder_.back() == 0)
      throw Error(ErrorCode::CorruptData, "zero ladder degree");
  }
  const unsigned vbits = bits_for(std::max<Vertex>(s.n_, 2));
  const std::uint64_t count = r.read(32);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto rung = static_cast<std::uint32_t>(r.read(32));
    const auto level = static_cast<std::uint32_t>(r.read(32));
    const auto ordinal = static_cast<std::uint32_t>(r.read(32));
    const std::uint64_t edge_count = r.read_u64();
    if (rung >= s.ladder_.size() || edge_count > edge_universe(s.n_))
      throw Error(ErrorCode::CorruptData, "bad component header");
    const std::uint64_t size = r.read(32);
    if (size > s.n_)
      throw Error(ErrorCode::CorruptData, "component larger than graph");
    std::vector<Vertex> vs(size);
    for (auto &v : vs) {
      v = static_cast<Vertex>(r.read(vbits));
      if (v >= s.n_)
        throw Error(ErrorCode::CorruptData, "vertex out of range");
    }
    SpannerComponent c = make_spanner_component(s.n_, s.cfg_, s.seed_, s.ladder_[rung], rung, level, ordinal,
                                         VertexSet(s.n_, std::move(vs)), edge_count);
    for (auto &d : c.degrees)
      d = static_cast<std::uint32_t>(r.read(vbits));
    for (auto &bundle : c.bundles)
      for (auto &copy : bundle) {
        copy.exact.read_body(r);
        copy.sampler.read_body(r);
      }
    if (r.read(32) != c.edge_samplers.size())
      throw Error(ErrorCode::CorruptData, "component sampler count mismatch");
    for (auto &sampler : c.edge_samplers)
      sampler.read_body(r);
    s.components_.push_back(std::move(c));
  }
  const std::uint64_t universe = edge_universe(s.n_);
  const unsigned ebits = bits_for(std::max<std::uint64_t>(universe, 2));
  const std::uint64_t rcount = r.read_u64();
  if (rcount > universe)
    throw Error(ErrorCode::CorruptData, "residual larger than universe");
  for (std::uint64_t i = 0; i < rcount; ++i) {
    const std::uint64_t id = r.read(ebits);
    if (id >= universe)
      throw Error(ErrorCode::CorruptData, "residual edge outside universe");
    s.residual_.push_back(EdgeId{id});
  }
  s.index_components();
  return s;
}

} // namespace ftdo
