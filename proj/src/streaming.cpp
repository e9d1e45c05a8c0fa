#include "ftdo/streaming.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>

#include "ftdo/decomposition.hpp"
#include "ftdo/error.hpp"
#include "ftdo/field.hpp"

namespace ftdo {

std::vector<RawStreamEvent> parse_stream(std::string_view text) {
  std::vector<RawStreamEvent> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t'))
      line.remove_prefix(1);
    if (line.empty() || line.front() == '#')
      continue;
    const std::string where = "line " + std::to_string(line_no);
    RawStreamEvent ev;
    if (line.front() == '+')
      ev.op = StreamOp::Insert;
    else if (line.front() == '-')
      ev.op = StreamOp::Delete;
    else
      throw Error(ErrorCode::MalformedLine, where + ": expected '+ u v' or '- u v'");
    line.remove_prefix(1);
    std::uint64_t values[2];
    const char *p = line.data();
    const char *end = line.data() + line.size();
    for (auto &value : values) {
      while (p < end && (*p == ' ' || *p == '\t'))
        ++p;
      const auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc{} || next == p)
        throw Error(ErrorCode::MalformedLine, where + ": expected two vertex ids");
      p = next;
    }
    while (p < end && (*p == ' ' || *p == '\t'))
      ++p;
    if (p != end)
      throw Error(ErrorCode::MalformedLine, where + ": trailing characters");
    if (values[0] > UINT32_MAX || values[1] > UINT32_MAX)
      throw Error(ErrorCode::OutOfRange, where + ": vertex id too large");
    ev.u = static_cast<Vertex>(values[0]);
    ev.v = static_cast<Vertex>(values[1]);
    out.push_back(ev);
  }
  return out;
}

std::vector<StreamEvent> resolve_stream(std::span<const RawStreamEvent> raw, Vertex n) {
  std::vector<StreamEvent> out;
  out.reserve(raw.size());
  for (const auto &ev : raw)
    out.push_back(StreamEvent{edge_id(ev.u, ev.v, n), ev.op});
  return out;
}

std::string format_stream(std::span<const StreamEvent> events, Vertex n) {
  std::string out;
  for (const auto &ev : events) {
    const auto p = edge_from_id(ev.edge, n);
    out += ev.op == StreamOp::Insert ? "+ " : "- ";
    out += std::to_string(p.u) + " " + std::to_string(p.v) + "\n";
  }
  return out;
}

std::uint64_t stream_degree(Vertex n, const StreamConfig &cfg) {
  const double lg = log2n(n);
  const double raw = cfg.c_D * std::cbrt(static_cast<double>(n)) * std::cbrt(static_cast<double>(cfg.f)) * lg * lg;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(raw - 1e-9)));
}

std::uint64_t stream_capacity(Vertex n, const StreamConfig &cfg) {
  const double lg = log2n(n);
  const double raw = cfg.c_capacity * std::pow(static_cast<double>(n), 4.0 / 3.0) *
                     std::cbrt(static_cast<double>(cfg.f)) * std::pow(lg, 4.0);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(raw - 1e-9)));
}

StreamProcessor::StreamProcessor(Vertex n, const StreamConfig &cfg, std::uint64_t seed)
    : n_(n), cfg_(cfg), seed_(seed) {
  if (cfg.f > edge_universe(n))
    throw Error(ErrorCode::OutOfRange, "fault budget exceeds the edge universe");
  D_ = stream_degree(n, cfg);
  k_ = static_cast<std::uint32_t>(4 * cfg.f / D_);
  q_ = choose_prime(std::max<std::uint64_t>(edge_universe(n), 2));
  capacity_ = stream_capacity(n, cfg);
  if (cfg.greedy_fallback && static_cast<double>(cfg.f) <= std::sqrt(static_cast<double>(n)))
    greedy_.emplace(n, cfg.f, greedy_stretch(n));
}

std::uint64_t StreamProcessor::stretch() const {
  if (greedy_)
    return greedy_->stretch();
  if (cfg_.mode == StreamMode::Spanner)
    return spanner_stretch(n_, sampling_config());
  OracleConfig oc;
  oc.c_stretch = cfg_.c_stretch;
  return oracle_stretch(n_, oc);
}

SpannerConfig StreamProcessor::sampling_config() const {
  SpannerConfig sc;
  sc.f = cfg_.f;
  sc.c_comp = cfg_.c_comp;
  sc.comp_log_exp = cfg_.comp_log_exp;
  sc.delta_exp = cfg_.delta_exp;
  sc.c_span = cfg_.c_span;
  return sc;
}

std::size_t StreamProcessor::component_count() const {
  return cfg_.mode == StreamMode::Oracle ? oracle_components_.size() : spanner_components_.size();
}

std::optional<std::size_t> StreamProcessor::locate_edge(EdgeId e) const {
  const auto p = edge_from_id(e, n_);
  for (const auto &owner : owner_)
    if (owner[p.u] != 0 && owner[p.u] == owner[p.v])
      return owner[p.u] - 1;
  return std::nullopt;
}

std::int64_t StreamProcessor::shadow_owner(EdgeId e) const {
  const auto it = shadow_.find(e);
  return it == shadow_.end() ? kUntracked : it->second;
}

void StreamProcessor::process_all(std::span<const StreamEvent> events) {
  for (const auto &ev : events)
    process(ev);
}

void StreamProcessor::process(const StreamEvent &ev) {
  if (ev.edge.value >= edge_universe(n_))
    throw Error(ErrorCode::InvalidEvent, "edge id outside universe");
  if (ev.op == StreamOp::Delete) {
    if (cfg_.validate && !live_.contains(ev.edge))
      throw Error(ErrorCode::InvalidEvent, "delete of absent edge " + std::to_string(ev.edge.value));
    if (deletions_.size() >= cfg_.f)
      throw Error(ErrorCode::DeletionBudgetExceeded, "more than " + std::to_string(cfg_.f) + " deletions");
    if (cfg_.validate)
      live_.erase(ev.edge);
    deletions_.push_back(ev.edge);
    ++stats_.deletes;
    ++stats_.events;
    return;
  }
  if (cfg_.validate && !live_.insert(ev.edge).second)
    throw Error(ErrorCode::InvalidEvent, "duplicate insert of edge " + std::to_string(ev.edge.value));
  ++stats_.inserts;
  ++stats_.events;
  if (greedy_) {
    greedy_->insert(ev.edge);
    return;
  }
  if (const auto c = locate_edge(ev.edge)) {
    if (cfg_.mode == StreamMode::Oracle) {
      auto &comp = oracle_components_[*c];
      const auto p = edge_from_id(ev.edge, n_);
      for (Vertex x : {p.u, p.v}) {
        const std::size_t local = comp.local_index(x);
        ++comp.degrees[local];
        comp.sketches[local].update(ev.edge.value, +1);
      }
    } else {
      update_component_edge(spanner_components_[*c], ev.edge, n_, +1);
    }
    if (cfg_.track_shadow)
      shadow_[ev.edge] = static_cast<std::int64_t>(*c);
    return;
  }
  ++buffer_[ev.edge];
  ++buffer_total_;
  if (cfg_.track_shadow)
    shadow_[ev.edge] = kInBuffer;
  if (buffer_total_ >= capacity_)
    refill();
  stats_.peak_buffer = std::max(stats_.peak_buffer, buffer_total_);
}

void StreamProcessor::note_bits() { stats_.peak_bits = std::max(stats_.peak_bits, measured_bits()); }

void StreamProcessor::refill() {
  note_bits();
  ++stats_.refills;
  std::vector<EdgeId> support;
  support.reserve(buffer_.size());
  for (const auto &[e, count] : buffer_)
    support.push_back(e);
  const Graph current = Graph::from_edge_ids(n_, support);
  DecompositionConfig dc;
  dc.D = D_;
  dc.phi_target = cfg_.phi_target.value_or(default_phi_target(n_));
  dc.peel_multiplier = cfg_.peel_multiplier;
  const auto dec = decompose(current, dc);
  if (dec.components.empty())
    return;

  const std::uint64_t universe = edge_universe(n_);
  const std::size_t base = component_count();
  owner_.emplace_back(n_, 0);
  for (std::uint32_t j = 0; j < dec.components.size(); ++j)
    for (Vertex v : dec.components[j])
      owner_.back()[v] = static_cast<std::uint32_t>(base + j + 1);

  std::vector<std::vector<std::pair<EdgeId, std::uint32_t>>> absorbed(dec.components.size());
  for (auto it = buffer_.begin(); it != buffer_.end();) {
    const auto p = edge_from_id(it->first, n_);
    const std::uint32_t a = owner_.back()[p.u];
    if (a != 0 && a == owner_.back()[p.v]) {
      absorbed[a - 1 - base].push_back(*it);
      buffer_total_ -= it->second;
      if (cfg_.track_shadow)
        shadow_[it->first] = static_cast<std::int64_t>(a - 1);
      it = buffer_.erase(it);
    } else {
      ++it;
    }
  }
  for (std::uint32_t j = 0; j < dec.components.size(); ++j) {
    const VertexSet &vs = dec.components[j];
    std::uint64_t edge_count = 0;
    for (const auto &[e, count] : absorbed[j])
      edge_count += count;
    if (cfg_.mode == StreamMode::Oracle) {
      ExpanderComponent c;
      c.level = round_;
      c.vertices = vs;
      c.degrees.assign(vs.size(), 0);
      c.sketches.assign(vs.size(), SyndromeSketch(universe, k_, q_));
      for (const auto &[e, count] : absorbed[j]) {
        const auto p = edge_from_id(e, n_);
        for (Vertex x : {p.u, p.v}) {
          const std::size_t local = c.local_index(x);
          c.degrees[local] += count;
          for (std::uint32_t t = 0; t < count; ++t)
            c.sketches[local].update(e.value, +1);
        }
      }
      oracle_components_.push_back(std::move(c));
    } else {
      SpannerComponent c =
          make_spanner_component(n_, sampling_config(), seed_, D_, 0, round_, j, vs, edge_count);
      for (const auto &[e, count] : absorbed[j])
        for (std::uint32_t t = 0; t < count; ++t)
          update_component_edge(c, e, n_, +1);
      spanner_components_.push_back(std::move(c));
    }
  }
  ++round_;
  note_bits();
}

std::map<EdgeId, std::int64_t> StreamProcessor::replayed_buffer() const {
  std::map<EdgeId, std::int64_t> out;
  for (const auto &[e, count] : buffer_)
    out[e] = count;
  return out;
}

AuxGraph StreamProcessor::oracle_graph() const {
  AuxGraph aux(n_);
  if (greedy_) {
    const Graph h = greedy_->surviving(deletions_);
    for (const auto &p : h.pairs())
      aux.add_edge(p.u, p.v);
    return aux;
  }
  if (cfg_.mode != StreamMode::Oracle)
    throw Error(ErrorCode::InvalidEvent, "distance queries need oracle mode");
  auto buffer = replayed_buffer();
  std::map<std::size_t, ExpanderComponent> touched;
  for (EdgeId e : deletions_) {
    const auto c = locate_edge(e);
    if (!c) {
      const auto it = buffer.find(e);
      if (it == buffer.end() || it->second == 0)
        throw Error(ErrorCode::InvalidEvent, "deleted edge " + std::to_string(e.value) + " was never stored");
      --it->second;
      continue;
    }
    auto [it, fresh] = touched.try_emplace(*c);
    if (fresh)
      it->second = oracle_components_[*c];
    const auto p = edge_from_id(e, n_);
    for (Vertex x : {p.u, p.v}) {
      const std::size_t local = it->second.local_index(x);
      if (it->second.degrees[local] == 0)
        throw Error(ErrorCode::InvalidEvent, "component degree underflow at vertex " + std::to_string(x));
      --it->second.degrees[local];
      it->second.sketches[local].update(e.value, -1);
    }
  }
  for (const auto &[e, count] : buffer)
    if (count > 0) {
      const auto p = edge_from_id(e, n_);
      aux.add_edge(p.u, p.v);
    }
  for (std::size_t i = 0; i < oracle_components_.size(); ++i) {
    const auto t = touched.find(i);
    const ExpanderComponent &c = t == touched.end() ? oracle_components_[i] : t->second;
    append_expander_component(
        aux, c.vertices, k_, [&](std::size_t local) { return c.degrees[local]; },
        [&](std::size_t local) -> const SyndromeSketch & { return c.sketches[local]; });
  }
  return aux;
}

Distance StreamProcessor::query(Vertex a, Vertex b) const {
  if (a >= n_ || b >= n_)
    throw Error(ErrorCode::OutOfRange, "query vertex out of range");
  if (a == b)
    return Distance(0);
  const Distance d = oracle_graph().distance(a, b);
  return greedy_ ? d : d.scaled(stretch());
}

Graph StreamProcessor::recover() const {
  if (greedy_)
    return greedy_->surviving(deletions_);
  if (cfg_.mode != StreamMode::Spanner)
    throw Error(ErrorCode::InvalidEvent, "spanner recovery needs spanner mode");
  auto buffer = replayed_buffer();
  std::map<std::size_t, SpannerComponent> touched;
  for (EdgeId e : deletions_) {
    const auto c = locate_edge(e);
    if (!c) {
      const auto it = buffer.find(e);
      if (it == buffer.end() || it->second == 0)
        throw Error(ErrorCode::InvalidEvent, "deleted edge " + std::to_string(e.value) + " was never stored");
      --it->second;
      continue;
    }
    auto [it, fresh] = touched.try_emplace(*c);
    if (fresh)
      it->second = spanner_components_[*c];
    update_component_edge(it->second, e, n_, -1);
  }
  std::vector<EdgeId> removed = deletions_;
  std::sort(removed.begin(), removed.end());
  std::vector<EdgeId> h;
  for (const auto &[e, count] : buffer)
    if (count > 0)
      h.push_back(e);
  SpannerRecovery stats;
  for (std::size_t i = 0; i < spanner_components_.size(); ++i) {
    const auto t = touched.find(i);
    open_component(t == touched.end() ? spanner_components_[i] : t->second, removed, n_, h, stats);
  }
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  return Graph::from_edge_ids(n_, h);
}

StreamStats StreamProcessor::stats() const {
  StreamStats s = stats_;
  s.peak_bits = std::max(s.peak_bits, measured_bits());
  return s;
}

std::vector<std::uint8_t> StreamProcessor::serialize() const {
  BitWriter w;
  write_header(w, ArtifactKind::StreamState);
  w.write(n_, 32);
  w.write_u64(cfg_.f);
  w.write(static_cast<std::uint64_t>(cfg_.mode), 8);
  w.write_u64(seed_);
  w.write_u64(D_);
  w.write(k_, 32);
  w.write_u64(q_);
  w.write_u64(capacity_);
  w.write(round_, 32);
  const unsigned ebits = bits_for(std::max<std::uint64_t>(edge_universe(n_), 2));
  const unsigned vbits = bits_for(std::max<Vertex>(n_, 2));
  w.write_u64(deletions_.size());
  for (EdgeId e : deletions_)
    w.write(e.value, ebits);
  w.write(greedy_ ? 1 : 0, 1);
  if (greedy_) {
    greedy_->write_body(w);
    return w.bytes();
  }
  w.write_u64(buffer_.size());
  for (const auto &[e, count] : buffer_) {
    w.write(e.value, ebits);
    w.write(count, 32);
  }
  w.write(component_count(), 32);
  const auto write_vertices = [&](std::uint32_t round, const VertexSet &vs,
                                  const std::vector<std::uint32_t> &degrees) {
    w.write(round, 32);
    w.write(vs.size(), 32);
    for (Vertex v : vs)
      w.write(v, vbits);
    for (std::uint32_t d : degrees)
      w.write(d, 32);
  };
  for (const auto &c : oracle_components_) {
    write_vertices(c.level, c.vertices, c.degrees);
    for (const auto &s : c.sketches)
      s.write_body(w);
  }
  for (const auto &c : spanner_components_) {
    write_vertices(c.level, c.vertices, c.degrees);
    w.write_u64(c.edge_count);
    for (const auto &bundle : c.bundles)
      for (const auto &copy : bundle) {
        copy.exact.write_body(w);
        copy.sampler.write_body(w);
      }
    for (const auto &sampler : c.edge_samplers)
      sampler.write_body(w);
  }
  return w.bytes();
}

} // namespace ftdo
