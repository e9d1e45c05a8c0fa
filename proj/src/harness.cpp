#include "ftdo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ftdo/decomposition.hpp"
#include "ftdo/error.hpp"
#include "ftdo/hashing.hpp"

namespace ftdo {

namespace {

template <typename E> E parse_enum(const std::string &name, std::initializer_list<E> values, const char *(*namer)(E),
                                   const char *what) {
  for (E v : values)
    if (name == namer(v))
      return v;
  throw Error(ErrorCode::InfeasibleParams, std::string("unknown ") + what + " '" + name + "'");
}

Graph gnp(Vertex n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<EdgeId> ids;
  const std::uint64_t u = edge_universe(n);
  for (std::uint64_t id = 0; id < u; ++id)
    if (coin(rng))
      ids.push_back(EdgeId{id});
  return Graph::from_edge_ids(n, ids);
}

Graph random_regular(Vertex n, std::uint32_t d, std::uint64_t seed) {
  if (d >= n || (static_cast<std::uint64_t>(n) * d) % 2 != 0)
    throw Error(ErrorCode::InfeasibleParams,
                "no simple " + std::to_string(d) + "-regular graph on " + std::to_string(n) + " vertices");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Vertex> stubs;
    for (Vertex v = 0; v < n; ++v)
      stubs.insert(stubs.end(), d, v);
    std::set<EdgeId> edges;
    bool stuck = false;
    while (!stubs.empty() && !stuck) {
      stuck = true;
      for (int tries = 0; tries < 200; ++tries) {
        std::uniform_int_distribution<std::size_t> pick(0, stubs.size() - 1);
        std::size_t i = pick(rng), j = pick(rng);
        if (i == j || stubs[i] == stubs[j])
          continue;
        const EdgeId e = edge_id(stubs[i], stubs[j], n);
        if (edges.contains(e))
          continue;
        edges.insert(e);
        if (i < j)
          std::swap(i, j);
        stubs[i] = stubs.back();
        stubs.pop_back();
        stubs[j] = stubs.back();
        stubs.pop_back();
        stuck = false;
        break;
      }
    }
    if (!stuck)
      return Graph::from_edge_ids(n, std::vector<EdgeId>(edges.begin(), edges.end()));
  }
  throw Error(ErrorCode::InfeasibleParams, "configuration model did not produce a simple graph");
}

} // namespace

const char *family_name(Family f) {
  switch (f) {
  case Family::RandomRegular:
    return "RandomRegular";
  case Family::GnpDense:
    return "GnpDense";
  case Family::CliquePlusBridges:
    return "CliquePlusBridges";
  case Family::BipartiteComplete:
    return "BipartiteComplete";
  case Family::TwoHopStarFamily:
    return "TwoHopStarFamily";
  case Family::ExpanderCertified:
    return "ExpanderCertified";
  }
  return "?";
}

Family parse_family(const std::string &name) {
  return parse_enum(name,
                    {Family::RandomRegular, Family::GnpDense, Family::CliquePlusBridges, Family::BipartiteComplete,
                     Family::TwoHopStarFamily, Family::ExpanderCertified},
                    family_name, "family");
}

Graph generate_graph(Family family, Vertex n, const FamilyParams &params, std::uint64_t seed) {
  if (n == 0)
    throw Error(ErrorCode::InfeasibleParams, "graph needs at least one vertex");
  switch (family) {
  case Family::RandomRegular:
    return random_regular(n, params.d, seed);
  case Family::GnpDense:
    if (!(params.p >= 0.0 && params.p <= 1.0))
      throw Error(ErrorCode::InfeasibleParams, "edge probability outside [0,1]");
    return gnp(n, params.p, seed);
  case Family::CliquePlusBridges: {
    if (params.parts == 0 || n % params.parts != 0)
      throw Error(ErrorCode::InfeasibleParams, "n must be a multiple of the part count");
    const Vertex size = n / params.parts;
    std::vector<VertexPair> pairs;
    for (Vertex b = 0; b < params.parts; ++b) {
      for (Vertex i = 0; i < size; ++i)
        for (Vertex j = i + 1; j < size; ++j)
          pairs.push_back({b * size + i, b * size + j});
      if (b + 1 < params.parts)
        pairs.push_back({b * size + size - 1, (b + 1) * size});
    }
    return Graph::from_pairs(n, pairs);
  }
  case Family::BipartiteComplete: {
    const Vertex left = params.left == 0 ? n / 2 : params.left;
    if (left == 0 || left >= n)
      throw Error(ErrorCode::InfeasibleParams, "bipartite sides must both be nonempty");
    std::vector<VertexPair> pairs;
    for (Vertex a = 0; a < left; ++a)
      for (Vertex b = left; b < n; ++b)
        pairs.push_back({a, b});
    return Graph::from_pairs(n, pairs);
  }
  case Family::TwoHopStarFamily: {
    if (params.parts == 0 || n % (2 * params.parts) != 0)
      throw Error(ErrorCode::InfeasibleParams, "n must be a multiple of twice the block count");
    const Vertex s = n / (2 * params.parts);
    std::vector<VertexPair> pairs;
    for (Vertex b = 0; b < params.parts; ++b) {
      const Vertex base = 2 * b * s;
      for (Vertex i = 0; i < s; ++i)
        for (Vertex j = 0; j < s; ++j)
          pairs.push_back({base + i, base + s + j});
      if (b + 1 < params.parts)
        pairs.push_back({base + 2 * s - 1, base + 2 * s});
    }
    return Graph::from_pairs(n, pairs);
  }
  case Family::ExpanderCertified: {
    if (params.d >= n)
      throw Error(ErrorCode::InfeasibleParams, "minimum degree must be below n");
    const double d = params.d;
    const double p = std::min(1.0, (d + 4.0 * std::sqrt(d) + 1.0) / std::max(1.0, n - 1.0));
    const Rational phi = params.phi.value_or(default_phi_target(n));
    for (std::uint64_t attempt = 0; attempt < 200; ++attempt) {
      Graph g = gnp(n, p, derive_seed(seed, {attempt}));
      if (g.m() == 0 || g.min_degree() < params.d)
        continue;
      if (certify_expansion(g, phi, Certifier::Spectral).verdict == Verdict::Accepted)
        return g;
    }
    throw Error(ErrorCode::InfeasibleParams, "no certified expander found");
  }
  }
  throw Error(ErrorCode::InfeasibleParams, "unknown family");
}

const char *adversary_name(Adversary a) {
  switch (a) {
  case Adversary::RandomF:
    return "RandomF";
  case Adversary::DegreeTargeted:
    return "DegreeTargeted";
  case Adversary::AdaptiveGreedy:
    return "AdaptiveGreedy";
  case Adversary::RootTargeted:
    return "RootTargeted";
  }
  return "?";
}

Adversary parse_adversary(const std::string &name) {
  return parse_enum(name,
                    {Adversary::RandomF, Adversary::DegreeTargeted, Adversary::AdaptiveGreedy, Adversary::RootTargeted},
                    adversary_name, "adversary");
}

std::vector<EdgeId> adversary_deletions(Adversary kind, const Graph &g, std::uint64_t f,
                                        const AdversaryContext &ctx) {
  if (f > g.m())
    throw Error(ErrorCode::BudgetExceeded,
                "budget " + std::to_string(f) + " exceeds the " + std::to_string(g.m()) + " edges");
  if (f == 0)
    return {};
  const Vertex n = g.n();
  std::mt19937_64 rng(ctx.seed);
  switch (kind) {
  case Adversary::RandomF: {
    std::vector<EdgeId> edges = g.edges();
    std::shuffle(edges.begin(), edges.end(), rng);
    edges.resize(f);
    std::sort(edges.begin(), edges.end());
    return edges;
  }
  case Adversary::DegreeTargeted: {
    std::vector<std::set<Vertex>> adj(n);
    for (Vertex v = 0; v < n; ++v)
      adj[v].insert(g.neighbors(v).begin(), g.neighbors(v).end());
    std::vector<EdgeId> out;
    for (std::uint64_t i = 0; i < f; ++i) {
      Vertex best = 0;
      for (Vertex v = 1; v < n; ++v)
        if (adj[v].size() > adj[best].size())
          best = v;
      Vertex other = *adj[best].begin();
      for (Vertex w : adj[best])
        if (adj[w].size() > adj[other].size())
          other = w;
      adj[best].erase(other);
      adj[other].erase(best);
      out.push_back(edge_id(best, other, n));
    }
    return out;
  }
  case Adversary::AdaptiveGreedy: {
    if (!ctx.probe)
      throw Error(ErrorCode::InfeasibleParams, "AdaptiveGreedy needs a deterministic oracle to probe");
    const std::uint64_t budget = ctx.probe_budget.value_or(10 * f);
    std::vector<EdgeId> remaining = g.edges();
    std::vector<EdgeId> out;
    for (std::uint64_t i = 0; i < f; ++i) {
      std::vector<EdgeId> candidates = remaining;
      if (candidates.size() > budget) {
        std::shuffle(candidates.begin(), candidates.end(), rng);
        candidates.resize(budget);
        std::sort(candidates.begin(), candidates.end());
      }
      EdgeId best = candidates.front();
      Distance best_score(0);
      bool have = false;
      for (EdgeId e : candidates) {
        out.push_back(e);
        const auto p = edge_from_id(e, n);
        const Distance score = ctx.probe(out, p.u, p.v);
        out.pop_back();
        if (!have || score > best_score) {
          best = e;
          best_score = score;
          have = true;
        }
      }
      out.push_back(best);
      remaining.erase(std::lower_bound(remaining.begin(), remaining.end(), best));
    }
    return out;
  }
  case Adversary::RootTargeted: {
    Vertex root = 0;
    if (ctx.root) {
      root = *ctx.root;
      if (root >= n)
        throw Error(ErrorCode::OutOfRange, "root out of range");
    } else {
      for (Vertex v = 1; v < n; ++v)
        if (g.degree(v) > g.degree(root))
          root = v;
    }
    std::vector<EdgeId> out;
    for (Vertex w : g.neighbors(root)) {
      if (out.size() == f)
        break;
      out.push_back(edge_id(root, w, n));
    }
    if (out.size() < f) {
      std::vector<EdgeId> rest;
      for (EdgeId e : g.edges()) {
        const auto p = edge_from_id(e, n);
        if (p.u != root && p.v != root)
          rest.push_back(e);
      }
      std::shuffle(rest.begin(), rest.end(), rng);
      rest.resize(f - out.size());
      out.insert(out.end(), rest.begin(), rest.end());
    }
    return out;
  }
  }
  return {};
}

const char *artifact_name(Artifact a) {
  switch (a) {
  case Artifact::Oracle:
    return "oracle";
  case Artifact::Stars:
    return "stars";
  case Artifact::Spanner:
    return "spanner";
  case Artifact::StreamOracle:
    return "stream-oracle";
  case Artifact::StreamSpanner:
    return "stream-spanner";
  }
  return "?";
}

Artifact parse_artifact(const std::string &name) {
  return parse_enum(name,
                    {Artifact::Oracle, Artifact::Stars, Artifact::Spanner, Artifact::StreamOracle,
                     Artifact::StreamSpanner},
                    artifact_name, "artifact");
}

std::uint64_t measure_space(const ExpanderOracle &o) { return o.measured_bits(); }
std::uint64_t measure_space(const StarOracle &o) { return o.measured_bits(); }
std::uint64_t measure_space(const SpannerSketch &s) { return s.measured_bits(); }
std::uint64_t measure_space(const StreamProcessor &s) { return s.stats().peak_bits; }
std::uint64_t measure_space(const SyndromeSketch &s) { return s.serialize().size() * 8; }

std::vector<StreamEvent> stream_from_graph(const Graph &g, std::span<const EdgeId> deletions, std::uint64_t seed) {
  std::vector<EdgeId> order = g.edges();
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<StreamEvent> out;
  out.reserve(order.size() + deletions.size());
  for (EdgeId e : order)
    out.push_back({e, StreamOp::Insert});
  for (EdgeId e : deletions)
    out.push_back({e, StreamOp::Delete});
  return out;
}

namespace {

/// Compares scaled answers (rows of `answer(a)`) against exact distances in
/// G - F for every pair.
void check_answers(TrialRecord &rec, const Graph &residual, std::uint64_t bound,
                   const std::function<std::vector<Distance>(Vertex)> &answers) {
  const Vertex n = residual.n();
  for (Vertex a = 0; a < n; ++a) {
    const auto truth = bfs_distances(residual, a);
    const auto got = answers(a);
    for (Vertex b = a + 1; b < n; ++b) {
      ++rec.pairs_checked;
      const Distance t = truth[b];
      const Distance x = got[b];
      if (x < t)
        rec.lower_bound_ok = false;
      if (!t.reachable())
        continue;
      if (!x.reachable()) {
        rec.upper_bound_ok = false;
        rec.max_stretch = std::numeric_limits<double>::infinity();
        continue;
      }
      const double ratio = static_cast<double>(x.hops()) / static_cast<double>(t.hops());
      rec.max_stretch = std::max(rec.max_stretch, ratio);
      if (x.hops() > bound * t.hops())
        rec.upper_bound_ok = false;
    }
  }
}

std::vector<Distance> scaled_row(const AuxGraph &aux, Vertex a, std::uint64_t factor) {
  auto row = aux.distances(a);
  for (auto &d : row)
    d = d.scaled(factor);
  return row;
}

void check_spanner(TrialRecord &rec, const Graph &residual, const Graph &h, std::uint64_t bound) {
  for (EdgeId e : h.edges())
    if (!residual.has_edge(e))
      rec.containment_ok = false;
  check_answers(rec, residual, bound, [&](Vertex a) { return bfs_distances(h, a); });
}

} // namespace

VerificationReport run_verification(const Scenario &sc) {
  if (sc.n < 2 || sc.trials == 0)
    throw Error(ErrorCode::InfeasibleParams, "scenario needs n >= 2 and at least one trial");
  const bool randomized = sc.artifact == Artifact::Spanner || sc.artifact == Artifact::StreamSpanner;
  const bool streamed = sc.artifact == Artifact::StreamOracle || sc.artifact == Artifact::StreamSpanner;
  if (sc.adversary == Adversary::AdaptiveGreedy && (randomized || streamed))
    throw Error(ErrorCode::InfeasibleParams, "AdaptiveGreedy only runs against static deterministic oracles");

  VerificationReport report;
  report.scenario = sc;
  std::optional<Graph> shared;
  std::optional<ExpanderOracle> shared_oracle;
  std::optional<StarOracle> shared_stars;

  for (std::uint32_t t = 0; t < sc.trials; ++t) {
    TrialRecord rec;
    rec.trial = t;
    rec.seed = derive_seed(sc.seed, {t});
    const std::uint64_t graph_seed = sc.regenerate_graph ? derive_seed(sc.seed, {t, 1}) : sc.seed;
    if (sc.regenerate_graph || !shared) {
      shared = generate_graph(sc.family, sc.n, sc.family_params, graph_seed);
      shared_oracle.reset();
      shared_stars.reset();
    }
    const Graph &g = *shared;
    AdversaryContext ctx;
    ctx.seed = derive_seed(rec.seed, {2});
    try {
      switch (sc.artifact) {
      case Artifact::Oracle: {
        OracleConfig cfg = sc.oracle;
        cfg.f = sc.f;
        if (!shared_oracle)
          shared_oracle = ExpanderOracle::build(g, cfg);
        const ExpanderOracle &o = *shared_oracle;
        ctx.probe = [&o](std::span<const EdgeId> del, Vertex a, Vertex b) {
          return o.open_session(del).query_distance(a, b);
        };
        const auto deletions = adversary_deletions(sc.adversary, g, sc.f, ctx);
        rec.deletions = deletions.size();
        const Graph residual = g.without(deletions);
        const QuerySession session = o.open_session(deletions);
        const AuxGraph &aux = session.aux();
        for (const auto &p : residual.pairs())
          if (!aux.contains(p.u, p.v))
            rec.containment_ok = false;
        rec.stretch_bound = o.stretch();
        check_answers(rec, residual, rec.stretch_bound,
                      [&](Vertex a) { return scaled_row(aux, a, o.stretch()); });
        rec.peak_bits = o.measured_bits();
        break;
      }
      case Artifact::Stars: {
        StarConfig cfg = sc.stars;
        cfg.f = sc.f;
        if (!shared_stars)
          shared_stars = StarOracle::build(g, cfg);
        const StarOracle &o = *shared_stars;
        ctx.probe = [&o](std::span<const EdgeId> del, Vertex a, Vertex b) { return o.report_distance(del, a, b); };
        if (!o.stars().empty())
          ctx.root = o.stars().front().root;
        const auto deletions = adversary_deletions(sc.adversary, g, sc.f, ctx);
        rec.deletions = deletions.size();
        const Graph residual = g.without(deletions);
        const AuxGraph aux = o.approximate_graph(deletions);
        for (const auto &p : residual.pairs())
          if (!aux.contains(p.u, p.v))
            rec.containment_ok = false;
        rec.applicable = o.report().f_in_range;
        rec.stretch_bound = StarOracle::kStretch;
        check_answers(rec, residual, rec.stretch_bound,
                      [&](Vertex a) { return scaled_row(aux, a, StarOracle::kStretch); });
        rec.peak_bits = o.measured_bits();
        break;
      }
      case Artifact::Spanner: {
        SpannerConfig cfg = sc.spanner;
        cfg.f = sc.f;
        const SpannerSketch s = SpannerSketch::build(g, cfg, rec.seed);
        const auto deletions = adversary_deletions(sc.adversary, g, sc.f, ctx);
        rec.deletions = deletions.size();
        const Graph residual = g.without(deletions);
        rec.stretch_bound = spanner_stretch(g.n(), cfg);
        rec.peak_bits = s.measured_bits();
        try {
          check_spanner(rec, residual, s.recover(deletions).spanner, rec.stretch_bound);
        } catch (const Error &e) {
          if (e.code() != ErrorCode::SamplerExhausted)
            throw;
          ++rec.decode_failures;
          rec.upper_bound_ok = false;
        }
        break;
      }
      case Artifact::StreamOracle:
      case Artifact::StreamSpanner: {
        StreamConfig cfg = sc.stream;
        cfg.f = sc.f;
        cfg.mode = sc.artifact == Artifact::StreamOracle ? StreamMode::Oracle : StreamMode::Spanner;
        cfg.track_shadow = true;
        const auto deletions = adversary_deletions(sc.adversary, g, sc.f, ctx);
        rec.deletions = deletions.size();
        const Graph residual = g.without(deletions);
        StreamProcessor proc(g.n(), cfg, rec.seed);
        proc.process_all(stream_from_graph(g, deletions, derive_seed(rec.seed, {3})));
        for (EdgeId e : deletions) {
          const auto where = proc.locate_edge(e);
          const std::int64_t expected = where ? static_cast<std::int64_t>(*where) : StreamProcessor::kInBuffer;
          if (!proc.uses_greedy() && proc.shadow_owner(e) != expected)
            rec.error = "first-match violation";
        }
        rec.stretch_bound = proc.stretch();
        if (cfg.mode == StreamMode::Oracle) {
          const AuxGraph aux = proc.oracle_graph();
          for (const auto &p : residual.pairs())
            if (!aux.contains(p.u, p.v) && !proc.uses_greedy())
              rec.containment_ok = false;
          const std::uint64_t factor = proc.uses_greedy() ? 1 : proc.stretch();
          check_answers(rec, residual, rec.stretch_bound, [&](Vertex a) { return scaled_row(aux, a, factor); });
        } else {
          try {
            check_spanner(rec, residual, proc.recover(), rec.stretch_bound);
          } catch (const Error &e) {
            if (e.code() != ErrorCode::SamplerExhausted)
              throw;
            ++rec.decode_failures;
            rec.upper_bound_ok = false;
          }
        }
        const StreamStats st = proc.stats();
        rec.peak_bits = st.peak_bits;
        if (!proc.uses_greedy() && st.peak_buffer > proc.capacity())
          rec.error = "buffer exceeded capacity";
        break;
      }
      }
    } catch (const Error &e) {
      if (e.code() == ErrorCode::DecodeFailure)
        ++rec.decode_failures;
      rec.error = e.what();
    }
    report.trials.push_back(std::move(rec));
  }
  return report;
}

bool VerificationReport::hard_ok() const {
  return std::all_of(trials.begin(), trials.end(), [](const TrialRecord &t) { return t.hard_ok(); });
}

std::size_t VerificationReport::upper_bound_failures() const {
  return static_cast<std::size_t>(
      std::count_if(trials.begin(), trials.end(), [](const TrialRecord &t) { return !t.upper_bound_ok; }));
}

std::string VerificationReport::json_lines() const {
  std::ostringstream out;
  for (const auto &t : trials) {
    nlohmann::json j;
    j["trial"] = t.trial;
    j["seed"] = t.seed;
    j["deletions"] = t.deletions;
    j["pairs_checked"] = t.pairs_checked;
    j["max_stretch"] = std::isfinite(t.max_stretch) ? nlohmann::json(t.max_stretch) : nlohmann::json("inf");
    j["stretch_bound"] = t.stretch_bound;
    j["containment_ok"] = t.containment_ok;
    j["lower_bound_ok"] = t.lower_bound_ok;
    j["upper_bound_ok"] = t.upper_bound_ok;
    j["applicable"] = t.applicable;
    j["decode_failures"] = t.decode_failures;
    j["peak_bits"] = t.peak_bits;
    if (!t.error.empty())
      j["error"] = t.error;
    out << j.dump() << "\n";
  }
  nlohmann::json s;
  s["summary"] = true;
  s["artifact"] = artifact_name(scenario.artifact);
  s["family"] = family_name(scenario.family);
  s["adversary"] = adversary_name(scenario.adversary);
  s["n"] = scenario.n;
  s["f"] = scenario.f;
  s["seed"] = scenario.seed;
  s["trials"] = trials.size();
  s["hard_ok"] = hard_ok();
  s["upper_bound_failures"] = upper_bound_failures();
  out << s.dump() << "\n";
  return out.str();
}

std::string VerificationReport::csv() const {
  std::ostringstream out;
  out << "trial,seed,deletions,pairs_checked,max_stretch,stretch_bound,containment_ok,lower_bound_ok,"
         "upper_bound_ok,applicable,decode_failures,peak_bits\n";
  for (const auto &t : trials)
    out << t.trial << ',' << t.seed << ',' << t.deletions << ',' << t.pairs_checked << ',' << t.max_stretch << ','
        << t.stretch_bound << ',' << t.containment_ok << ',' << t.lower_bound_ok << ',' << t.upper_bound_ok << ','
        << t.applicable << ',' << t.decode_failures << ',' << t.peak_bits << '\n';
  return out.str();
}

} // namespace ftdo
