#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "ftdo/decomposition.hpp"
#include "ftdo/error.hpp"
#include "ftdo/expander_oracle.hpp"
#include "ftdo/field.hpp"
#include "ftdo/graph.hpp"
#include "ftdo/harness.hpp"
#include "ftdo/hashing.hpp"
#include "ftdo/l0_sampler.hpp"
#include "ftdo/spanner_sketch.hpp"
#include "ftdo/star_oracle.hpp"
#include "ftdo/streaming.hpp"
#include "ftdo/syndrome.hpp"

using namespace ftdo;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Containment {
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::map<std::string, std::size_t> per_source;

  void add(const std::string &source, const VerificationReport &r) {
    for (const auto &t : r.trials) {
      ++trials;
      ++per_source[source];
      if (!t.containment_ok)
        ++violations;
    }
  }
};

Containment g_containment;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

OracleConfig calibrated_oracle() {
  OracleConfig c;
  c.c_D = 1.0;
  c.c_stop = 0.01;
  c.c_stretch = 1.0;
  return c;
}

StarConfig calibrated_stars() {
  StarConfig c;
  c.covering_mult = 0.5;
  c.target_mult = 0.05;
  c.high_mult = 1.0;
  c.gate = StarGate::Certified;
  return c;
}

SpannerConfig calibrated_spanner() {
  SpannerConfig c;
  c.c_ladder = 0.5;
  c.c_level = 0.02;
  c.c_comp = 1.0;
  c.comp_log_exp = 1.0;
  c.delta_exp = 1.0;
  c.c_span = 1.0;
  return c;
}

StreamConfig calibrated_stream() {
  StreamConfig c;
  c.c_D = 0.02;
  c.c_capacity = 0.001;
  c.comp_log_exp = 1.0;
  c.track_shadow = true;
  return c;
}

Outcome criterion_expander_oracle() {
  struct Shape {
    Vertex n;
    std::uint64_t f;
  };
  const std::vector<Shape> shapes = {{32, 2}, {32, 8}, {48, 2}, {48, 4}, {48, 8}};
  const std::vector<Family> families = {Family::RandomRegular, Family::CliquePlusBridges, Family::GnpDense};
  const std::vector<Adversary> adversaries = {Adversary::RandomF, Adversary::DegreeTargeted,
                                              Adversary::AdaptiveGreedy};
  std::vector<Scenario> scenarios;
  for (const auto &s : shapes)
    for (Family fam : families)
      for (Adversary adv : adversaries) {
        Scenario sc;
        sc.artifact = Artifact::Oracle;
        sc.family = fam;
        sc.n = s.n;
        sc.f = s.f;
        sc.adversary = adv;
        sc.family_params.p = 0.5;
        sc.family_params.d = 12;
        sc.family_params.parts = 2;
        sc.oracle = calibrated_oracle();
        sc.trials = 2;
        sc.seed = 1000 + scenarios.size();
        scenarios.push_back(sc);
      }
  for (Family fam : families)
    for (Adversary adv : {Adversary::RandomF, Adversary::DegreeTargeted}) {
      if (scenarios.size() == 50)
        break;
      Scenario sc;
      sc.artifact = Artifact::Oracle;
      sc.family = fam;
      sc.n = 64;
      sc.f = 4;
      sc.adversary = adv;
      sc.family_params.p = 0.5;
      sc.family_params.d = 12;
      sc.family_params.parts = 2;
      sc.oracle = calibrated_oracle();
      sc.trials = 2;
      sc.seed = 1000 + scenarios.size();
      scenarios.push_back(sc);
    }

  std::size_t lower_failures = 0, upper_failures = 0, errors = 0, pairs = 0;
  double worst = 0;
  std::uint64_t bound = 0;
  for (const auto &sc : scenarios) {
    const auto r = run_verification(sc);
    g_containment.add("expander oracle", r);
    for (const auto &t : r.trials) {
      lower_failures += !t.lower_bound_ok;
      upper_failures += t.applicable && !t.upper_bound_ok;
      errors += !t.error.empty();
      pairs += t.pairs_checked;
      worst = std::max(worst, t.max_stretch);
      bound = std::max(bound, t.stretch_bound);
    }
  }
  Outcome o;
  o.pass = lower_failures == 0 && upper_failures == 0 && errors == 0 && scenarios.size() == 50;
  o.detail = std::to_string(scenarios.size()) + " scenarios, " + std::to_string(pairs) +
             " pairs, lower-bound failures " + std::to_string(lower_failures) + ", upper-bound failures " +
             std::to_string(upper_failures) + ", errors " + std::to_string(errors) + ", worst stretch " +
             fmt(worst) + " (bound " + std::to_string(bound) + ")";
  return o;
}

Outcome criterion_sparse_recovery() {
  std::size_t collisions = 0, mismatches = 0;
  for (std::uint64_t u = 1; u <= 50; ++u) {
    for (std::uint32_t k = 1; k <= 2; ++k) {
      const std::uint64_t q = choose_prime(std::max<std::uint64_t>(u, 2));
      std::set<std::vector<std::uint64_t>> seen;
      std::vector<std::vector<std::uint64_t>> sets = {{}};
      for (std::uint64_t a = 0; a < u; ++a) {
        sets.push_back({a});
        if (k == 2)
          for (std::uint64_t b = a + 1; b < u; ++b)
            sets.push_back({a, b});
      }
      for (const auto &s : sets) {
        if (!seen.insert(encode_syndrome(u, k, q, s)).second)
          ++collisions;
        SyndromeSketch sk(u, k, q);
        for (auto e : s)
          sk.update(e, +1);
        const auto d = sk.decode();
        if (!d || *d != s)
          ++mismatches;
      }
    }
  }

  std::mt19937_64 rng(20240611);
  std::size_t roundtrip_failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t u = 1 + rng() % 10000;
    const auto k = static_cast<std::uint32_t>(1 + rng() % 8);
    const std::size_t size = rng() % (std::min<std::uint64_t>(k, u) + 1);
    std::set<std::uint64_t> s;
    while (s.size() < size)
      s.insert(rng() % u);
    SyndromeSketch sk(u, k);
    for (auto e : s)
      sk.update(e, +1);
    const auto d = sk.decode();
    if (!d || *d != std::vector<std::uint64_t>(s.begin(), s.end()))
      ++roundtrip_failures;
  }

  std::size_t deletion_failures = 0;
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t u = 50 + rng() % 2000;
    const auto k = static_cast<std::uint32_t>(1 + rng() % 4);
    std::set<std::uint64_t> keep, extra;
    const std::size_t keep_size = rng() % (k + 1);
    while (keep.size() < keep_size)
      keep.insert(rng() % u);
    const std::size_t extra_size = 1 + rng() % 20;
    while (extra.size() < extra_size) {
      const auto e = rng() % u;
      if (!keep.count(e))
        extra.insert(e);
    }
    SyndromeSketch sk(u, k);
    std::vector<std::uint64_t> order(keep.begin(), keep.end());
    order.insert(order.end(), extra.begin(), extra.end());
    std::shuffle(order.begin(), order.end(), rng);
    for (auto e : order)
      sk.update(e, +1);
    for (auto e : extra)
      sk.update(e, -1);
    const auto d = sk.decode();
    if (!d || *d != std::vector<std::uint64_t>(keep.begin(), keep.end()))
      ++deletion_failures;
  }

  Outcome o;
  o.pass = collisions == 0 && mismatches == 0 && roundtrip_failures == 0 && deletion_failures == 0;
  o.detail = "exhaustive collisions " + std::to_string(collisions) + ", exhaustive decode mismatches " +
             std::to_string(mismatches) + ", random roundtrip failures " + std::to_string(roundtrip_failures) +
             "/10000, deletion-then-decode failures " + std::to_string(deletion_failures) + "/2000";
  return o;
}

Outcome criterion_l0_sampler() {
  const std::uint64_t u = 1225;
  const double delta = 0.01;
  std::mt19937_64 rng(77);
  std::size_t foreign = 0, bottom = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const std::size_t size = 1 + rng() % 40;
    std::set<std::uint64_t> s;
    while (s.size() < size)
      s.insert(rng() % u);
    L0Sketch sk(u, delta, derive_seed(7, {static_cast<std::uint64_t>(i)}));
    for (auto e : s)
      sk.update(e, +1);
    for (int j = 0; j < 5; ++j) {
      const auto e = rng() % u;
      if (!s.count(e)) {
        sk.update(e, +1);
        sk.update(e, -1);
      }
    }
    const auto r = sk.sample();
    if (r.kind == L0Sample::Kind::Bottom)
      ++bottom;
    else if (r.kind == L0Sample::Kind::Empty || !s.count(r.element))
      ++foreign;
  }

  std::vector<std::uint64_t> support;
  for (std::uint64_t i = 0; i < 20; ++i)
    support.push_back(i * 61 + 3);
  std::vector<double> counts(support.size(), 0.0);
  std::size_t hits = 0;
  for (int i = 0; i < 10000; ++i) {
    L0Sketch sk(u, delta, derive_seed(99, {static_cast<std::uint64_t>(i)}));
    for (auto e : support)
      sk.update(e, +1);
    const auto r = sk.sample();
    if (r.kind != L0Sample::Kind::Element)
      continue;
    const auto it = std::find(support.begin(), support.end(), r.element);
    if (it == support.end()) {
      ++foreign;
      continue;
    }
    ++hits;
    counts[static_cast<std::size_t>(it - support.begin())] += 1.0;
  }
  const double expected = static_cast<double>(hits) / static_cast<double>(support.size());
  double chi = 0.0;
  for (double c : counts)
    chi += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(support.size() - 1));
  const double p = boost::math::cdf(boost::math::complement(dist, chi));
  const double bottom_rate = static_cast<double>(bottom) / draws;

  Outcome o;
  o.pass = foreign == 0 && bottom_rate <= 2 * delta && p > 0.001;
  o.detail = "non-support samples " + std::to_string(foreign) + ", bottom rate " + fmt(bottom_rate) +
             " (limit " + fmt(2 * delta) + "), chi-square " + fmt(chi) + " p=" + fmt(p);
  return o;
}

/// Edges of g that a star is eligible to hold.
Graph star_graph(const Graph &g, const StarRecord &s) {
  std::vector<EdgeId> ids;
  for (EdgeId e : g.edges())
    if (star_covers(s, e, g.n()))
      ids.push_back(e);
  return Graph::from_edge_ids(g.n(), ids);
}

Outcome criterion_stars() {
  std::size_t lower_failures = 0, upper_failures = 0, errors = 0, flagged = 0, trials = 0, gated_stars = 0;
  double worst = 0;
  for (Vertex n : {16u, 24u})
    for (Family fam : {Family::GnpDense, Family::BipartiteComplete, Family::TwoHopStarFamily,
                       Family::CliquePlusBridges})
      for (Adversary adv : {Adversary::RandomF, Adversary::RootTargeted})
        for (std::uint64_t f : {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(n * 3 / 2),
                                static_cast<std::uint64_t>(n * 2)}) {
          Scenario sc;
          sc.artifact = Artifact::Stars;
          sc.family = fam;
          sc.n = n;
          sc.f = f;
          sc.adversary = adv;
          sc.family_params.p = 0.7;
          sc.family_params.parts = 2;
          sc.stars = calibrated_stars();
          sc.trials = 5;
          sc.seed = 3;
          const Graph g = generate_graph(fam, n, sc.family_params, sc.seed);
          if (f > g.m())
            continue;
          auto cfg = sc.stars;
          cfg.f = f;
          gated_stars += StarOracle::build(g, cfg).report().stars_meeting_degree_condition;
          const auto r = run_verification(sc);
          g_containment.add("star oracle", r);
          for (const auto &t : r.trials) {
            ++trials;
            lower_failures += !t.lower_bound_ok;
            errors += !t.error.empty();
            if (t.applicable) {
              ++flagged;
              upper_failures += !t.upper_bound_ok;
              worst = std::max(worst, t.max_stretch);
            }
          }
        }

  std::mt19937_64 rng(4242);
  std::size_t structural_failures = 0, two_hop = 0, instances = 0;
  while (instances < 100) {
    const Vertex n = 16 + static_cast<Vertex>(rng() % 5) * 8;
    const double p = 0.2 + 0.6 * static_cast<double>(rng() % 1000) / 1000.0;
    FamilyParams fp;
    fp.p = p;
    fp.parts = 2;
    const Family fam = rng() % 2 ? Family::GnpDense : Family::TwoHopStarFamily;
    const Graph g = generate_graph(fam, n, fp, rng());
    const std::uint64_t d = g.min_degree();
    if (d == 0)
      continue;
    ++instances;
    const auto v = static_cast<Vertex>(rng() % n);
    const StarRecord s = construct_star(g, v, d);
    const Graph h = star_graph(g, s);
    const VertexSet members(n, s.members);
    const Distance diam = diameter(h, members);
    bool ok = diam.reachable() && diam.hops() <= 4 && s.members.front() <= s.root && s.in_star(s.root);
    if (s.hops == 2) {
      ++two_hop;
      std::size_t min_deg = SIZE_MAX;
      for (Vertex x : s.members)
        min_deg = std::min(min_deg, h.degree(x));
      ok = ok && 2 * n * min_deg >= d * d;
    }
    structural_failures += !ok;
  }

  Outcome o;
  o.pass = lower_failures == 0 && upper_failures == 0 && errors == 0 && structural_failures == 0 && flagged > 0;
  o.detail = std::to_string(trials) + " trials (" + std::to_string(flagged) + " applicability-flagged, " +
             std::to_string(gated_stars) + " gate-eligible stars), lower-bound failures " +
             std::to_string(lower_failures) + ", upper-bound failures " + std::to_string(upper_failures) +
             ", errors " + std::to_string(errors) + ", worst stretch " + fmt(worst) + "; structural failures " +
             std::to_string(structural_failures) + "/100 (" + std::to_string(two_hop) + " two-hop)";
  return o;
}

Outcome criterion_spanner() {
  std::size_t trials = 0, containment_failures = 0, stretch_failures = 0, errors = 0;
  double worst = 0;
  std::uint64_t bound = 0;
  const std::vector<std::pair<Family, std::uint64_t>> shapes = {{Family::GnpDense, 4},
                                                                {Family::GnpDense, 16},
                                                                {Family::CliquePlusBridges, 4},
                                                                {Family::CliquePlusBridges, 16},
                                                                {Family::RandomRegular, 4}};
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    Scenario sc;
    sc.artifact = Artifact::Spanner;
    sc.family = shapes[i].first;
    sc.n = 64;
    sc.f = shapes[i].second;
    sc.adversary = Adversary::RandomF;
    sc.family_params.p = 0.5;
    sc.family_params.d = 16;
    sc.spanner = calibrated_spanner();
    sc.trials = 100;
    sc.seed = 500 + i;
    const auto r = run_verification(sc);
    g_containment.add("spanner", r);
    for (const auto &t : r.trials) {
      ++trials;
      containment_failures += !t.containment_ok;
      stretch_failures += !t.upper_bound_ok;
      errors += !t.error.empty();
      worst = std::max(worst, t.max_stretch);
      bound = std::max(bound, t.stretch_bound);
    }
  }

  FamilyParams fp;
  fp.p = 0.5;
  const Graph g = generate_graph(Family::GnpDense, 64, fp, 8);
  auto cfg = calibrated_spanner();
  cfg.f = 8;
  const auto a = SpannerSketch::build(g, cfg, 31337);
  const auto b = SpannerSketch::build(g, cfg, 31337);
  AdversaryContext ctx;
  ctx.seed = 5;
  const auto del = adversary_deletions(Adversary::RandomF, g, cfg.f, ctx);
  const bool deterministic = a.serialize() == b.serialize() && a.recover(del).spanner == b.recover(del).spanner;

  const double rate = trials == 0 ? 0.0 : 1.0 - static_cast<double>(stretch_failures) / trials;
  Outcome o;
  o.pass = trials == 500 && containment_failures == 0 && errors == 0 && rate >= 0.99 && deterministic;
  o.detail = std::to_string(trials) + " trials, containment failures " + std::to_string(containment_failures) +
             ", stretch pass rate " + fmt(rate) + " (worst " + fmt(worst) + ", bound " + std::to_string(bound) +
             "), errors " + std::to_string(errors) + ", seed determinism " + (deterministic ? "bit-exact" : "BROKEN");
  return o;
}

/// Spends the budget stripping edges from a few vertices so some of them
/// drop below D/2.
std::vector<EdgeId> concentrated_deletions(const Graph &g, std::uint64_t f, std::uint64_t D, std::mt19937_64 &rng) {
  std::vector<EdgeId> out;
  std::set<EdgeId> used;
  std::vector<Vertex> order(g.n());
  for (Vertex v = 0; v < g.n(); ++v)
    order[v] = v;
  std::shuffle(order.begin(), order.end(), rng);
  for (Vertex v : order) {
    if (out.size() >= f)
      break;
    const std::size_t need = g.degree(v) + 1 - (D + 1) / 2;
    if (need > f - out.size())
      continue;
    for (Vertex w : g.neighbors(v)) {
      if (out.size() >= f)
        break;
      const EdgeId e = edge_id(v, w, g.n());
      if (used.insert(e).second)
        out.push_back(e);
    }
  }
  for (EdgeId e : g.edges()) {
    if (out.size() >= f)
      break;
    if (used.insert(e).second)
      out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome criterion_robustness() {
  const double c_diam = 1.0;
  const std::vector<Vertex> sizes = {256, 384, 512, 768, 1024};
  std::size_t graphs = 0, sets = 0, distance_failures = 0, bad_failures = 0, bad_nonzero = 0;
  double worst_ratio = 0;
  std::size_t worst_bad = 0;
  for (std::uint64_t f : {16, 64})
    for (Vertex n : sizes)
      for (std::uint64_t rep = 0; rep < 2; ++rep) {
        const double lg = log2n(n);
        const auto D = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(f)) * lg));
        FamilyParams fp;
        fp.d = static_cast<std::uint32_t>(D);
        const Graph g = generate_graph(Family::ExpanderCertified, n, fp, derive_seed(f, {n, rep}));
        ++graphs;
        const double limit = c_diam * lg * std::log2(lg);
        std::mt19937_64 rng(derive_seed(n, {f, rep, 1}));
        for (std::uint64_t s = 0; s < 100; ++s) {
          std::vector<EdgeId> del;
          AdversaryContext ctx;
          ctx.seed = derive_seed(n, {f, rep, s});
          switch (s % 4) {
          case 0:
            del = adversary_deletions(Adversary::RandomF, g, f, ctx);
            break;
          case 1:
            del = adversary_deletions(Adversary::DegreeTargeted, g, f, ctx);
            break;
          case 2:
            ctx.root = static_cast<Vertex>(rng() % n);
            del = adversary_deletions(Adversary::RootTargeted, g, f, ctx);
            break;
          default:
            del = concentrated_deletions(g, f, D, rng);
          }
          ++sets;
          const auto r = robustness_report(g, del, f, D);
          const double dist =
              r.max_high_pair_distance.reachable() ? static_cast<double>(r.max_high_pair_distance.hops()) : INFINITY;
          worst_ratio = std::max(worst_ratio, dist / limit);
          distance_failures += dist > limit;
          bad_failures += r.bad.size() > 4 * f / D;
          bad_nonzero += !r.bad.empty();
          worst_bad = std::max(worst_bad, r.bad.size());
        }
      }
  Outcome o;
  o.pass = graphs == 20 && distance_failures == 0 && bad_failures == 0;
  o.detail = std::to_string(graphs) + " certified expanders, " + std::to_string(sets) +
             " deletion sets, distance failures " + std::to_string(distance_failures) + " (worst distance/limit " +
             fmt(worst_ratio) + "), bad-set overflows " + std::to_string(bad_failures) + " (max |V_bad| " +
             std::to_string(worst_bad) + ", nonempty in " + std::to_string(bad_nonzero) + " sets)";
  return o;
}

Outcome criterion_streaming() {
  std::size_t trials = 0, lower_failures = 0, upper_failures = 0, containment_failures = 0, errors = 0;
  std::size_t capacity_failures = 0, refill_failures = 0, shadow_failures = 0, runs = 0, refills_total = 0;
  std::uint64_t peak_bits = 0;
  for (StreamMode mode : {StreamMode::Oracle, StreamMode::Spanner})
    for (Vertex n : {24u, 32u})
      for (Family fam : {Family::GnpDense, Family::CliquePlusBridges, Family::RandomRegular})
        for (std::uint64_t f : {6, 12, 24}) {
          Scenario sc;
          sc.artifact = mode == StreamMode::Oracle ? Artifact::StreamOracle : Artifact::StreamSpanner;
          sc.family = fam;
          sc.n = n;
          sc.f = f;
          sc.family_params.p = 0.9;
          sc.family_params.d = 12;
          sc.stream = calibrated_stream();
          sc.stream.mode = mode;
          sc.trials = mode == StreamMode::Oracle ? 4 : 2;
          sc.seed = 900 + n + f;
          const auto r = run_verification(sc);
          for (const auto &t : r.trials) {
            ++trials;
            lower_failures += !t.lower_bound_ok;
            upper_failures += !t.upper_bound_ok;
            containment_failures += !t.containment_ok;
            errors += !t.error.empty();
            peak_bits = std::max(peak_bits, t.peak_bits);
          }

          const Graph g = generate_graph(fam, n, sc.family_params, sc.seed);
          auto cfg = sc.stream;
          cfg.f = f;
          StreamProcessor sp(n, cfg, sc.seed);
          AdversaryContext ctx;
          ctx.seed = sc.seed;
          const auto del = adversary_deletions(Adversary::RandomF, g, f, ctx);
          const auto events = stream_from_graph(g, del, sc.seed);
          auto consistent = [&](EdgeId e) {
            const auto loc = sp.locate_edge(e);
            const std::int64_t want = loc ? static_cast<std::int64_t>(*loc) : StreamProcessor::kInBuffer;
            return sp.shadow_owner(e) == want;
          };
          for (const auto &ev : events) {
            sp.process(ev);
            if (ev.op == StreamOp::Insert)
              shadow_failures += !consistent(ev.edge);
          }
          const Graph survivors = g.without(del);
          for (EdgeId e : survivors.edges())
            shadow_failures += !consistent(e);
          const auto st = sp.stats();
          ++runs;
          refills_total += st.refills;
          capacity_failures += st.peak_buffer > sp.capacity();
          const std::uint64_t refill_bound = 2 * st.inserts / sp.capacity() + 1;
          refill_failures += st.refills > refill_bound;
          peak_bits = std::max(peak_bits, st.peak_bits);
        }
  Outcome o;
  o.pass = lower_failures == 0 && upper_failures == 0 && containment_failures == 0 && errors == 0 &&
           capacity_failures == 0 && refill_failures == 0 && shadow_failures == 0 && refills_total > 0;
  o.detail = std::to_string(trials) + " verified trials, lower-bound failures " + std::to_string(lower_failures) +
             ", upper-bound failures " + std::to_string(upper_failures) + ", containment failures " +
             std::to_string(containment_failures) + ", errors " + std::to_string(errors) + "; " +
             std::to_string(runs) + " replayed streams, capacity overflows " + std::to_string(capacity_failures) +
             ", refill-bound violations " + std::to_string(refill_failures) + " (total refills " +
             std::to_string(refills_total) + "), shadow mismatches " + std::to_string(shadow_failures) +
             ", peak measured bits " + std::to_string(peak_bits);
  return o;
}

Outcome criterion_space() {
  const Vertex n = 512;
  FamilyParams fp;
  fp.p = 0.5;
  const Graph g = generate_graph(Family::GnpDense, n, fp, 77);
  std::vector<double> oracle_ratio, stream_ratio;
  std::string detail;
  for (std::uint64_t f : {16, 64, 256, 1024}) {
    OracleConfig oc;
    oc.f = f;
    oc.c_D = 0.5;
    oc.c_stop = 0.001;
    const auto o = ExpanderOracle::build(g, oc);
    const double ob = static_cast<double>(measure_space(o));

    StreamConfig sc;
    sc.f = f;
    sc.c_D = 0.005;
    sc.c_capacity = 0.0002;
    sc.greedy_fallback = false;
    sc.validate = false;
    StreamProcessor sp(n, sc, 1);
    AdversaryContext ctx;
    ctx.seed = 2;
    sp.process_all(stream_from_graph(g, adversary_deletions(Adversary::RandomF, g, f, ctx), 3));
    const double sb = static_cast<double>(sp.stats().peak_bits);

    const double nf = static_cast<double>(n) * static_cast<double>(f);
    oracle_ratio.push_back(ob / nf);
    stream_ratio.push_back(sb / nf);
    detail += " f=" + std::to_string(f) + ": oracle " + fmt(ob / nf) + ", stream " + fmt(sb / nf) + ";";
  }
  bool pass = true;
  for (std::size_t i = 1; i < oracle_ratio.size(); ++i)
    pass = pass && oracle_ratio[i] < oracle_ratio[i - 1] && stream_ratio[i] < stream_ratio[i - 1];
  detail.pop_back();
  return {pass, "bits/(n f) at n=512:" + detail};
}

std::uint64_t fnv1a(const std::vector<std::uint8_t> &bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Serializations and answers of every deterministic artifact, in a fixed
/// order.
std::vector<std::vector<std::uint8_t>> determinism_outputs() {
  std::vector<std::vector<std::uint8_t>> out;
  auto push_answers = [&](const std::vector<Distance> &ds) {
    std::vector<std::uint8_t> bytes;
    for (const auto &d : ds) {
      const std::string s = d.str() + ",";
      bytes.insert(bytes.end(), s.begin(), s.end());
    }
    out.push_back(std::move(bytes));
  };

  FamilyParams fp;
  fp.p = 0.5;
  fp.d = 12;
  for (Family fam : {Family::GnpDense, Family::RandomRegular, Family::CliquePlusBridges}) {
    const Graph g = generate_graph(fam, 48, fp, 21);
    const auto gt = format_edge_list(g);
    out.emplace_back(gt.begin(), gt.end());

    auto oc = calibrated_oracle();
    oc.f = 4;
    const auto oracle = ExpanderOracle::build(g, oc);
    out.push_back(oracle.serialize());
    AdversaryContext ctx;
    ctx.seed = 6;
    const auto del = adversary_deletions(Adversary::DegreeTargeted, g, oc.f, ctx);
    const auto session = oracle.open_session(del);
    std::vector<Distance> answers;
    for (Vertex a = 0; a < g.n(); a += 3)
      for (Vertex b = a + 1; b < g.n(); b += 5)
        answers.push_back(session.query_distance(a, b));
    push_answers(answers);

    const Graph small = generate_graph(fam, 24, fp, 22);
    auto stc = calibrated_stars();
    stc.f = 24;
    const auto stars = StarOracle::build(small, stc);
    out.push_back(stars.serialize());
    const auto sdel = adversary_deletions(Adversary::RandomF, small, std::min<std::uint64_t>(stc.f, small.m()), ctx);
    answers.clear();
    for (Vertex a = 0; a < small.n(); a += 2)
      for (Vertex b = a + 1; b < small.n(); b += 3)
        answers.push_back(stars.report_distance(sdel, a, b));
    push_answers(answers);

    auto sc = calibrated_stream();
    sc.f = 8;
    StreamProcessor sp(32, sc);
    const Graph sg = generate_graph(fam, 32, fp, 23);
    sp.process_all(stream_from_graph(sg, adversary_deletions(Adversary::RandomF, sg, 8, ctx), 24));
    out.push_back(sp.serialize());
    answers.clear();
    for (Vertex a = 0; a < 32; ++a)
      answers.push_back(sp.query(0, a));
    push_answers(answers);

    auto spc = calibrated_spanner();
    spc.f = 4;
    const auto sketch = SpannerSketch::build(g, spc, 99);
    out.push_back(sketch.serialize());
    const auto rec = sketch.recover(del);
    const auto rt = format_edge_list(rec.spanner);
    out.emplace_back(rt.begin(), rt.end());
  }
  return out;
}

std::string digest_hex(const std::vector<std::vector<std::uint8_t>> &outputs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto &o : outputs)
    h = fnv1a(o, h);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Outcome criterion_determinism() {
  const auto first = determinism_outputs();
  const auto second = determinism_outputs();
  std::size_t differing = 0;
  for (std::size_t i = 0; i < first.size(); ++i)
    differing += first[i] != second[i];
  bool roundtrip = true;
  {
    FamilyParams fp;
    fp.p = 0.5;
    const Graph g = generate_graph(Family::GnpDense, 40, fp, 5);
    auto oc = calibrated_oracle();
    oc.f = 4;
    const auto o = ExpanderOracle::build(g, oc);
    roundtrip = roundtrip && ExpanderOracle::deserialize(o.serialize()).serialize() == o.serialize();
    auto stc = calibrated_stars();
    stc.f = 40;
    const auto s = StarOracle::build(g, stc);
    roundtrip = roundtrip && StarOracle::deserialize(s.serialize()).serialize() == s.serialize();
    auto spc = calibrated_spanner();
    spc.f = 4;
    const auto k = SpannerSketch::build(g, spc, 3);
    roundtrip = roundtrip && SpannerSketch::deserialize(k.serialize()).serialize() == k.serialize();
  }
  Outcome o;
  o.pass = differing == 0 && first.size() == second.size() && roundtrip;
  o.detail = std::to_string(first.size()) + " serializations and answer lists, " + std::to_string(differing) +
             " differing across runs, digest " + digest_hex(first) + ", serialize roundtrip " +
             (roundtrip ? "stable" : "UNSTABLE");
  return o;
}

} // namespace

int main(int argc, char **argv) {
  std::string digest_path;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--digest" && i + 1 < argc)
      digest_path = argv[++i];
    else if (arg == "--only" && i + 1 < argc)
      only.insert(std::stoi(argv[++i]));
    else {
      std::cerr << "usage: acceptance [--only N]... [--digest FILE]\n";
      return 2;
    }
  }
  if (only.count(2))
    only.insert({1, 5, 6});
  if (!digest_path.empty()) {
    std::ofstream(digest_path) << digest_hex(determinism_outputs()) << "\n";
    return 0;
  }

  struct Criterion {
    int id;
    const char *name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "expander oracle sandwich", criterion_expander_oracle},
      {3, "sparse recovery", criterion_sparse_recovery},
      {4, "l0 sampler", criterion_l0_sampler},
      {5, "stretch-7 star oracle", criterion_stars},
      {6, "oblivious spanner", criterion_spanner},
      {2, "containment", [] {
         Outcome o;
         o.pass = g_containment.violations == 0 && g_containment.per_source.size() == 3;
         o.detail = std::to_string(g_containment.trials) + " trials checked edge by edge, violations " +
                    std::to_string(g_containment.violations);
         for (const auto &[source, count] : g_containment.per_source)
           o.detail += ", " + source + " " + std::to_string(count);
         return o;
       }},
      {7, "robustness empirics", criterion_robustness},
      {8, "streaming", criterion_streaming},
      {9, "space trends", criterion_space},
      {10, "determinism", criterion_determinism},
  };

  std::map<int, std::string> lines;
  bool all = true;
  for (const auto &c : criteria) {
    if (!only.empty() && !only.count(c.id))
      continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    lines[c.id] = std::string(o.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + " (" + c.name +
                  "): " + o.detail + " [" + fmt(secs) + "s]";
    std::cerr << lines[c.id] << "\n";
  }
  for (const auto &[id, line] : lines)
    std::cout << line << "\n";
  return all ? 0 : 1;
}
