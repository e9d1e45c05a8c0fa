#include "doctest.h"

#include <algorithm>
#include <random>

#include "ftdo/decomposition.hpp"
#include "ftdo/error.hpp"
#include "ftdo/harness.hpp"
#include "ftdo/star_oracle.hpp"

using namespace ftdo;

namespace {

Graph complete_graph(Vertex n) {
  std::vector<VertexPair> p;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j)
      p.push_back({i, j});
  return Graph::from_pairs(n, p);
}

Graph complete_bipartite(Vertex a, Vertex b) {
  std::vector<VertexPair> p;
  for (Vertex i = 0; i < a; ++i)
    for (Vertex j = 0; j < b; ++j)
      p.push_back({i, a + j});
  return Graph::from_pairs(a + b, p);
}

/// The graph of all g-edges a star structurally covers.
Graph covered_edges(const Graph &g, const StarRecord &s) {
  std::vector<EdgeId> out;
  for (const auto &p : g.pairs())
    if (star_covers(s, p.u, p.v))
      out.push_back(edge_id(p.u, p.v, g.n()));
  return Graph::from_edge_ids(g.n(), out);
}

void check_star_structure(const Graph &g, const StarRecord &s, std::uint64_t d) {
  const Graph h = covered_edges(g, s);
  CHECK(diameter(h, VertexSet(g.n(), s.members)) <= Distance(4));
  for (Vertex x : s.l1)
    CHECK(g.has_edge(s.root, x));
  if (s.hops == 1) {
    CHECK(s.l2.empty());
    for (Vertex x : s.l1) {
      std::uint64_t inside = 0;
      for (Vertex y : g.neighbors(x))
        inside += s.l1.contains(y);
      CHECK(10 * inside >= d);
    }
  } else {
    std::uint64_t min_deg = UINT64_MAX;
    for (Vertex x : s.members)
      if (x != s.root) {
        std::uint64_t cnt = 0;
        for (Vertex y : g.neighbors(x))
          cnt += (s.l1.contains(x) && s.l2.contains(y)) || (s.l2.contains(x) && s.l1.contains(y));
        min_deg = std::min(min_deg, cnt);
      }
    CHECK(2 * static_cast<std::uint64_t>(g.n()) * min_deg >= d * d);
  }
}

StarConfig small_config(std::uint64_t f) {
  StarConfig c;
  c.f = f;
  c.covering_mult = 0.5;
  c.target_mult = 0.05;
  c.high_mult = 1.0;
  c.gate = StarGate::Certified;
  return c;
}

} // namespace

TEST_CASE("stars in complete graphs are one hop") {
  const Graph k = complete_graph(20);
  const auto s = construct_star(k, 3, 19);
  CHECK(s.hops == 1);
  CHECK(s.root == 3);
  CHECK(s.l1.size() == 19);
  CHECK(s.members.size() == 20);
  check_star_structure(k, s, 19);
  CHECK_THROWS_AS(construct_star(k, 3, 20), Error);
  CHECK_THROWS_AS(construct_star(k, 20, 1), Error);
}

TEST_CASE("stars in complete bipartite graphs are two hop") {
  const Graph b = complete_bipartite(12, 12);
  const auto s = construct_star(b, 0, 12);
  CHECK(s.hops == 2);
  CHECK(s.l1.size() == 12);
  CHECK(s.l2.size() == 11);
  CHECK(!s.l2.contains(0));
  check_star_structure(b, s, 12);
}

TEST_CASE("constructed stars respect their structural guarantees") {
  std::mt19937_64 rng(13);
  const Family families[] = {Family::GnpDense, Family::BipartiteComplete, Family::TwoHopStarFamily,
                             Family::CliquePlusBridges};
  for (int trial = 0; trial < 40; ++trial) {
    FamilyParams fp;
    fp.p = 0.6;
    fp.parts = 2;
    const Graph g = generate_graph(families[trial % 4], 24, fp, rng());
    const auto kept = peel(g, 4).kept;
    if (kept.empty())
      continue;
    const auto sub = induced_subgraph(g, kept);
    const std::uint64_t d = sub.graph.min_degree();
    const auto s = construct_star(sub.graph, static_cast<Vertex>(rng() % sub.graph.n()), d);
    check_star_structure(sub.graph, s, d);
  }
}

TEST_CASE("star coverage examples") {
  StarRecord one;
  one.root = 0;
  one.hops = 1;
  one.l1 = VertexSet(6, {1, 2});
  CHECK(star_covers(one, 0, 1));
  CHECK(star_covers(one, 1, 2));
  CHECK(!star_covers(one, 1, 3));
  CHECK(!star_covers(one, 1, 1));

  StarRecord two;
  two.root = 0;
  two.hops = 2;
  two.l1 = VertexSet(6, {1, 2});
  two.l2 = VertexSet(6, {3, 4});
  CHECK(star_covers(two, 0, 2));
  CHECK(star_covers(two, 4, 1));
  CHECK(!star_covers(two, 1, 2));
  CHECK(!star_covers(two, 3, 4));
  CHECK(!star_covers(two, 0, 3));
  CHECK(star_covers(two, edge_id(1, 3, 6), 6));
}

TEST_CASE("sparse graphs build no stars") {
  std::vector<VertexPair> p;
  for (Vertex i = 0; i + 1 < 30; ++i)
    p.push_back({i, i + 1});
  const Graph path = Graph::from_pairs(30, p);
  StarConfig c = small_config(30);
  c.target_mult = 1.0;
  const auto o = StarOracle::build(path, c);
  CHECK(o.stars().empty());
  CHECK(o.remaining() == path.edges());
  CHECK(o.report().f_in_range);
}

TEST_CASE("covering counts replay from eligibility") {
  const Graph k = complete_graph(24);
  const auto o = StarOracle::build(k, small_config(24));
  REQUIRE(!o.stars().empty());
  CHECK(o.covering_threshold() == 2);

  std::uint64_t degree_sum = 0;
  for (const auto &s : o.stars())
    for (auto d : s.degrees)
      degree_sum += d;
  std::uint64_t replayed = 0;
  for (EdgeId e : k.edges()) {
    const auto cover = o.covering_stars(e);
    replayed += cover.size();
    CHECK(std::is_sorted(cover.begin(), cover.end()));
    const bool left = std::binary_search(o.remaining().begin(), o.remaining().end(), e);
    CHECK(left == (cover.size() < o.covering_threshold()));
  }
  CHECK(degree_sum == 2 * replayed);
}

TEST_CASE("star oracle answers contain the surviving graph") {
  std::mt19937_64 rng(19);
  const Family families[] = {Family::GnpDense, Family::BipartiteComplete, Family::TwoHopStarFamily};
  for (int trial = 0; trial < 12; ++trial) {
    FamilyParams fp;
    fp.p = 0.7;
    fp.parts = 2;
    const Vertex n = 16 + 8 * static_cast<Vertex>(trial % 2);
    const Graph g = generate_graph(families[trial % 3], n, fp, rng());
    const std::uint64_t f = n;
    const auto o = StarOracle::build(g, small_config(f));
    AdversaryContext ctx;
    ctx.seed = rng();
    const auto del = adversary_deletions(trial % 2 ? Adversary::RootTargeted : Adversary::RandomF, g, f, ctx);
    const auto aux = o.approximate_graph(del);
    const Graph survivors = g.without(del);
    for (const auto &p : survivors.pairs())
      REQUIRE(aux.contains(p.u, p.v));
    for (Vertex b = 1; b < n; ++b) {
      const Distance truth = bfs_distances(survivors, 0)[b];
      const Distance ans = o.report_distance(del, 0, b);
      if (!truth.reachable())
        CHECK(!ans.reachable());
      else
        CHECK(ans >= truth);
    }
  }
}

TEST_CASE("star oracle errors and serialization") {
  const Graph k = complete_graph(16);
  const auto o = StarOracle::build(k, small_config(16));
  std::vector<EdgeId> too_many(k.edges().begin(), k.edges().begin() + 17);
  CHECK_THROWS_AS(o.approximate_graph(too_many), Error);
  const std::vector<EdgeId> twice = {k.edges()[0], k.edges()[0]};
  CHECK_THROWS_AS(o.approximate_graph(twice), Error);
  CHECK(o.report_distance({}, 4, 4) == Distance(0));
  const Distance adj = o.report_distance({}, 0, 1);
  CHECK(adj >= Distance(1));
  CHECK(adj <= Distance(StarOracle::kStretch));
  CHECK_THROWS_AS(o.report_distance({}, 0, 16), Error);

  const auto back = StarOracle::deserialize(o.serialize());
  CHECK(back.serialize() == o.serialize());
  CHECK(back.stars().size() == o.stars().size());
  const std::vector<EdgeId> del = {k.edges()[3], k.edges()[50]};
  for (Vertex v = 1; v < 16; ++v)
    CHECK(back.report_distance(del, 0, v) == o.report_distance(del, 0, v));
  CHECK(StarOracle::build(k, small_config(16)).serialize() == o.serialize());
}
