#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ftdo/error.hpp"
#include "ftdo/expander_oracle.hpp"
#include "ftdo/graph.hpp"
#include "ftdo/harness.hpp"
#include "ftdo/spanner_sketch.hpp"
#include "ftdo/star_oracle.hpp"
#include "ftdo/streaming.hpp"

using namespace ftdo;
using nlohmann::json;

namespace {

std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> read_bytes(const std::string &path) {
  const std::string s = read_text(path);
  return {s.begin(), s.end()};
}

void write_bytes(const std::string &path, const std::vector<std::uint8_t> &bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out << text;
}

/// "u v" per line; '#' lines and blank lines are skipped.
std::vector<VertexPair> parse_pairs(const std::string &text) {
  std::vector<VertexPair> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;
    std::istringstream ls(line);
    long long u = -1, v = -1;
    std::string rest;
    if (!(ls >> u >> v) || u < 0 || v < 0 || (ls >> rest))
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(number) + ": expected \"u v\"");
    out.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  return out;
}

std::vector<EdgeId> parse_deletions(const std::string &path, Vertex n) {
  std::vector<EdgeId> out;
  if (path.empty())
    return out;
  for (const auto &p : parse_pairs(read_text(path)))
    out.push_back(edge_id(p.u, p.v, n));
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t seed_or_env(std::optional<std::uint64_t> explicit_seed, std::uint64_t fallback) {
  if (explicit_seed)
    return *explicit_seed;
  if (const char *env = std::getenv("FTDO_SEED"))
    return std::stoull(env);
  return fallback;
}

json distance_json(const Distance &d) {
  return d.reachable() ? json(d.hops()) : json(nullptr);
}

void print_answers(const std::vector<VertexPair> &pairs, const std::vector<Distance> &answers) {
  for (std::size_t i = 0; i < pairs.size(); ++i)
    std::cout << pairs[i].u << " " << pairs[i].v << " " << answers[i].str() << "\n";
}

struct OracleOptions {
  OracleConfig cfg;
  void attach(CLI::App *app) {
    app->add_option("--c-D", cfg.c_D, "degree constant");
    app->add_option("--c-stop", cfg.c_stop, "level stop constant");
    app->add_option("--c-stretch", cfg.c_stretch, "reported stretch constant");
    app->add_option("--deg-exponent", cfg.deg_exponent, "log exponent of the degree (1 or 2)");
    app->add_option("--peel-multiplier", cfg.peel_multiplier, "first peel threshold multiplier");
  }
};

struct StarOptions {
  StarConfig cfg;
  std::string gate = "literal";
  void attach(CLI::App *app) {
    app->add_option("--covering-mult", cfg.covering_mult, "covering threshold constant");
    app->add_option("--target-mult", cfg.target_mult, "target degree constant");
    app->add_option("--sketch-mult", cfg.sketch_mult, "sketch sparsity constant");
    app->add_option("--high-mult", cfg.high_mult, "high-degree threshold constant");
    app->add_option("--gate", gate, "root gate")->check(CLI::IsMember({"literal", "certified"}));
  }
  StarConfig resolved(std::uint64_t f) const {
    StarConfig c = cfg;
    c.f = f;
    c.gate = gate == "certified" ? StarGate::Certified : StarGate::Literal;
    return c;
  }
};

struct SpannerOptions {
  SpannerConfig cfg;
  void attach(CLI::App *app) {
    app->add_option("--c-ladder", cfg.c_ladder, "degree ladder floor constant");
    app->add_option("--c-level", cfg.c_level, "level continuation constant");
    app->add_option("--c-comp", cfg.c_comp, "component sampler count constant");
    app->add_option("--comp-log-exp", cfg.comp_log_exp, "log exponent of the component sampler count");
    app->add_option("--delta-exp", cfg.delta_exp, "sampler failure probability exponent");
    app->add_option("--c-span", cfg.c_span, "stretch bound constant");
  }
};

struct StreamOptions {
  StreamConfig cfg;
  bool no_greedy = false;
  void attach(CLI::App *app) {
    app->add_option("--c-D", cfg.c_D, "component degree constant");
    app->add_option("--c-capacity", cfg.c_capacity, "buffer capacity constant");
    app->add_option("--c-stretch", cfg.c_stretch, "reported stretch constant");
    app->add_option("--comp-log-exp", cfg.comp_log_exp, "log exponent of the component sampler count");
    app->add_option("--delta-exp", cfg.delta_exp, "sampler failure probability exponent");
    app->add_flag("--no-greedy", no_greedy, "never use the greedy spanner for small f");
  }
};

void apply_scenario_json(Scenario &sc, const json &j) {
  if (j.contains("artifact"))
    sc.artifact = parse_artifact(j["artifact"].get<std::string>());
  if (j.contains("family"))
    sc.family = parse_family(j["family"].get<std::string>());
  if (j.contains("adversary"))
    sc.adversary = parse_adversary(j["adversary"].get<std::string>());
  sc.n = j.value("n", sc.n);
  sc.f = j.value("f", sc.f);
  sc.seed = j.value("seed", sc.seed);
  sc.trials = j.value("trials", sc.trials);
  sc.regenerate_graph = j.value("regenerate_graph", sc.regenerate_graph);
  if (j.contains("params")) {
    const auto &p = j["params"];
    sc.family_params.d = p.value("d", sc.family_params.d);
    sc.family_params.p = p.value("p", sc.family_params.p);
    sc.family_params.parts = p.value("parts", sc.family_params.parts);
    sc.family_params.left = p.value("left", sc.family_params.left);
  }
  if (j.contains("oracle")) {
    const auto &o = j["oracle"];
    sc.oracle.c_D = o.value("c_D", sc.oracle.c_D);
    sc.oracle.c_stop = o.value("c_stop", sc.oracle.c_stop);
    sc.oracle.c_stretch = o.value("c_stretch", sc.oracle.c_stretch);
    sc.oracle.deg_exponent = o.value("deg_exponent", sc.oracle.deg_exponent);
    sc.oracle.peel_multiplier = o.value("peel_multiplier", sc.oracle.peel_multiplier);
  }
  if (j.contains("stars")) {
    const auto &s = j["stars"];
    sc.stars.covering_mult = s.value("covering_mult", sc.stars.covering_mult);
    sc.stars.target_mult = s.value("target_mult", sc.stars.target_mult);
    sc.stars.sketch_mult = s.value("sketch_mult", sc.stars.sketch_mult);
    sc.stars.high_mult = s.value("high_mult", sc.stars.high_mult);
    if (s.contains("gate"))
      sc.stars.gate = s["gate"].get<std::string>() == "certified" ? StarGate::Certified : StarGate::Literal;
  }
  if (j.contains("spanner")) {
    const auto &s = j["spanner"];
    sc.spanner.c_ladder = s.value("c_ladder", sc.spanner.c_ladder);
    sc.spanner.c_level = s.value("c_level", sc.spanner.c_level);
    sc.spanner.c_comp = s.value("c_comp", sc.spanner.c_comp);
    sc.spanner.comp_log_exp = s.value("comp_log_exp", sc.spanner.comp_log_exp);
    sc.spanner.delta_exp = s.value("delta_exp", sc.spanner.delta_exp);
    sc.spanner.c_span = s.value("c_span", sc.spanner.c_span);
  }
  if (j.contains("stream")) {
    const auto &s = j["stream"];
    sc.stream.c_D = s.value("c_D", sc.stream.c_D);
    sc.stream.c_capacity = s.value("c_capacity", sc.stream.c_capacity);
    sc.stream.c_stretch = s.value("c_stretch", sc.stream.c_stretch);
    sc.stream.comp_log_exp = s.value("comp_log_exp", sc.stream.comp_log_exp);
    sc.stream.delta_exp = s.value("delta_exp", sc.stream.delta_exp);
    sc.stream.greedy_fallback = s.value("greedy_fallback", sc.stream.greedy_fallback);
  }
}

std::vector<std::uint64_t> parse_list(const std::string &text) {
  std::vector<std::uint64_t> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    out.push_back(std::stoull(item));
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Fault-tolerant distance oracles, oblivious spanner sketches and bounded-deletion streams"};
  app.require_subcommand(1);

  // oracle
  auto *oracle = app.add_subcommand("oracle", "deterministic expander-based distance oracle");
  oracle->require_subcommand(1);
  auto *oracle_build = oracle->add_subcommand("build", "build an oracle from an edge list");
  std::string graph_path, out_path, oracle_path, delete_path, pairs_path;
  std::uint64_t faults = 0;
  OracleOptions oracle_opts;
  oracle_build->add_option("--graph", graph_path, "edge-list file")->required();
  oracle_build->add_option("--faults", faults, "fault budget f")->required();
  oracle_build->add_option("--out", out_path, "output file")->required();
  oracle_opts.attach(oracle_build);
  auto *oracle_query = oracle->add_subcommand("query", "answer distance queries after deletions");
  oracle_query->add_option("--oracle", oracle_path, "oracle file")->required();
  oracle_query->add_option("--delete", delete_path, "deleted edges, one \"u v\" per line");
  oracle_query->add_option("--pairs", pairs_path, "query pairs, one \"a b\" per line")->required();

  // stars
  auto *stars = app.add_subcommand("stars", "stretch-7 star oracle");
  stars->require_subcommand(1);
  auto *stars_build = stars->add_subcommand("build", "build a star oracle from an edge list");
  StarOptions star_opts;
  stars_build->add_option("--graph", graph_path, "edge-list file")->required();
  stars_build->add_option("--faults", faults, "fault budget f")->required();
  stars_build->add_option("--out", out_path, "output file")->required();
  star_opts.attach(stars_build);
  auto *stars_query = stars->add_subcommand("query", "answer distance queries after deletions");
  stars_query->add_option("--oracle", oracle_path, "star oracle file")->required();
  stars_query->add_option("--delete", delete_path, "deleted edges, one \"u v\" per line");
  stars_query->add_option("--pairs", pairs_path, "query pairs, one \"a b\" per line")->required();

  // spanner
  auto *spanner = app.add_subcommand("spanner", "oblivious fault-tolerant spanner sketch");
  spanner->require_subcommand(1);
  auto *spanner_sketch = spanner->add_subcommand("sketch", "sketch an edge list");
  std::optional<std::uint64_t> seed;
  SpannerOptions spanner_opts;
  spanner_sketch->add_option("--graph", graph_path, "edge-list file")->required();
  spanner_sketch->add_option("--faults", faults, "fault budget f")->required();
  spanner_sketch->add_option("--seed", seed, "master seed");
  spanner_sketch->add_option("--out", out_path, "output file")->required();
  spanner_opts.attach(spanner_sketch);
  auto *spanner_recover = spanner->add_subcommand("recover", "recover a spanner of G - F");
  std::string sketch_path;
  spanner_recover->add_option("--sketch", sketch_path, "sketch file")->required();
  spanner_recover->add_option("--delete", delete_path, "deleted edges, one \"u v\" per line");
  spanner_recover->add_option("--out", out_path, "edge-list output")->required();

  // stream
  auto *stream = app.add_subcommand("stream", "bounded-deletion streaming");
  stream->require_subcommand(1);
  auto *stream_run = stream->add_subcommand("run", "process an event stream");
  std::string events_path, mode = "oracle", query_path, recover_path;
  std::optional<Vertex> stream_n;
  StreamOptions stream_opts;
  stream_run->add_option("--events", events_path, "event file, \"+ u v\" or \"- u v\" per line")->required();
  stream_run->add_option("--faults", faults, "deletion budget f")->required();
  stream_run->add_option("--mode", mode, "oracle or spanner")->check(CLI::IsMember({"oracle", "spanner"}));
  stream_run->add_option("--seed", seed, "sampling seed");
  stream_run->add_option("--n", stream_n, "vertex count (default: largest id + 1)");
  stream_run->add_option("--query", query_path, "query pairs (oracle mode)");
  stream_run->add_option("--recover", recover_path, "write the recovered spanner (spanner mode)");
  stream_opts.attach(stream_run);

  // verify
  auto *verify = app.add_subcommand("verify", "run a scenario against brute force");
  std::string scenario_path, artifact = "oracle", family = "GnpDense", adversary = "RandomF", format = "json";
  Vertex n = 16;
  std::uint32_t trials = 1;
  FamilyParams params;
  verify->add_option("--scenario", scenario_path, "scenario JSON (flags below are the defaults it overrides)");
  verify->add_option("--artifact", artifact, "oracle, stars, spanner, stream-oracle or stream-spanner");
  verify->add_option("--family", family, "graph family");
  verify->add_option("--n", n, "vertex count");
  verify->add_option("--faults", faults, "fault budget f");
  verify->add_option("--adversary", adversary, "deletion adversary");
  verify->add_option("--seed", seed, "scenario seed");
  verify->add_option("--trials", trials, "trial count");
  verify->add_option("--d", params.d, "RandomRegular degree / ExpanderCertified minimum degree");
  verify->add_option("--p", params.p, "GnpDense edge probability");
  verify->add_option("--parts", params.parts, "block count");
  verify->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  verify->add_option("--out", out_path, "report file (default stdout)");

  // bench
  auto *bench = app.add_subcommand("bench", "space sweep over f, CSV output");
  std::string f_list = "16,64,256,1024";
  OracleOptions bench_oracle;
  bench->add_option("--artifact", artifact, "oracle, stars, spanner, stream-oracle or stream-spanner");
  bench->add_option("--family", family, "graph family");
  bench->add_option("--n", n, "vertex count");
  bench->add_option("--f-values", f_list, "comma-separated fault budgets");
  bench->add_option("--seed", seed, "graph seed");
  bench->add_option("--d", params.d, "RandomRegular degree / ExpanderCertified minimum degree");
  bench->add_option("--p", params.p, "GnpDense edge probability");
  bench->add_option("--parts", params.parts, "block count");
  bench->add_option("--scenario", scenario_path, "scenario JSON supplying constant overrides");
  bench->add_option("--out", out_path, "CSV file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (oracle_build->parsed()) {
      const Graph g = parse_edge_list(read_text(graph_path));
      auto cfg = oracle_opts.cfg;
      cfg.f = faults;
      const auto o = ExpanderOracle::build(g, cfg);
      write_bytes(out_path, o.serialize());
      std::cout << json{{"n", g.n()}, {"m", g.m()}, {"D", o.D()}, {"k", o.k()}, {"levels", o.level_count()},
                        {"residual", o.residual().size()}, {"stretch", o.stretch()}, {"bits", o.measured_bits()}}
                << "\n";
    } else if (oracle_query->parsed()) {
      const auto o = ExpanderOracle::deserialize(read_bytes(oracle_path));
      const auto session = o.open_session(parse_deletions(delete_path, o.n()));
      const auto pairs = parse_pairs(read_text(pairs_path));
      std::vector<Distance> answers;
      for (const auto &p : pairs) {
        if (p.u >= o.n() || p.v >= o.n())
          throw Error(ErrorCode::OutOfRange, "query vertex outside graph");
        answers.push_back(session.query_distance(p.u, p.v));
      }
      print_answers(pairs, answers);
    } else if (stars_build->parsed()) {
      const Graph g = parse_edge_list(read_text(graph_path));
      const auto o = StarOracle::build(g, star_opts.resolved(faults));
      write_bytes(out_path, o.serialize());
      std::cout << json{{"n", g.n()},
                        {"m", g.m()},
                        {"stars", o.stars().size()},
                        {"remaining", o.remaining().size()},
                        {"covering_threshold", o.covering_threshold()},
                        {"target_degree", o.target_degree()},
                        {"f_in_range", o.report().f_in_range},
                        {"roots_exhausted", o.report().roots_exhausted},
                        {"bits", o.measured_bits()}}
                << "\n";
    } else if (stars_query->parsed()) {
      const auto o = StarOracle::deserialize(read_bytes(oracle_path));
      const auto deletions = parse_deletions(delete_path, o.n());
      const auto pairs = parse_pairs(read_text(pairs_path));
      const AuxGraph h = o.approximate_graph(deletions);
      std::vector<Distance> answers;
      for (const auto &p : pairs) {
        if (p.u >= o.n() || p.v >= o.n())
          throw Error(ErrorCode::OutOfRange, "query vertex outside graph");
        answers.push_back(h.distance(p.u, p.v).scaled(StarOracle::kStretch));
      }
      print_answers(pairs, answers);
    } else if (spanner_sketch->parsed()) {
      const Graph g = parse_edge_list(read_text(graph_path));
      auto cfg = spanner_opts.cfg;
      cfg.f = faults;
      const auto s = SpannerSketch::build(g, cfg, seed_or_env(seed, 1));
      write_bytes(out_path, s.serialize());
      std::cout << json{{"n", g.n()},
                        {"m", g.m()},
                        {"seed", s.seed()},
                        {"ladder", s.ladder()},
                        {"components", s.components().size()},
                        {"residual", s.residual().size()},
                        {"stretch", spanner_stretch(g.n(), cfg)},
                        {"bits", s.measured_bits()}}
                << "\n";
    } else if (spanner_recover->parsed()) {
      const auto s = SpannerSketch::deserialize(read_bytes(sketch_path));
      const auto r = s.recover(parse_deletions(delete_path, s.n()));
      write_text(out_path, format_edge_list(r.spanner));
      std::cout << json{{"spanner_edges", r.spanner.m()},
                        {"decoded_vertices", r.decoded_vertices},
                        {"sampled_edges", r.sampled_edges},
                        {"rejected_edges", r.rejected_edges}}
                << "\n";
    } else if (stream_run->parsed()) {
      const auto raw = parse_stream(read_text(events_path));
      Vertex vertices = 0;
      for (const auto &e : raw)
        vertices = std::max({vertices, e.u + 1, e.v + 1});
      if (stream_n)
        vertices = *stream_n;
      const auto events = resolve_stream(raw, vertices);
      auto cfg = stream_opts.cfg;
      cfg.f = faults;
      cfg.mode = mode == "spanner" ? StreamMode::Spanner : StreamMode::Oracle;
      cfg.greedy_fallback = !stream_opts.no_greedy;
      StreamProcessor sp(vertices, cfg, seed_or_env(seed, 1));
      sp.process_all(events);
      const auto st = sp.stats();
      json report{{"peak_bits", st.peak_bits}, {"refills", st.refills}, {"events", st.events}};
      if (!query_path.empty()) {
        if (cfg.mode != StreamMode::Oracle)
          throw Error(ErrorCode::InfeasibleParams, "--query needs --mode oracle");
        json answers = json::array();
        for (const auto &p : parse_pairs(read_text(query_path))) {
          if (p.u >= vertices || p.v >= vertices)
            throw Error(ErrorCode::OutOfRange, "query vertex outside graph");
          answers.push_back({{"a", p.u}, {"b", p.v}, {"distance", distance_json(sp.query(p.u, p.v))}});
        }
        report["answers"] = answers;
      }
      if (!recover_path.empty()) {
        if (cfg.mode != StreamMode::Spanner)
          throw Error(ErrorCode::InfeasibleParams, "--recover needs --mode spanner");
        const Graph h = sp.recover();
        write_text(recover_path, format_edge_list(h));
        report["spanner_edges"] = h.m();
      }
      std::cout << report << "\n";
    } else if (verify->parsed()) {
      Scenario sc;
      sc.artifact = parse_artifact(artifact);
      sc.family = parse_family(family);
      sc.adversary = parse_adversary(adversary);
      sc.n = n;
      sc.f = faults;
      sc.trials = trials;
      sc.family_params = params;
      if (!scenario_path.empty())
        apply_scenario_json(sc, json::parse(read_text(scenario_path)));
      if (seed)
        sc.seed = *seed;
      sc.seed = seed_or_env(seed, sc.seed);
      const auto report = run_verification(sc);
      const std::string text = format == "csv" ? report.csv() : report.json_lines();
      if (out_path.empty())
        std::cout << text;
      else
        write_text(out_path, text);
      return report.hard_ok() ? 0 : 1;
    } else if (bench->parsed()) {
      Scenario sc;
      sc.artifact = parse_artifact(artifact);
      sc.family = parse_family(family);
      sc.n = n;
      sc.family_params = params;
      if (!scenario_path.empty())
        apply_scenario_json(sc, json::parse(read_text(scenario_path)));
      const std::uint64_t graph_seed = seed_or_env(seed, sc.seed);
      const Graph g = generate_graph(sc.family, sc.n, sc.family_params, graph_seed);
      std::ostringstream csv;
      csv << "artifact,family,n,m,f,bits,bits_per_nf,seconds\n";
      for (std::uint64_t f : parse_list(f_list)) {
        const auto start = std::chrono::steady_clock::now();
        std::uint64_t bits = 0;
        switch (sc.artifact) {
        case Artifact::Oracle: {
          auto cfg = sc.oracle;
          cfg.f = f;
          bits = measure_space(ExpanderOracle::build(g, cfg));
          break;
        }
        case Artifact::Stars: {
          auto cfg = sc.stars;
          cfg.f = f;
          bits = measure_space(StarOracle::build(g, cfg));
          break;
        }
        case Artifact::Spanner: {
          auto cfg = sc.spanner;
          cfg.f = f;
          bits = measure_space(SpannerSketch::build(g, cfg, graph_seed));
          break;
        }
        case Artifact::StreamOracle:
        case Artifact::StreamSpanner: {
          auto cfg = sc.stream;
          cfg.f = f;
          cfg.mode = sc.artifact == Artifact::StreamSpanner ? StreamMode::Spanner : StreamMode::Oracle;
          cfg.validate = false;
          StreamProcessor sp(g.n(), cfg, graph_seed);
          AdversaryContext ctx;
          ctx.seed = graph_seed;
          const auto del = adversary_deletions(Adversary::RandomF, g, std::min<std::uint64_t>(f, g.m()), ctx);
          sp.process_all(stream_from_graph(g, del, graph_seed));
          bits = sp.stats().peak_bits;
          break;
        }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        csv << artifact_name(sc.artifact) << "," << family_name(sc.family) << "," << g.n() << "," << g.m() << ","
            << f << "," << bits << "," << static_cast<double>(bits) / (static_cast<double>(g.n()) * f) << ","
            << secs << "\n";
      }
      if (out_path.empty())
        std::cout << csv.str();
      else
        write_text(out_path, csv.str());
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
