#include "explorer/cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <thread>

#include "explorer/error.hpp"
#include "explorer/explorer.hpp"
#include "explorer/io.hpp"
#include "explorer/service.hpp"

namespace explorer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

struct BatchConfig {
  std::string scene, bundle, params, out, policy = "breadth_first";
  std::uint64_t seed = 0;
  long samples = 0;
  double seconds = 0.0;
  std::size_t max_nodes = 100;
};

struct OracleConfig {
  std::string scene, bundle, params, out, compare;
  std::uint64_t seed = 0;
  int level = 0;
  int starts = 200;
  int via = 3;
};

struct ServeConfig {
  std::string host = "127.0.0.1", scene, bundle, params, data_dir, static_dir;
  int port = 8080;
  std::uint64_t seed = 0;
  std::size_t animation_steps = 200;
};

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::NoPathFound:
    case ErrorKind::OracleIncomplete:
    case ErrorKind::NodeUnknown:
    case ErrorKind::LevelExhausted:
      return kExitRuntime;
    default:
      return kExitUsage;
  }
}

json params_doc(const std::string& arg) {
  if (arg.empty()) return nullptr;
  try {
    if (fs::exists(arg)) return json::parse(read_file(arg));
    return json::parse(arg);
  } catch (const json::parse_error&) {
    throw Error(ErrorKind::Schema, "--params: neither a JSON file nor inline JSON", "params");
  }
}

/// Creates `dir` and proves it writable.
void prepare_out(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path probe = dir / ".write-probe";
  std::ofstream f(probe);
  if (ec || !f) throw Error(ErrorKind::Io, "output directory '" + dir.string() + "' is not writable", "out");
  f.close();
  fs::remove(probe, ec);
}

void write_json(const fs::path& p, const json& doc) { write_file(p, doc.dump(2) + "\n"); }

Session make_session(const std::string& scene, const std::string& bundle, const std::string& params,
                     std::uint64_t seed) {
  return new_session(load_input(scene, "scenes"),
                     bundle.empty() ? json(nullptr) : load_input(bundle, "bundles"),
                     ExplorerParams::from_json(params_doc(params)), seed);
}

json node_doc(const MinimaNode& n) {
  return {{"id", n.id}, {"level", n.level}, {"parent", n.parent}, {"cost", n.cost},
          {"path", path_to_json(n.path)}};
}

int cmd_batch(const BatchConfig& c, std::ostream& out) {
  prepare_out(c.out);
  const BatchPolicy policy = batch_policy_from_string(c.policy);
  const Ptc ptc = c.seconds > 0.0 ? Ptc::time_budget(c.seconds)
                                  : Ptc::sample_budget(c.samples > 0 ? c.samples : 2000);
  Session session = make_session(c.scene, c.bundle, c.params, c.seed);
  const auto t0 = std::chrono::steady_clock::now();
  const BatchResult result = run_batch(session, policy, ptc, c.max_nodes);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir(c.out);
  write_json(dir / "tree.json", result.snapshot);
  write_json(dir / "session.json", session.save());
  const MinimaTree& tree = session.tree();
  json levels = json::array();
  for (int k = 1; k <= session.levels(); ++k) {
    json minima = json::array();
    for (NodeId id : tree.level_nodes(k)) {
      const MinimaNode& n = tree.node(id);
      write_json(dir / "minima" / ("node_" + std::to_string(id) + ".json"), node_doc(n));
      minima.push_back({{"id", id}, {"parent", n.parent}, {"cost", n.cost}});
    }
    levels.push_back({{"level", k}, {"count", minima.size()}, {"minima", minima}});
  }
  long no_path = 0;
  json timing = json::array();
  for (const auto& r : result.reports) {
    no_path += r.no_path ? 1 : 0;
    timing.push_back({{"iteration", r.iteration}, {"node", r.node}, {"seconds", r.seconds}});
  }
  json budget = ptc.kind == Ptc::Kind::Samples ? json{{"samples", ptc.samples}}
                                               : json{{"seconds", ptc.seconds}};
  const json summary = {{"format", "explorer-batch-summary"},
                        {"version", 1},
                        {"scene", session.scene().name},
                        {"levels", session.levels()},
                        {"seed", c.seed},
                        {"policy", to_string(policy)},
                        {"budget", budget},
                        {"max_nodes", c.max_nodes},
                        {"params", session.params().to_json()},
                        {"expansions", result.reports.size()},
                        {"no_path_expansions", no_path},
                        {"composite_minima", tree.level_nodes(session.levels()).size()},
                        {"per_level", levels}};
  validate_summary(summary);
  write_json(dir / "summary.json", summary);
  write_json(dir / "timing.json", {{"total_seconds", total}, {"expansions", timing}});
  out << "composite minima: " << summary["composite_minima"] << " (" << result.reports.size()
      << " expansions, " << total << " s)\n";
  return kExitOk;
}

int cmd_oracle(const OracleConfig& c, std::ostream& out, std::ostream& err) {
  Session session = make_session(c.scene, c.bundle, c.params, c.seed);
  const int level = c.level > 0 ? c.level : session.levels();
  if (level > session.levels()) {
    throw Error(ErrorKind::Validation, "--level " + std::to_string(level) + " exceeds the bundle", "level");
  }
  const CompositeSpace& space = session.bundle().level(level);
  if (space.dimension() > 6) {
    err << "oracle: level " << level << " has dimension " << space.dimension()
        << ", above the limit of 6. Give a bundle with --bundle and pick a lower level with --level.\n";
    return kExitUsage;
  }
  if (!c.out.empty()) prepare_out(c.out);
  OracleSettings settings;
  settings.starts = c.starts;
  settings.via_points = c.via;
  settings.rungs = session.params().tree.rungs;
  Rng rng(c.seed);
  const OracleResult result = multistart_oracle(space, session.optimizer(), settings, rng);
  json reps = json::array();
  for (const auto& m : result.minima) {
    reps.push_back({{"cost", m.cost}, {"cluster_size", m.cluster_size}, {"path", path_to_json(m.path)}});
  }
  const json doc = {{"format", "explorer-oracle"},
                    {"version", 1},
                    {"scene", session.scene().name},
                    {"level", level},
                    {"dimension", space.dimension()},
                    {"seed", c.seed},
                    {"starts", c.starts},
                    {"feasible_starts", result.feasible_starts},
                    {"clusters", result.minima.size()},
                    {"representatives", reps}};
  if (!c.out.empty()) write_json(fs::path(c.out) / "oracle.json", doc);
  out << "oracle clusters: " << result.minima.size() << " (" << result.feasible_starts << "/"
      << c.starts << " feasible starts)\n";
  if (c.compare.empty()) return kExitOk;

  const json tree_doc = json::parse(read_file(fs::path(c.compare) / "tree.json"));
  const MinimaTree tree = MinimaTree::from_json(tree_doc);
  int top = 0;
  for (const auto& n : tree.nodes()) top = std::max(top, n.level);
  const std::vector<NodeId> batch_minima = top > 0 ? tree.level_nodes(top) : std::vector<NodeId>{};
  for (NodeId id : batch_minima) {
    const auto& p = tree.node(id).path;
    if (p.empty() || p.front().size() != static_cast<std::size_t>(space.dimension())) {
      throw Error(ErrorKind::DimensionMismatch,
                  "batch minima are not in the oracle's space; match --bundle and --level to the batch run",
                  "compare");
    }
  }
  bool ok = !batch_minima.empty();
  if (!ok) err << "oracle: the batch output has no minima\n";
  json rows = json::array();
  for (NodeId id : batch_minima) {
    json matches = json::array();
    for (std::size_t r = 0; r < result.minima.size(); ++r) {
      if (is_deformable(space, tree.node(id).path, result.minima[r].path, settings.rungs)) {
        matches.push_back(r);
      }
    }
    if (matches.size() != 1) ok = false;
    rows.push_back({{"node", id}, {"representatives", matches}});
    out << "minimum " << id << " matches " << matches.size() << " representative(s)\n";
  }
  if (!c.out.empty()) write_json(fs::path(c.out) / "compare.json", {{"pass", ok}, {"minima", rows}});
  out << "compare: " << (ok ? "pass" : "fail") << "\n";
  return ok ? kExitOk : kExitCompare;
}

int cmd_serve(const ServeConfig& c, std::ostream& out, std::ostream& err) {
  ServiceOptions options;
  options.data_dir = c.data_dir.empty() ? data_dir_from_env("explorer-data") : fs::path(c.data_dir);
  options.static_dir = c.static_dir;
  options.animation_steps = c.animation_steps;
  Service service(options);
  const std::size_t restored = service.restore();
  if (restored > 0) out << "restored " << restored << " session(s) from " << options.data_dir << "\n";
  if (!c.scene.empty()) {
    json req = {{"scene", load_input(c.scene, "scenes")}, {"seed", c.seed}};
    if (!c.bundle.empty()) req["bundle"] = load_input(c.bundle, "bundles");
    if (!c.params.empty()) req["params"] = params_doc(c.params);
    const ApiResponse r = service.create_session(req);
    if (r.status != 201) {
      err << "serve: cannot preload the scene: " << r.body.value("message", "") << "\n";
      return kExitUsage;
    }
    out << "session " << r.body["id"].get<std::string>() << "\n";
  }

  httplib::Server server;
  // no SO_REUSEPORT: a second server on a taken port must fail to bind
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  service.mount(server);
  int port = c.port;
  if (port == 0) {
    port = server.bind_to_any_port(c.host);
    if (port < 0) port = 0;
  } else if (!server.bind_to_port(c.host, port)) {
    port = 0;
  }
  if (port == 0) {
    err << "serve: cannot bind " << c.host << ":" << c.port << "\n";
    return kExitRuntime;
  }
  out << "listening on http://" << c.host << ":" << port << std::endl;

  g_interrupted = false;
  auto old_int = std::signal(SIGINT, on_signal);
  auto old_term = std::signal(SIGTERM, on_signal);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done) {
      if (g_interrupted) {
        server.stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
  });
  server.listen_after_bind();
  done = true;
  watcher.join();
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  out << "stopped\n";
  return kExitOk;
}

}  // namespace

json load_input(const std::string& arg, const char* fixture_kind) {
  fs::path p(arg);
  if (!fs::exists(p)) {
    const fs::path fixture = fixture_path(std::string(fixture_kind) + "/" + p.stem().string() + ".json");
    if (!fs::exists(fixture)) throw Error(ErrorKind::Io, "no such file or fixture: " + arg, fixture_kind);
    p = fixture;
  }
  try {
    return json::parse(read_file(p));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, p.string() + ": malformed JSON (" + e.what() + ")", fixture_kind);
  }
}

void validate_summary(const json& doc) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::Schema, "summary: " + what, "summary");
  };
  if (!doc.is_object() || doc.value("format", "") != "explorer-batch-summary") fail("bad format tag");
  for (const char* key : {"levels", "seed", "expansions", "composite_minima", "no_path_expansions"}) {
    if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<long long>() < 0) {
      fail(std::string(key) + " must be a count");
    }
  }
  for (const char* key : {"scene", "policy"}) {
    if (!doc.contains(key) || !doc[key].is_string()) fail(std::string(key) + " must be a string");
  }
  if (!doc.contains("budget") || !doc["budget"].is_object()) fail("budget must be an object");
  if (!doc.contains("per_level") || !doc["per_level"].is_array() ||
      doc["per_level"].size() != doc["levels"].get<std::size_t>()) {
    fail("per_level must list every level");
  }
  for (const auto& lv : doc["per_level"]) {
    if (!lv.is_object() || !lv.contains("minima") || !lv["minima"].is_array() ||
        lv.value("count", std::size_t{0}) != lv["minima"].size()) {
      fail("per_level entry is inconsistent");
    }
    for (const auto& m : lv["minima"]) {
      if (!m.contains("id") || !m.contains("cost") || !m["cost"].is_number()) fail("minimum entry lacks id or cost");
    }
  }
  if (doc["per_level"].back()["count"] != doc["composite_minima"]) fail("composite_minima disagrees with per_level");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-robot local-minima explorer"};
  app.require_subcommand(1);

  BatchConfig batch;
  auto* b = app.add_subcommand("batch", "Run an automated exploration and write its results");
  b->add_option("--scene", batch.scene, "Scene file or fixture name")->required();
  b->add_option("--bundle", batch.bundle, "Bundle file or fixture name; one level when absent");
  b->add_option("--params", batch.params, "Parameter overrides, JSON file or inline");
  b->add_option("--seed", batch.seed, "Random seed");
  auto* samples = b->add_option("--samples", batch.samples, "Samples per expansion (default 2000)")
                      ->check(CLI::PositiveNumber);
  b->add_option("--budget-seconds", batch.seconds, "Seconds per expansion")
      ->check(CLI::PositiveNumber)
      ->excludes(samples);
  b->add_option("--policy", batch.policy, "breadth_first or best_first")
      ->check(CLI::IsMember({"breadth_first", "best_first"}));
  b->add_option("--max-nodes", batch.max_nodes, "Expansion cap")->check(CLI::PositiveNumber);
  b->add_option("--out", batch.out, "Output directory")->required();

  OracleConfig oracle;
  auto* o = app.add_subcommand("oracle", "Enumerate minima by multi-start optimization");
  o->add_option("--scene", oracle.scene, "Scene file or fixture name")->required();
  o->add_option("--bundle", oracle.bundle, "Bundle file or fixture name");
  o->add_option("--params", oracle.params, "Parameter overrides, JSON file or inline");
  o->add_option("--level", oracle.level, "Bundle level (default: top)")->check(CLI::PositiveNumber);
  o->add_option("--seed", oracle.seed, "Random seed");
  o->add_option("--starts", oracle.starts, "Random starts")->check(CLI::PositiveNumber);
  o->add_option("--via", oracle.via, "Via points per start")->check(CLI::NonNegativeNumber);
  o->add_option("--out", oracle.out, "Output directory");
  o->add_option("--compare", oracle.compare, "Batch output directory to cross-check");

  ServeConfig serve;
  auto* s = app.add_subcommand("serve", "Serve the HTTP API");
  s->add_option("--port", serve.port, "Port, 0 picks a free one")->check(CLI::Range(0, 65535));
  s->add_option("--host", serve.host, "Bind address");
  s->add_option("--data-dir", serve.data_dir, "Session directory (default $EXPLORER_DATA_DIR or ./explorer-data)");
  s->add_option("--static-dir", serve.static_dir, "UI assets to serve under /");
  s->add_option("--scene", serve.scene, "Preload a session for this scene");
  s->add_option("--bundle", serve.bundle, "Bundle for the preloaded session");
  s->add_option("--params", serve.params, "Parameter overrides for the preloaded session");
  s->add_option("--seed", serve.seed, "Seed for the preloaded session");
  s->add_option("--animation-steps", serve.animation_steps, "Time steps per minimum trajectory")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << "Run with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (b->parsed()) return cmd_batch(batch, out);
    if (o->parsed()) return cmd_oracle(oracle, out, err);
    return cmd_serve(serve, out, err);
  } catch (const Error& e) {
    err << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_for(e);
  } catch (const json::exception& e) {
    err << "SchemaError: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace explorer
