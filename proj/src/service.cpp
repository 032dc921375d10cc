#include "explorer/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <thread>

#include "explorer/error.hpp"
#include "explorer/io.hpp"
#include "explorer/path.hpp"

namespace explorer {

namespace fs = std::filesystem;
using nlohmann::json;

struct Service::Handle {
  explicit Handle(Session s) : session(std::move(s)) {}

  std::string id;
  std::mutex run_mutex;  // held for the whole expansion
  Session session;

  mutable std::mutex view_mutex;  // guards the committed views below
  MinimaTree tree;
  json snapshot;
  json scene;
  std::vector<json> roadmaps;
  long iteration = 0;
  json last_report;
  json last_error;

  std::atomic<bool> busy{false};
  std::atomic<long> progress{0};
  json budget;
  std::thread worker;
  std::condition_variable idle;

  void init_views() {
    scene = {{"scene", scene_to_json(session.scene())},
             {"bundle", session.bundle().to_json()},
             {"levels", json::array()}};
    for (int k = 1; k <= session.levels(); ++k) {
      scene["levels"].push_back(session.bundle().level(k).layout());
      roadmaps.push_back(roadmap_to_json(session.roadmap(k)));
    }
    tree = session.tree();
    snapshot = session.snapshot();
    iteration = session.iteration();
  }

  /// Copies session state into the views. Caller holds run_mutex.
  void commit(int grown_level) {
    json rm;
    if (grown_level > 0) rm = roadmap_to_json(session.roadmap(grown_level));
    std::lock_guard lock(view_mutex);
    tree = session.tree();
    snapshot = session.snapshot();
    iteration = session.iteration();
    if (grown_level > 0) roadmaps[static_cast<std::size_t>(grown_level - 1)] = std::move(rm);
  }
};

namespace {

ApiResponse error_response(int status, std::string code, std::string message, std::string detail) {
  return {status, {{"code", std::move(code)}, {"message", std::move(message)}, {"detail", std::move(detail)}}};
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NodeUnknown: return 404;
    case ErrorKind::LevelExhausted: return 422;
    case ErrorKind::Io: return 500;
    default: return 400;
  }
}

ApiResponse from_error(const Error& e) {
  return error_response(status_for(e.kind()), to_string(e.kind()), e.what(), e.field());
}

ApiResponse session_unknown(const std::string& id) {
  return error_response(404, "SessionUnknown", "no session '" + id + "'", "id");
}

/// A document, or a fixture name resolved under `dir`.
json resolve_doc(const json& v, const char* dir, const char* field) {
  if (!v.is_string()) return v;
  const std::string name = v.get<std::string>();
  if (name.empty() || name.find('/') != std::string::npos || name.find("..") != std::string::npos) {
    throw Error(ErrorKind::Validation, std::string(field) + ": bad fixture name '" + name + "'", field);
  }
  const fs::path p = fixture_path(std::string(dir) + "/" + name + ".json");
  if (!fs::exists(p)) {
    throw Error(ErrorKind::Validation, std::string(field) + ": no fixture '" + name + "'", field);
  }
  try {
    return json::parse(read_file(p));
  } catch (const json::parse_error&) {
    throw Error(ErrorKind::Schema, std::string(field) + ": fixture is not JSON", field);
  }
}

bool parse_index(const std::string& s, long& out) {
  if (s.empty() || s.size() > 18) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  out = std::stol(s);
  return true;
}

Ptc parse_budget(const json& b) {
  if (!b.is_object()) throw Error(ErrorKind::Schema, "budget: expected an object", "budget");
  const bool has_samples = b.contains("samples");
  const bool has_seconds = b.contains("seconds");
  if (has_samples == has_seconds) {
    throw Error(ErrorKind::Schema, "budget: give exactly one of samples or seconds", "budget");
  }
  if (has_samples) {
    if (!b["samples"].is_number_integer() || b["samples"].get<long>() <= 0) {
      throw Error(ErrorKind::Validation, "budget.samples must be a positive integer", "budget.samples");
    }
    return Ptc::sample_budget(b["samples"].get<long>());
  }
  if (!b["seconds"].is_number() || !(b["seconds"].get<double>() > 0.0)) {
    throw Error(ErrorKind::Validation, "budget.seconds must be positive", "budget.seconds");
  }
  return Ptc::time_budget(b["seconds"].get<double>());
}

}  // namespace

fs::path data_dir_from_env(const fs::path& fallback) {
  if (const char* d = std::getenv("EXPLORER_DATA_DIR"); d != nullptr && *d != '\0') return d;
  return fallback;
}

json trajectory_json(const CompositeSpace& space, const Path& path, std::size_t steps) {
  if (steps < 1) steps = 1;
  const auto points = resample(space, path, steps + 1);
  json times = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    times.push_back(static_cast<double>(i) / static_cast<double>(points.size() - 1));
  }
  json robots = json::array();
  const auto comps = space.components();
  for (std::size_t c = 0; c < comps.size(); ++c) {
    json poses = json::array();
    for (const auto& x : points) {
      const auto [p, heading] = comps[c].workspace_pose(space.block(x, c));
      poses.push_back({p.x, p.y, heading});
    }
    robots.push_back({{"name", space.scene().robots[static_cast<std::size_t>(comps[c].robot)].name},
                      {"shape", shape_to_json(comps[c].shape)},
                      {"poses", std::move(poses)}});
  }
  return {{"times", std::move(times)}, {"robots", std::move(robots)}};
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {}

Service::~Service() {
  std::vector<std::shared_ptr<Handle>> all;
  {
    std::lock_guard lock(mutex_);
    for (auto& [id, h] : sessions_) all.push_back(h);
  }
  for (auto& h : all) {
    if (h->worker.joinable()) h->worker.join();
  }
}

std::shared_ptr<Service::Handle> Service::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::string Service::add(Session session) {
  auto h = std::make_shared<Handle>(std::move(session));
  h->init_views();
  std::lock_guard lock(mutex_);
  while (sessions_.count("s" + std::to_string(next_id_)) != 0) ++next_id_;
  h->id = "s" + std::to_string(next_id_++);
  sessions_[h->id] = h;
  return h->id;
}

void Service::persist(Handle& h) {
  if (options_.data_dir.empty()) return;
  write_file(options_.data_dir / (h.id + ".json"), h.session.save().dump());
}

ApiResponse Service::create_session(const json& request) {
  try {
    if (!request.is_object()) throw Error(ErrorKind::Schema, "request: expected an object", "request");
    if (!request.contains("scene")) throw Error(ErrorKind::Schema, "missing 'scene'", "scene");
    const json scene = resolve_doc(request["scene"], "scenes", "scene");
    json bundle = nullptr;
    if (request.contains("bundle") && !request["bundle"].is_null()) {
      bundle = resolve_doc(request["bundle"], "bundles", "bundle");
    }
    std::uint64_t seed = 0;
    if (request.contains("seed")) {
      if (!request["seed"].is_number_integer() || request["seed"].get<long long>() < 0) {
        throw Error(ErrorKind::Schema, "seed: expected an unsigned integer", "seed");
      }
      seed = request["seed"].get<std::uint64_t>();
    }
    const ExplorerParams params = ExplorerParams::from_json(request.value("params", json(nullptr)));
    const std::string id = add(new_session(scene, bundle, params, seed));
    auto h = find(id);
    {
      std::lock_guard run(h->run_mutex);
      persist(*h);
    }
    return {201, {{"id", id}, {"snapshot", h->snapshot}}};
  } catch (const Error& e) {
    return from_error(e);
  } catch (const json::exception& e) {
    return error_response(400, "SchemaError", e.what(), "");
  }
}

ApiResponse Service::expand(const std::string& id, const json& request) {
  auto h = find(id);
  if (!h) return session_unknown(id);
  Ptc ptc;
  NodeId node = 0;
  bool async = false;
  try {
    if (!request.is_object() || !request.contains("node_id") ||
        !request["node_id"].is_number_integer() || request["node_id"].get<long long>() < 0) {
      throw Error(ErrorKind::Schema, "node_id: expected a node id", "node_id");
    }
    node = request["node_id"].get<NodeId>();
    ptc = parse_budget(request.value("budget", json(nullptr)));
    if (request.contains("async")) {
      if (!request["async"].is_boolean()) throw Error(ErrorKind::Schema, "async: expected a boolean", "async");
      async = request["async"].get<bool>();
    }
    std::lock_guard lock(h->view_mutex);
    if (!h->tree.contains(node)) {
      throw Error(ErrorKind::NodeUnknown, "no node " + std::to_string(node), "node_id");
    }
    if (h->tree.node(node).level >= h->session.levels()) {
      throw Error(ErrorKind::LevelExhausted,
                  "node " + std::to_string(node) + " is on the top level; nothing above to grow",
                  "node_id");
    }
  } catch (const Error& e) {
    return from_error(e);
  }

  if (h->busy.exchange(true)) {
    return error_response(409, "Busy", "an expansion is already running on this session", "id");
  }
  if (h->worker.joinable()) h->worker.join();
  {
    std::lock_guard lock(h->view_mutex);
    h->budget = request["budget"];
    h->last_error = nullptr;
  }
  h->progress = 0;

  // Runs with busy set; clears it on the way out.
  auto run = [this, h, node, ptc]() -> ApiResponse {
    ApiResponse out;
    {
      std::lock_guard run_lock(h->run_mutex);
      try {
        const ExpansionReport report = h->session.expand(node, ptc, nullptr, &h->progress);
        h->commit(report.level);
        persist(*h);
        json r = report.to_json();
        std::lock_guard lock(h->view_mutex);
        h->last_report = r;
        out = {200, {{"report", r}, {"snapshot", h->snapshot}}};
      } catch (const Error& e) {
        out = from_error(e);
        std::lock_guard lock(h->view_mutex);
        h->last_error = out.body;
      }
    }
    {
      std::lock_guard lock(h->view_mutex);
      h->busy = false;
    }
    h->idle.notify_all();
    return out;
  };

  if (!async) return run();
  h->worker = std::thread([run] { run(); });
  return {202, {{"state", "expanding"}, {"node_id", node}}};
}

ApiResponse Service::tree(const std::string& id) {
  auto h = find(id);
  if (!h) return session_unknown(id);
  std::lock_guard lock(h->view_mutex);
  return {200, h->snapshot};
}

ApiResponse Service::scene(const std::string& id) {
  auto h = find(id);
  if (!h) return session_unknown(id);
  std::lock_guard lock(h->view_mutex);
  return {200, h->scene};
}

ApiResponse Service::status(const std::string& id) {
  auto h = find(id);
  if (!h) return session_unknown(id);
  std::lock_guard lock(h->view_mutex);
  json body = {{"state", h->busy ? "expanding" : "idle"},
               {"iteration", h->iteration},
               {"progress", {{"samples", h->progress.load()}, {"budget", h->budget}}},
               {"last_report", h->last_report},
               {"last_error", h->last_error}};
  return {200, body};
}

ApiResponse Service::minimum(const std::string& id, const std::string& node) {
  auto h = find(id);
  if (!h) return session_unknown(id);
  long n = 0;
  std::lock_guard lock(h->view_mutex);
  if (!parse_index(node, n) || !h->tree.contains(static_cast<NodeId>(n))) {
    return error_response(404, "NodeUnknown", "no node " + node, "node");
  }
  const MinimaNode& m = h->tree.node(static_cast<NodeId>(n));
  if (m.level == 0) return error_response(404, "NodeUnknown", "the root has no path", "node");
  const CompositeSpace& space = h->session.bundle().level(m.level);
  json body = trajectory_json(space, m.path, options_.animation_steps);
  body["node"] = m.id;
  body["level"] = m.level;
  body["cost"] = m.cost;
  body["path"] = path_to_json(m.path);
  return {200, body};
}

ApiResponse Service::roadmap(const std::string& id, const std::string& level) {
  auto h = find(id);
  if (!h) return session_unknown(id);
  long k = 0;
  std::lock_guard lock(h->view_mutex);
  if (!parse_index(level, k) || k < 1 || k > static_cast<long>(h->roadmaps.size())) {
    return error_response(404, "LevelUnknown", "no level " + level, "level");
  }
  return {200, h->roadmaps[static_cast<std::size_t>(k - 1)]};
}

std::size_t Service::restore() {
  if (options_.data_dir.empty() || !fs::is_directory(options_.data_dir)) return 0;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(options_.data_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::size_t count = 0;
  for (const auto& f : files) {
    const std::string id = f.stem().string();
    if (find(id)) continue;
    Session s = Session::load(json::parse(read_file(f)));
    auto h = std::make_shared<Handle>(std::move(s));
    h->id = id;
    h->init_views();
    std::lock_guard lock(mutex_);
    sessions_[id] = h;
    ++count;
  }
  return count;
}

std::vector<std::string> Service::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, h] : sessions_) ids.push_back(id);
  return ids;
}

void Service::wait_idle(const std::string& id) {
  auto h = find(id);
  if (!h) return;
  std::unique_lock lock(h->view_mutex);
  h->idle.wait(lock, [&] { return !h->busy.load(); });
}

void Service::mount(httplib::Server& server) {
  auto reply = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto body_of = [](const httplib::Request& req, json& out) {
    if (req.body.empty()) {
      out = json::object();
      return true;
    }
    try {
      out = json::parse(req.body);
      return true;
    } catch (const json::parse_error&) {
      return false;
    }
  };
  auto bad_json = error_response(400, "SchemaError", "request body is not JSON", "body");

  server.Post("/api/sessions", [=, this](const httplib::Request& req, httplib::Response& res) {
    json body;
    reply(res, body_of(req, body) ? create_session(body) : bad_json);
  });
  server.Post(R"(/api/sessions/([^/]+)/expand)",
              [=, this](const httplib::Request& req, httplib::Response& res) {
                json body;
                reply(res, body_of(req, body) ? expand(req.matches[1], body) : bad_json);
              });
  server.Get(R"(/api/sessions/([^/]+)/tree)", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, tree(req.matches[1]));
  });
  server.Get(R"(/api/sessions/([^/]+)/scene)", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, scene(req.matches[1]));
  });
  server.Get(R"(/api/sessions/([^/]+)/status)", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, status(req.matches[1]));
  });
  server.Get(R"(/api/sessions/([^/]+)/minima/([^/]+))",
             [=, this](const httplib::Request& req, httplib::Response& res) {
               reply(res, minimum(req.matches[1], req.matches[2]));
             });
  server.Get(R"(/api/sessions/([^/]+)/roadmaps/([^/]+))",
             [=, this](const httplib::Request& req, httplib::Response& res) {
               reply(res, roadmap(req.matches[1], req.matches[2]));
             });
  server.Get("/api/sessions", [=, this](const httplib::Request&, httplib::Response& res) {
    reply(res, {200, {{"sessions", session_ids()}}});
  });
  if (!options_.static_dir.empty()) server.set_mount_point("/", options_.static_dir.string());
}

}  // namespace explorer
