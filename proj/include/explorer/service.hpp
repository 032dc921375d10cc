#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "explorer/explorer.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace explorer {

struct ServiceOptions {
  /// Session documents go here; empty disables persistence.
  std::filesystem::path data_dir;
  /// Time steps in a minimum's animation payload.
  std::size_t animation_steps = 200;
  /// Served under / when set.
  std::filesystem::path static_dir;
};

/// EXPLORER_DATA_DIR when set, otherwise `fallback`.
std::filesystem::path data_dir_from_env(const std::filesystem::path& fallback);

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// Sessions behind a JSON API. Every method is safe to call from several
/// threads; expansions of one session are serialized and readers see the
/// last committed state.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// {scene: doc | fixture name, bundle: doc | fixture name | null,
  /// params: {...}, seed: n}. Without a bundle the session has one level.
  ApiResponse create_session(const nlohmann::json& request);
  /// {node_id, budget: {samples: n} | {seconds: s}, async: bool}. Async
  /// requests answer 202 and finish in the background.
  ApiResponse expand(const std::string& id, const nlohmann::json& request);
  ApiResponse tree(const std::string& id);
  ApiResponse scene(const std::string& id);
  ApiResponse status(const std::string& id);
  ApiResponse minimum(const std::string& id, const std::string& node);
  ApiResponse roadmap(const std::string& id, const std::string& level);

  /// Loads every session document in the data directory. Returns the count.
  std::size_t restore();
  std::vector<std::string> session_ids() const;
  /// Blocks until the session has no expansion in flight.
  void wait_idle(const std::string& id);

  /// Registers the routes on `server`.
  void mount(httplib::Server& server);

 private:
  struct Handle;

  std::shared_ptr<Handle> find(const std::string& id) const;
  std::string add(Session session);
  void persist(Handle& h);

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Handle>> sessions_;
  long next_id_ = 1;
};

/// Per-robot workspace poses along a path at `steps + 1` uniform times.
nlohmann::json trajectory_json(const CompositeSpace& space, const Path& path, std::size_t steps);

}  // namespace explorer
