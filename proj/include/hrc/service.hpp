#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrc/pipeline.hpp"

namespace hrc {

enum class SessionState { awaiting_human, awaiting_robot, terminal };
std::string_view to_string(SessionState s);

/// One live execution. The robot's action for the current step is decided
/// as soon as the step is reached; the human answers it.
struct Session {
  std::string id;
  std::string bundle_id;
  std::shared_ptr<const TrainedBundle> bundle;
  int step = 0;
  Belief belief;
  Belief prior;
  int robot_action = 0;  // alphabet id
  SessionState state = SessionState::awaiting_human;
  std::vector<TurnRecord> turns;
  std::chrono::steady_clock::time_point last_used;
  std::mutex mutex;
};

struct ServiceOptions {
  std::chrono::seconds idle_timeout{30 * 60};
  /// Clock used for idle expiry.
  std::function<std::chrono::steady_clock::time_point()> now = [] { return std::chrono::steady_clock::now(); };
};

/// JSON request/response protocol over a set of read-only bundles:
///   {"op":"create","bundle":id?,"prior":"uniform"|"offline","demos":[[label,...],...]?}
///   {"op":"act","session":id,"action":label-or-id}
///   {"op":"transcript","session":id}
/// Every response has "ok"; failures carry {"error":{"code","message"}}.
class SessionManager {
 public:
  explicit SessionManager(std::map<std::string, std::shared_ptr<const TrainedBundle>> bundles,
                          ServiceOptions options = {});

  nlohmann::json handle(const nlohmann::json& request);
  std::string handle_text(const std::string& body);

  /// Drops sessions idle for longer than the timeout; returns how many.
  std::size_t expire_idle();
  std::size_t session_count() const;

 private:
  nlohmann::json create(const nlohmann::json& request);
  nlohmann::json act(const nlohmann::json& request);
  nlohmann::json transcript(const nlohmann::json& request);
  std::shared_ptr<Session> find(const nlohmann::json& request);
  std::string new_id();

  std::map<std::string, std::shared_ptr<const TrainedBundle>> bundles_;
  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_;
};

/// HTTP transport: POST /api carries the protocol above, GET /health reports
/// the protocol version. Responses allow any origin so a browser client on
/// another port can connect.
class HttpService {
 public:
  explicit HttpService(SessionManager& manager);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds `host:port`; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop() is called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Serves until the process is stopped.
void serve_http(SessionManager& manager, const std::string& host, int port);

}  // namespace hrc
