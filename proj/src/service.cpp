#include "hrc/service.hpp"

#include <cstdio>
#include <random>

#include <httplib.h>

#include "hrc/bundle.hpp"
#include "hrc/errors.hpp"
#include "hrc/random.hpp"

namespace hrc {

namespace {

nlohmann::json failure(const std::string& code, const std::string& message, nlohmann::json extra = {}) {
  nlohmann::json err{{"code", code}, {"message", message}};
  if (extra.is_object())
    for (auto& [k, v] : extra.items()) err[k] = v;
  return {{"ok", false}, {"error", std::move(err)}};
}

std::vector<std::string> labels_of(const ActionAlphabet& ab, const std::vector<int>& ids) {
  std::vector<std::string> out;
  for (int id : ids) out.push_back(ab.label(id));
  return out;
}

// Fields describing where the session stands; shared by every response.
nlohmann::json status(const Session& s) {
  const auto& d = s.bundle->domain;
  nlohmann::json j{{"ok", true},
                   {"session", s.id},
                   {"step", d.steps[static_cast<std::size_t>(s.step)]},
                   {"belief", s.belief},
                   {"state", to_string(s.state)},
                   {"terminal", s.state == SessionState::terminal},
                   {"turn", s.turns.size()}};
  if (s.state != SessionState::terminal) {
    j["robot_action"] = d.alphabet.label(s.robot_action);
    j["legal_actions"] = labels_of(d.alphabet, legal_human_actions(d, s.step, s.robot_action));
  }
  return j;
}

// Decides the robot's move at the session's current step.
void advance_robot(Session& s) {
  const auto& b = *s.bundle;
  if (b.domain.is_terminal(s.step)) {
    s.state = SessionState::terminal;
    return;
  }
  s.state = SessionState::awaiting_robot;
  s.robot_action = momdp_robot(b)(s.step, s.belief);
  s.state = SessionState::awaiting_human;
}

}  // namespace

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::awaiting_human: return "awaiting-human";
    case SessionState::awaiting_robot: return "awaiting-robot";
    case SessionState::terminal: return "terminal";
  }
  return "unknown";
}

SessionManager::SessionManager(std::map<std::string, std::shared_ptr<const TrainedBundle>> bundles,
                               ServiceOptions options)
    : bundles_(std::move(bundles)), options_(std::move(options)), salt_(std::random_device{}()) {}

std::string SessionManager::new_id() {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(derive_seed(salt_, {counter_})),
                static_cast<unsigned long long>(derive_seed(salt_, {counter_, 1})));
  ++counter_;
  return buf;
}

std::size_t SessionManager::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::size_t SessionManager::expire_idle() {
  const auto now = options_.now();
  std::lock_guard lock(mutex_);
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock session_lock(it->second->mutex, std::try_to_lock);
    if (session_lock.owns_lock() && now - it->second->last_used > options_.idle_timeout) {
      session_lock.unlock();
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::shared_ptr<Session> SessionManager::find(const nlohmann::json& request) {
  const auto id = request.at("session").get<std::string>();
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session '" + id + "'");
  return it->second;
}

nlohmann::json SessionManager::create(const nlohmann::json& req) {
  std::string bundle_id;
  if (req.contains("bundle")) {
    bundle_id = req.at("bundle").get<std::string>();
  } else if (bundles_.size() == 1) {
    bundle_id = bundles_.begin()->first;
  } else {
    throw ValidationError("request must name a bundle");
  }
  auto it = bundles_.find(bundle_id);
  if (it == bundles_.end()) throw NotFound("unknown bundle '" + bundle_id + "'");
  auto s = std::make_shared<Session>();
  s->bundle_id = bundle_id;
  s->bundle = it->second;
  const auto& b = *s->bundle;
  const auto prior = req.value("prior", std::string("uniform"));
  if (prior == "uniform") {
    s->prior = uniform_belief(b.k());
  } else if (prior == "offline") {
    std::vector<DemoSequence> demos;
    for (const auto& seq : req.at("demos"))
      demos.push_back(sequence_from_labels(b.domain.alphabet, seq.get<std::vector<std::string>>()));
    s->prior = infer_type_offline(b, demos);
  } else {
    throw ValidationError("prior must be 'uniform' or 'offline'");
  }
  s->belief = s->prior;
  s->step = b.domain.initial;
  s->last_used = options_.now();
  advance_robot(*s);
  {
    std::lock_guard lock(mutex_);
    s->id = new_id();
    sessions_[s->id] = s;
  }
  std::lock_guard session_lock(s->mutex);
  auto j = status(*s);
  j["bundle"] = bundle_id;
  j["protocol_version"] = kProtocolVersion;
  j["alphabet"] = to_json(b.domain.alphabet);
  j["task_steps"] = b.domain.steps;
  j["types"] = b.k();
  return j;
}

nlohmann::json SessionManager::act(const nlohmann::json& req) {
  auto s = find(req);
  std::lock_guard lock(s->mutex);
  s->last_used = options_.now();
  if (s->state == SessionState::terminal) return failure("session-complete", "the task has already finished");
  const auto& d = s->bundle->domain;
  const auto& a = req.at("action");
  int h = -1;
  if (a.is_number_integer()) {
    h = a.get<int>();
  } else {
    auto found = d.alphabet.find(a.get<std::string>());
    if (found) h = *found;
  }
  const auto legal = legal_human_actions(d, s->step, s->robot_action);
  if (h < 0 || h >= d.alphabet.size() || std::find(legal.begin(), legal.end(), h) == legal.end())
    return failure("invalid-action", "'" + a.dump() + "' is not a legal human action here",
                   {{"legal_actions", labels_of(d.alphabet, legal)}});
  auto turn = step_turn(d, s->bundle->momdp, s->step, s->belief, s->robot_action, h, s->prior);
  s->turns.push_back(turn);
  s->step = turn.next_step;
  s->belief = turn.next_belief;
  advance_robot(*s);
  auto j = status(*s);
  j["human_action"] = d.alphabet.label(h);
  j["belief_reset"] = turn.belief_reset;
  return j;
}

nlohmann::json SessionManager::transcript(const nlohmann::json& req) {
  auto s = find(req);
  std::lock_guard lock(s->mutex);
  s->last_used = options_.now();
  auto turns = nlohmann::json::array();
  for (const auto& t : s->turns) turns.push_back(to_json(s->bundle->domain, t));
  auto j = status(*s);
  j["turns"] = std::move(turns);
  return j;
}

nlohmann::json SessionManager::handle(const nlohmann::json& req) {
  expire_idle();
  try {
    if (!req.is_object() || !req.contains("op")) return failure("bad-request", "request must be an object with 'op'");
    const auto op = req.at("op").get<std::string>();
    if (op == "create") return create(req);
    if (op == "act") return act(req);
    if (op == "transcript") return transcript(req);
    return failure("bad-request", "unknown op '" + op + "'");
  } catch (const NotFound& ex) {
    return failure("not-found", ex.what());
  } catch (const Error& ex) {
    return failure("bad-request", ex.what());
  } catch (const nlohmann::json::exception& ex) {
    return failure("bad-request", ex.what());
  }
}

std::string SessionManager::handle_text(const std::string& body) {
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& ex) {
    return failure("bad-request", ex.what()).dump();
  }
  return handle(req).dump();
}

struct HttpService::Impl {
  httplib::Server server;
};

HttpService::HttpService(SessionManager& manager) : impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "POST, GET, OPTIONS"}});
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(nlohmann::json{{"ok", true}, {"protocol_version", kProtocolVersion}}.dump(), "application/json");
  });
  server.Post("/api", [&manager](const httplib::Request& req, httplib::Response& res) {
    res.set_content(manager.handle_text(req.body), "application/json");
  });
}

HttpService::~HttpService() = default;

int HttpService::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpService::run() { impl_->server.listen_after_bind(); }

void HttpService::stop() { impl_->server.stop(); }

void serve_http(SessionManager& manager, const std::string& host, int port) {
  HttpService service(manager);
  service.bind(host, port);
  service.run();
}

}  // namespace hrc
