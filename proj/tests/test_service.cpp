#include <doctest.h>

#include <thread>

#include <httplib.h>

#include "hrc/bundle.hpp"
#include "hrc/service.hpp"
#include "support.hpp"

using namespace hrc;

namespace {

std::shared_ptr<const TrainedBundle> shared_bundle() {
  static const auto b = std::make_shared<const TrainedBundle>(test::place_drill_bundle());
  return b;
}

SessionManager manager(ServiceOptions opts = {}) { return SessionManager({{"pd", shared_bundle()}}, std::move(opts)); }

nlohmann::json act(SessionManager& m, const std::string& id, const nlohmann::json& action) {
  return m.handle({{"op", "act"}, {"session", id}, {"action", action}});
}

// First legal action in alphabet order; keeps scripted plays deterministic.
std::string first_legal(const nlohmann::json& response) { return response.at("legal_actions").at(0).get<std::string>(); }

}  // namespace

TEST_SUITE("service") {

TEST_CASE("create opens a session at the initial step with the robot's first move") {
  auto m = manager();
  const auto r = m.handle({{"op", "create"}});
  REQUIRE(r.at("ok") == true);
  const auto& b = *shared_bundle();
  CHECK(r.at("step") == b.domain.steps[static_cast<std::size_t>(b.domain.initial)]);
  CHECK(r.at("belief").get<Belief>() == uniform_belief(b.k()));
  CHECK(r.at("state") == "awaiting-human");
  CHECK(r.at("terminal") == false);
  CHECK(r.at("turn") == 0);
  CHECK(r.at("types") == b.k());
  CHECK(r.at("protocol_version") == kProtocolVersion);
  CHECK(r.at("robot_action") == b.domain.alphabet.label(momdp_robot(b)(b.domain.initial, uniform_belief(b.k()))));
  CHECK(m.session_count() == 1);
}

TEST_CASE("every number the service returns is reproduced by the pipeline") {
  auto m = manager();
  const auto& b = *shared_bundle();
  auto r = m.handle({{"op", "create"}});
  const auto id = r.at("session").get<std::string>();
  int x = b.domain.initial;
  Belief belief = uniform_belief(b.k());
  while (!r.at("terminal").get<bool>()) {
    const int robot = momdp_robot(b)(x, belief);
    CHECK(r.at("robot_action") == b.domain.alphabet.label(robot));
    const auto human = first_legal(r);
    const auto t = step_turn(b.domain, b.momdp, x, belief, robot, b.domain.alphabet.id_of(human), uniform_belief(b.k()));
    r = act(m, id, human);
    REQUIRE(r.at("ok") == true);
    x = t.next_step;
    belief = t.next_belief;
    CHECK(r.at("step") == b.domain.steps[static_cast<std::size_t>(x)]);
    CHECK(r.at("belief").get<Belief>() == belief);
  }
  CHECK(r.at("state") == "terminal");
  CHECK_FALSE(r.contains("robot_action"));
  const auto again = act(m, id, "wait");
  CHECK(again.at("ok") == false);
  CHECK(again.at("error").at("code") == "session-complete");
}

TEST_CASE("interleaved sessions produce the same transcripts as isolated ones") {
  auto play = [](SessionManager& m, const std::string& id, int turn) {
    const auto t = m.handle({{"op", "transcript"}, {"session", id}});
    if (t.at("terminal").get<bool>()) return;
    // Alternate between the first and last legal action to vary the paths.
    const auto& legal = t.at("legal_actions");
    act(m, id, turn % 2 == 0 ? legal.front() : legal.back());
  };
  auto alone = manager();
  const auto a = alone.handle({{"op", "create"}}).at("session").get<std::string>();
  for (int i = 0; i < 12; ++i) play(alone, a, i);
  const auto b_alone = alone.handle({{"op", "create"}}).at("session").get<std::string>();
  for (int i = 0; i < 12; ++i) play(alone, b_alone, i + 1);

  auto shared = manager();
  const auto s1 = shared.handle({{"op", "create"}}).at("session").get<std::string>();
  const auto s2 = shared.handle({{"op", "create"}}).at("session").get<std::string>();
  for (int i = 0; i < 12; ++i) {
    play(shared, s2, i + 1);
    play(shared, s1, i);
  }
  CHECK(alone.handle({{"op", "transcript"}, {"session", a}}).at("turns") ==
        shared.handle({{"op", "transcript"}, {"session", s1}}).at("turns"));
  CHECK(alone.handle({{"op", "transcript"}, {"session", b_alone}}).at("turns") ==
        shared.handle({{"op", "transcript"}, {"session", s2}}).at("turns"));
  CHECK(s1 != s2);
}

TEST_CASE("concurrent sessions on threads stay isolated") {
  auto m = manager();
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) ids.push_back(m.handle({{"op", "create"}}).at("session").get<std::string>());
  std::vector<std::thread> workers;
  for (const auto& id : ids)
    workers.emplace_back([&m, id] {
      for (int t = 0; t < 12; ++t) {
        const auto s = m.handle({{"op", "transcript"}, {"session", id}});
        if (s.at("terminal").get<bool>()) break;
        act(m, id, first_legal(s));
      }
    });
  for (auto& w : workers) w.join();
  const auto reference = m.handle({{"op", "transcript"}, {"session", ids[0]}}).at("turns");
  for (const auto& id : ids) CHECK(m.handle({{"op", "transcript"}, {"session", id}}).at("turns") == reference);
}

TEST_CASE("invalid actions are rejected with the legal set and leave the session unchanged") {
  auto m = manager();
  const auto r = m.handle({{"op", "create"}});
  const auto id = r.at("session").get<std::string>();
  const auto first = act(m, id, first_legal(r));
  REQUIRE(first.at("ok") == true);
  // The screw placed on the first turn cannot be placed again.
  const auto& placed = r.at("legal_actions").at(0);
  const auto bad = act(m, id, placed);
  CHECK(bad.at("ok") == false);
  CHECK(bad.at("error").at("code") == "invalid-action");
  CHECK(bad.at("error").at("legal_actions") == first.at("legal_actions"));
  CHECK(act(m, id, "drill-A").at("error").at("code") == "invalid-action");
  CHECK(act(m, id, "unknown").at("error").at("code") == "invalid-action");
  CHECK(act(m, id, 99).at("error").at("code") == "invalid-action");
  const auto t = m.handle({{"op", "transcript"}, {"session", id}});
  CHECK(t.at("turn") == 1);
  CHECK(t.at("belief") == first.at("belief"));
}

TEST_CASE("actions may be given by id") {
  auto m = manager();
  const auto r = m.handle({{"op", "create"}});
  const auto id = r.at("session").get<std::string>();
  const int h = shared_bundle()->domain.alphabet.id_of(first_legal(r));
  CHECK(act(m, id, h).at("human_action") == first_legal(r));
}

TEST_CASE("offline priors come from the submitted demonstrations") {
  auto m = manager();
  const auto& b = *shared_bundle();
  const auto& seq = test::place_drill_corpus().demos.sequences.front();
  const auto labels = sequence_labels(b.domain.alphabet, seq);
  const auto r = m.handle({{"op", "create"}, {"prior", "offline"}, {"demos", {labels}}});
  REQUIRE(r.at("ok") == true);
  CHECK(r.at("belief").get<Belief>() == infer_type_offline(b, {seq}));
}

TEST_CASE("malformed requests get error codes") {
  auto m = manager();
  CHECK(nlohmann::json::parse(m.handle_text("{not json")).at("error").at("code") == "bad-request");
  CHECK(m.handle({{"op", "fly"}}).at("error").at("code") == "bad-request");
  CHECK(m.handle(nlohmann::json::array()).at("error").at("code") == "bad-request");
  CHECK(m.handle({{"op", "act"}, {"session", "nope"}, {"action", "wait"}}).at("error").at("code") == "not-found");
  CHECK(m.handle({{"op", "create"}, {"bundle", "other"}}).at("error").at("code") == "not-found");
  CHECK(m.handle({{"op", "create"}, {"prior", "psychic"}}).at("error").at("code") == "bad-request");
  CHECK(m.handle({{"op", "transcript"}}).at("error").at("code") == "bad-request");
}

TEST_CASE("idle sessions expire") {
  auto now = std::chrono::steady_clock::time_point{};
  ServiceOptions opts;
  opts.idle_timeout = std::chrono::seconds(60);
  opts.now = [&now] { return now; };
  auto m = manager(opts);
  const auto keep = m.handle({{"op", "create"}}).at("session").get<std::string>();
  const auto drop = m.handle({{"op", "create"}}).at("session").get<std::string>();
  now += std::chrono::seconds(40);
  m.handle({{"op", "transcript"}, {"session", keep}});
  now += std::chrono::seconds(40);
  CHECK(m.expire_idle() == 1);
  CHECK(m.handle({{"op", "transcript"}, {"session", keep}}).at("ok") == true);
  CHECK(m.handle({{"op", "transcript"}, {"session", drop}}).at("error").at("code") == "not-found");
}

TEST_CASE("the HTTP transport returns the protocol responses verbatim") {
  auto m = manager();
  HttpService service(m);
  const int port = service.bind("127.0.0.1", 0);
  std::thread runner([&] { service.run(); });
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  const auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(nlohmann::json::parse(health->body).at("protocol_version") == kProtocolVersion);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");
  const auto created = client.Post("/api", R"({"op":"create"})", "application/json");
  REQUIRE(created);
  const auto body = nlohmann::json::parse(created->body);
  REQUIRE(body.at("ok") == true);
  const auto id = body.at("session").get<std::string>();
  const nlohmann::json req{{"op", "transcript"}, {"session", id}};
  const auto over_http = client.Post("/api", req.dump(), "application/json");
  REQUIRE(over_http);
  CHECK(over_http->body == m.handle_text(req.dump()));
  service.stop();
  runner.join();
}

}  // TEST_SUITE
