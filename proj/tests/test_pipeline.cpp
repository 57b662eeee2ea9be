#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hrc/bundle.hpp"
#include "hrc/errors.hpp"
#include "hrc/humans.hpp"
#include "support.hpp"

using namespace hrc;
namespace fs = std::filesystem;

namespace {

struct Turn {
  int robot, human;
};

// Splits a demonstration into (robot, human) turns; a leading human action
// answers the idle robot action.
std::vector<Turn> turns_of(const TaskDomain& d, const DemoSequence& s) {
  std::vector<Turn> out;
  std::size_t i = 0;
  if (d.alphabet.is_human(s.actions[0])) {
    out.push_back({*d.idle_action, s.actions[0]});
    i = 1;
  }
  for (; i + 1 < s.actions.size(); i += 2) out.push_back({s.actions[i], s.actions[i + 1]});
  return out;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("training separates the two preference types") {
  const auto& bundle = test::place_drill_bundle();
  CHECK(bundle.k() == 2);
  const auto& corpus = test::place_drill_corpus();
  std::map<std::string, int> labels = corpus.subject_labels;
  std::vector<int> predicted, truth;
  for (const auto& [subject, seqs] : group_by_subject(corpus.demos.sequences)) {
    const auto post = infer_type_offline(bundle, seqs);
    predicted.push_back(post[1] > post[0] ? 1 : 0);
    truth.push_back(labels.at(subject));
  }
  int agree = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) agree += predicted[i] == truth[i];
  CHECK((agree == static_cast<int>(truth.size()) || agree == 0));
}

TEST_CASE("offline posterior is the cluster posterior") {
  const auto& bundle = test::place_drill_bundle();
  const auto& seqs = test::place_drill_corpus().demos.sequences;
  const std::vector<DemoSequence> user{seqs[0], seqs[1]};
  const auto a = infer_type_offline(bundle, user);
  const auto b = posterior_over_types(user, bundle.model);
  CHECK(a == b);
  CHECK_THROWS_AS(infer_type_offline(bundle, {}), Error);
}

TEST_CASE("online filtering of a user's own demonstrations concentrates the offline posterior") {
  const auto& bundle = test::place_drill_bundle();
  const auto& d = bundle.domain;
  for (const auto& [subject, seqs] : group_by_subject(test::place_drill_corpus().demos.sequences)) {
    Belief b = infer_type_offline(bundle, seqs);
    const double before = test::entropy(b);
    for (const auto& s : seqs) {
      int x = d.initial;
      for (const auto& t : turns_of(d, s)) {
        const auto rec = step_turn(d, bundle.momdp, x, b, t.robot, t.human, b);
        CHECK_FALSE(rec.belief_reset);
        b = rec.next_belief;
        x = rec.next_step;
      }
    }
    CHECK(test::entropy(b) <= before + 1e-12);
  }
}

TEST_CASE("a turn names the legal actions when the human response is invalid") {
  const auto& bundle = test::place_drill_bundle();
  const auto& d = bundle.domain;
  const int puu = d.step_id("puu");
  try {
    step_turn(d, bundle.momdp, puu, {0.5, 0.5}, place_drill::kNoOp, place_drill::place(0), {0.5, 0.5});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("place-A") != std::string::npos);
    CHECK(what.find("place-B, place-C, wait") != std::string::npos);
  }
}

TEST_CASE("episodes chain beliefs and stop at the terminal step") {
  const auto& bundle = test::place_drill_bundle();
  for (int type = 0; type < bundle.k(); ++type) {
    SimulatedHuman human(bundle.domain, type_tag(type), 3);
    const auto t = run_episode(bundle, human, uniform_belief(bundle.k()));
    REQUIRE(t.terminal);
    CHECK(bundle.domain.is_terminal(t.turns.back().next_step));
    for (std::size_t i = 1; i < t.turns.size(); ++i) {
      CHECK(t.turns[i].belief == t.turns[i - 1].next_belief);
      CHECK(t.turns[i].step == t.turns[i - 1].next_step);
    }
    for (const auto& turn : t.turns)
      CHECK(turn.robot_action == momdp_robot(bundle)(turn.step, turn.belief));
  }
}

TEST_CASE("scripted humans replay their base, skip illegal moves, and fall back") {
  const auto d = place_drill::make_domain();
  ScriptedHuman h({place_drill::place(0), place_drill::place(0), place_drill::place(1)}, place_drill::kWait);
  const std::vector<int> all{0, 1, 2, 3};
  CHECK(h.respond(0, place_drill::kNoOp, all) == place_drill::place(0));
  // The second place-A is no longer legal and is skipped.
  CHECK(h.respond(1, place_drill::kNoOp, {1, 2, 3}) == place_drill::place(1));
  CHECK(h.respond(2, place_drill::kNoOp, {2, 3}) == place_drill::kWait);
}

TEST_CASE("epsilon humans deviate only into the deviation set") {
  const std::vector<int> base{0, 1, 2};
  const std::vector<int> legal{0, 1, 2, 3};
  EpsilonHuman never(base, 0.0, 1, {0, 1, 2}, 3);
  for (int expect : base) CHECK(never.respond(0, 7, legal) == expect);
  EpsilonHuman always(base, 1.0, 1, {0, 1, 2}, 3);
  for (int i = 0; i < 50; ++i) {
    const int h = always.respond(0, 7, legal);
    CHECK(h >= 0);
    CHECK(h <= 2);
  }
  EpsilonHuman a(base, 0.5, 9, {0, 1, 2}, 3), b(base, 0.5, 9, {0, 1, 2}, 3);
  for (int i = 0; i < 20; ++i) CHECK(a.respond(0, 7, legal) == b.respond(0, 7, legal));
  CHECK_THROWS_AS(EpsilonHuman(base, 1.5, 0), Error);
}

TEST_CASE("bundles round-trip with identical decisions") {
  const auto& bundle = test::place_drill_bundle();
  const auto dir = scratch("hrc_bundle_roundtrip");
  save_bundle(bundle, dir);
  const auto back = load_bundle(dir);
  CHECK(back.k() == bundle.k());
  CHECK(back.domain == bundle.domain);
  CHECK(back.demos == bundle.demos);
  CHECK(back.policy.alphas == bundle.policy.alphas);
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const int x = uniform_index(rng, bundle.momdp.num_x);
    const auto b = test::random_simplex(rng, bundle.k());
    CHECK(best_action(back.policy, x, b) == best_action(bundle.policy, x, b));
    CHECK(value_at(back.policy, x, b) == value_at(bundle.policy, x, b));
  }
  // Saving the reloaded bundle reproduces every file byte for byte.
  const auto again = scratch("hrc_bundle_roundtrip2");
  save_bundle(back, again);
  for (const auto& f : fs::directory_iterator(dir)) {
    std::ifstream x(f.path()), y(again / f.path().filename());
    std::stringstream sx, sy;
    sx << x.rdbuf();
    sy << y.rdbuf();
    CHECK_MESSAGE(sx.str() == sy.str(), f.path().filename().string());
  }
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST_CASE("tampered bundles are rejected") {
  const auto& bundle = test::place_drill_bundle();
  const auto dir = scratch("hrc_bundle_tamper");
  save_bundle(bundle, dir);
  auto j = read_json(dir / "policy.json");
  j["sweeps"] = 12345;
  write_json(dir / "policy.json", j);
  CHECK_THROWS_AS(load_bundle(dir), Error);
  fs::remove(dir / "manifest.json");
  CHECK_THROWS_AS(load_bundle(dir), Error);
  fs::remove_all(dir);
}

TEST_CASE("manifest records the protocol version and file digests") {
  const auto& bundle = test::place_drill_bundle();
  const auto dir = scratch("hrc_bundle_manifest");
  save_bundle(bundle, dir, "2026-01-01T00:00:00Z");
  const auto manifest = read_json(dir / "manifest.json");
  CHECK(manifest.at("protocol_version") == kProtocolVersion);
  CHECK(manifest.at("created") == "2026-01-01T00:00:00Z");
  for (auto& [name, digest] : manifest.at("files").items()) {
    std::ifstream in(dir / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(sha256_hex(ss.str()) == digest.get<std::string>());
  }
  fs::remove_all(dir);
}

TEST_CASE("training reports the failing stage") {
  auto demos = test::place_drill_corpus().demos;
  auto d = place_drill::make_domain();
  d.alphabet = ActionAlphabet({{0, "a", Actor::human}, {1, "b", Actor::robot}});
  CHECK_THROWS_AS(train(demos, d, {}), Error);
  TrainConfig bad;
  bad.k_min = 3;
  bad.k_max = 2;
  try {
    train(demos, place_drill::make_domain(), bad);
    FAIL("expected a stage error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("cluster:", 0) == 0);
  }
}

TEST_CASE("model files round-trip with their demonstrations") {
  const auto& bundle = test::place_drill_bundle();
  const auto [demos, model] = model_file_from_json(nlohmann::json::parse(model_file_json(bundle.demos, bundle.model).dump()));
  CHECK(demos == bundle.demos);
  CHECK(to_json(model) == to_json(bundle.model));
}

TEST_CASE("training is deterministic") {
  TrainConfig config;
  config.k_max = 3;
  config.restarts = 3;
  config.seed = 8;
  config.solver.seed = 8;
  config.solver.n_points = 200;
  const auto a = train(test::place_drill_corpus().demos, place_drill::make_domain(), config);
  const auto b = train(test::place_drill_corpus().demos, place_drill::make_domain(), config);
  CHECK(to_json(a.momdp) == to_json(b.momdp));
  CHECK(to_json(a.policy) == to_json(b.policy));
  CHECK(rewards_to_json(a.rewards) == rewards_to_json(b.rewards));
}

}  // TEST_SUITE
