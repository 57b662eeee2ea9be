#include <doctest.h>

#include "hrc/mdp.hpp"
#include "support.hpp"

using namespace hrc;

namespace {

Mdp random_mdp(Rng& rng, int S, int A, double discount) {
  Mdp m;
  m.num_states = S;
  m.num_actions = A;
  m.discount = discount;
  m.terminal.assign(static_cast<std::size_t>(S), false);
  m.terminal[static_cast<std::size_t>(S - 1)] = true;
  m.transitions.resize(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      m.transitions[static_cast<std::size_t>(s)].push_back(
          m.is_terminal(s) ? SparseRow{{s, 1.0}} : test::to_sparse(test::random_simplex(rng, S, 0.4)));
  return m;
}

// Policy evaluation by repeated Bellman expectation backups; a terminal
// state is worth its own reward.
std::vector<double> iterate_policy(const Mdp& m, const std::vector<int>& pi, const std::vector<double>& r) {
  std::vector<double> v(static_cast<std::size_t>(m.num_states), 0.0), next = v;
  for (int it = 0; it < 5000; ++it) {
    for (int s = 0; s < m.num_states; ++s) {
      if (m.is_terminal(s)) {
        next[static_cast<std::size_t>(s)] = r[static_cast<std::size_t>(s)];
        continue;
      }
      double f = 0.0;
      for (auto [t, p] : m.row(s, pi[static_cast<std::size_t>(s)])) f += p * v[static_cast<std::size_t>(t)];
      next[static_cast<std::size_t>(s)] = r[static_cast<std::size_t>(s)] + m.discount * f;
    }
    v.swap(next);
  }
  return v;
}

// The two-state chain: state 0 stays with probability 1/2, state 1 absorbs.
Mdp two_state() {
  Mdp m;
  m.num_states = 2;
  m.num_actions = 1;
  m.discount = 0.5;
  m.terminal = {false, true};
  m.transitions = {{{{0, 0.5}, {1, 0.5}}}, {{{1, 1.0}}}};
  return m;
}

}  // namespace

TEST_SUITE("mdp") {

TEST_CASE("feature expectations of the two-state cycle are 4/3 and 2/3") {
  Mdp m;
  m.num_states = 2;
  m.num_actions = 1;
  m.discount = 0.5;
  m.terminal = {false, false};
  m.transitions = {{{{1, 1.0}}}, {{{0, 1.0}}}};
  const auto mu = feature_expectations(m, {0, 0}, indicator_features(2), {1.0, 0.0});
  CHECK(mu[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(mu[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("a non-terminal self-loop accumulates the geometric series") {
  Mdp m;
  m.num_states = 1;
  m.num_actions = 1;
  m.discount = 0.9;
  m.terminal = {false};
  m.transitions = {{{{0, 1.0}}}};
  CHECK(feature_expectations(m, {0}, indicator_features(1), {1.0})[0] == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("terminal states are counted once on arrival") {
  const auto m = two_state();
  const auto mu = feature_expectations(m, {0, 0}, indicator_features(2), {1.0, 0.0});
  // μ0 = 1 + 0.25 μ0, μ1 = 0.25 μ0.
  CHECK(mu[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(mu[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("Monte Carlo feature expectations agree with the exact solve") {
  Rng rng(42);
  const auto m = random_mdp(rng, 6, 2, 0.9);
  std::vector<int> pi{0, 1, 1, 0, 1, 0};
  const auto phi = indicator_features(6);
  const auto start = test::random_simplex(rng, 6);
  const auto exact = feature_expectations(m, pi, phi, start);
  const auto mc = feature_expectations_mc(m, pi, phi, start, 20000, 7);
  for (int i = 0; i < 6; ++i) {
    const auto k = static_cast<std::size_t>(i);
    CHECK(std::abs(mc.mean[k] - exact[k]) <= 4.0 * mc.stderr_[k] + 1e-9);
  }
}

TEST_CASE("empirical feature expectations discount each visit") {
  const auto phi = indicator_features(3);
  const auto mu = empirical_feature_expectations({{0, 1, 2}, {0, 2}}, phi, 0.5);
  // (1 + 1) / 2, 0.5 / 2, (0.25 + 0.5) / 2
  CHECK(mu[0] == doctest::Approx(1.0));
  CHECK(mu[1] == doctest::Approx(0.25));
  CHECK(mu[2] == doctest::Approx(0.375));
  const auto stay = empirical_feature_expectations({{0, 0, 0}}, phi, 0.5);
  CHECK(stay[0] == doctest::Approx(1.75));
}

TEST_CASE("exact and empirical expectations coincide on a deterministic chain") {
  Mdp m;
  m.num_states = 3;
  m.num_actions = 1;
  m.discount = 0.8;
  m.terminal = {false, false, true};
  m.transitions = {{{{1, 1.0}}}, {{{2, 1.0}}}, {{{2, 1.0}}}};
  const auto phi = indicator_features(3);
  const auto exact = feature_expectations(m, {0, 0, 0}, phi, {1.0, 0.0, 0.0});
  const auto emp = empirical_feature_expectations({{0, 1, 2}}, phi, 0.8);
  for (std::size_t i = 0; i < 3; ++i) CHECK(emp[i] == doctest::Approx(exact[i]).epsilon(1e-12));
}

TEST_CASE("value iteration matches exhaustive policy search") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const int S = 4, A = 3;
    const auto m = random_mdp(rng, S, A, 0.9);
    std::vector<double> r;
    for (int s = 0; s < S; ++s) r.push_back(2.0 * uniform01(rng) - 1.0);
    std::vector<double> best(S, -1e300);
    std::vector<int> pi(S, 0);
    for (int code = 0; code < 27; ++code) {
      for (int s = 0, c = code; s < 3; ++s, c /= 3) pi[static_cast<std::size_t>(s)] = c % 3;
      const auto v = iterate_policy(m, pi, r);
      for (int s = 0; s < S; ++s) best[static_cast<std::size_t>(s)] = std::max(best[static_cast<std::size_t>(s)], v[static_cast<std::size_t>(s)]);
    }
    const auto vi = value_iteration(m, r);
    CHECK(vi.residual <= 1e-8);
    const auto pv = policy_values(m, vi.policy, r);
    for (int s = 0; s < S; ++s) {
      CHECK(vi.values[static_cast<std::size_t>(s)] == doctest::Approx(best[static_cast<std::size_t>(s)]).epsilon(1e-6));
      CHECK(pv[static_cast<std::size_t>(s)] == doctest::Approx(best[static_cast<std::size_t>(s)]).epsilon(1e-6));
    }
  }
}

TEST_CASE("a terminal state is worth its reward once") {
  const auto m = two_state();
  const auto vi = value_iteration(m, {0.0, 3.0});
  CHECK(vi.values[1] == doctest::Approx(3.0));
  // V0 = 0.5 (V0 + V1) / 2 solves to V0 = V1 / 3.
  CHECK(vi.values[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(policy_values(m, vi.policy, {0.0, 3.0})[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a rewarding absorbing state two steps away is worth the discounted series") {
  Mdp m;
  m.num_states = 3;
  m.num_actions = 1;
  m.discount = 0.9;
  m.terminal = {false, false, false};
  m.transitions = {{{{1, 1.0}}}, {{{2, 1.0}}}, {{{2, 1.0}}}};
  CHECK(value_iteration(m, {0.0, 0.0, 2.0}).values[0] == doctest::Approx(0.81 * 2.0 / 0.1).epsilon(1e-7));
}

TEST_CASE("value iteration breaks ties toward the lowest action") {
  Mdp m;
  m.num_states = 2;
  m.num_actions = 3;
  m.discount = 0.9;
  m.terminal = {false, true};
  m.transitions = {{{{1, 1.0}}, {{1, 1.0}}, {{1, 1.0}}}, {{{1, 1.0}}, {{1, 1.0}}, {{1, 1.0}}}};
  CHECK(value_iteration(m, {0.0, 1.0}).policy[0] == 0);
  const ActionCosts costs{{-1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  CHECK(value_iteration(m, {0.0, 1.0}, costs).policy[0] == 1);
}

TEST_CASE("place-drill reduces to a valid MDP") {
  const auto d = place_drill::make_domain();
  const auto m = reduce_to_mdp(d, "*");
  CHECK(validate_mdp(m).empty());
  CHECK(m.num_states == 27);
  CHECK(m.num_actions == 4);
  CHECK(m.start == d.initial);
  CHECK(m.is_terminal(d.step_id("ddd")));
}

TEST_CASE("feature maps round-trip") {
  const auto phi = indicator_features(5);
  const auto back = feature_map_from_json(to_json(phi));
  CHECK(back.dimension == 5);
  CHECK(back.features == phi.features);
  CHECK(back.kind == phi.kind);
}

}  // TEST_SUITE
