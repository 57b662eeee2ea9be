#include <doctest.h>

#include "hrc/hand_finishing.hpp"
#include "hrc/solver.hpp"
#include "support.hpp"

using namespace hrc;

namespace {

// Exhaustive expectimax over actions and (x', o) outcomes; terminal steps are worth 0.
double expectimax(const Momdp& m, int x, const Belief& b, int depth) {
  if (m.is_terminal(x) || depth == 0) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < m.num_actions; ++a) {
    double q = 0.0;
    for (int y = 0; y < m.num_y; ++y) q += b[static_cast<std::size_t>(y)] * m.r(x, y, a);
    for (int x2 = 0; x2 < m.num_x; ++x2)
      for (int o = 0; o < m.num_obs; ++o) {
        double p = 0.0;
        for (int y = 0; y < m.num_y; ++y) p += b[static_cast<std::size_t>(y)] * m.tx_prob(x, y, a, x2) * m.obs_prob(x2, a, y, o);
        if (p <= 0.0) continue;
        q += m.discount * p * expectimax(m, x2, belief_update(m, b, x, a, x2, o), depth - 1);
      }
    best = std::max(best, q);
  }
  return best;
}

// Single-type optimum by backward induction over the layered task.
std::vector<int> single_type_policy(const Momdp& m, int y) {
  std::vector<double> v(static_cast<std::size_t>(m.num_x), 0.0);
  std::vector<int> pi(static_cast<std::size_t>(m.num_x), 0);
  for (int x = m.num_x - 1; x >= 0; --x) {
    if (m.is_terminal(x)) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < m.num_actions; ++a) {
      double q = m.r(x, y, a);
      for (auto [t, p] : m.tx_row(x, y, a)) q += m.discount * p * v[static_cast<std::size_t>(t)];
      if (q > best) {
        best = q;
        pi[static_cast<std::size_t>(x)] = a;
      }
    }
    v[static_cast<std::size_t>(x)] = best;
  }
  return pi;
}

Momdp toy(std::uint64_t seed) {
  Rng rng(seed);
  return test::layered_momdp(rng, {1, 2, 2, 2, 2, 1}, 2, 2);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("point-based value is within 2% of expectimax on small tasks") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto m = toy(seed);
    REQUIRE(validate_momdp(m).empty());
    SolverOptions opt;
    opt.seed = seed;
    const auto pv = solve_point_based(m, opt);
    const double exact = expectimax(m, m.initial_x, m.initial_belief, 6);
    const double approx = value_at(pv, m.initial_x, m.initial_belief);
    CHECK(approx <= exact + 1e-9);
    CHECK(std::abs(approx - exact) <= 0.02 * std::abs(exact));
  }
}

TEST_CASE("corner beliefs act like the single-type optimum") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto m = toy(seed);
    const auto pv = solve_point_based(m, {});
    for (int y = 0; y < 2; ++y) {
      const auto pi = single_type_policy(m, y);
      for (int x = 0; x < m.num_x; ++x)
        if (!m.is_terminal(x)) CHECK(best_action(pv, x, one_hot(2, y)) == pi[static_cast<std::size_t>(x)]);
    }
  }
}

TEST_CASE("backups never lower the value at a belief point") {
  const auto m = toy(3);
  Rng rng(9);
  std::vector<std::pair<int, Belief>> probes;
  for (int i = 0; i < 30; ++i) probes.push_back({uniform_index(rng, m.num_x), test::random_simplex(rng, 2)});
  std::vector<double> last(probes.size(), -std::numeric_limits<double>::infinity());
  for (int sweeps = 1; sweeps <= 8; ++sweeps) {
    SolverOptions opt;
    opt.max_sweeps = sweeps;
    opt.n_points = 50;
    const auto pv = solve_point_based(m, opt);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double v = value_at(pv, probes[i].first, probes[i].second);
      CHECK(v >= last[i] - 1e-9);
      last[i] = v;
    }
  }
}

TEST_CASE("simulated returns are consistent with the value at the initial belief") {
  const auto m = toy(5);
  const auto pv = solve_point_based(m, {});
  const double v0 = value_at(pv, m.initial_x, m.initial_belief);
  Rng rng(77);
  const int episodes = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int e = 0; e < episodes; ++e) {
    const int y = sample_index(rng, m.initial_belief);
    int x = m.initial_x;
    Belief b = m.initial_belief;
    double g = 1.0, ret = 0.0;
    while (!m.is_terminal(x)) {
      const int a = best_action(pv, x, b);
      ret += g * m.r(x, y, a);
      std::vector<double> probs;
      for (auto [_, p] : m.tx_row(x, y, a)) probs.push_back(p);
      const int x2 = m.tx_row(x, y, a)[static_cast<std::size_t>(sample_index(rng, probs))].first;
      const int o = sample_index(rng, m.obs_rows[static_cast<std::size_t>(m.obs_row_id(x2, a, y))]);
      b = belief_update(m, b, x, a, x2, o);
      x = x2;
      g *= m.discount;
    }
    sum += ret;
    sum_sq += ret * ret;
  }
  const double mean = sum / episodes;
  const double se = std::sqrt((sum_sq / episodes - mean * mean) / episodes);
  CHECK(mean >= v0 - 3.0 * se);
}

TEST_CASE("permuting types permutes beliefs but not actions") {
  const auto m = toy(2);
  auto p = m;
  for (int x = 0; x < m.num_x; ++x)
    for (int a = 0; a < m.num_actions; ++a) {
      for (int y = 0; y < 2; ++y) {
        const auto src = (static_cast<std::size_t>(x) * 2 + y) * m.num_actions + a;
        const auto dst = (static_cast<std::size_t>(x) * 2 + (1 - y)) * m.num_actions + a;
        p.tx[dst] = m.tx[src];
        p.reward[dst] = m.reward[src];
        p.obs_index[(static_cast<std::size_t>(x) * m.num_actions + a) * 2 + (1 - y)] =
            m.obs_index[(static_cast<std::size_t>(x) * m.num_actions + a) * 2 + y];
      }
    }
  p.initial_belief = {m.initial_belief[1], m.initial_belief[0]};
  const auto pv = solve_point_based(m, {});
  const auto pp = solve_point_based(p, {});
  // Corners are backed up exactly by both solvers; interior points are
  // sampled from different streams, so only the approximation bound carries over.
  for (int x = 0; x < m.num_x; ++x) {
    if (m.is_terminal(x)) continue;
    for (int y = 0; y < 2; ++y) {
      CHECK(value_at(pp, x, one_hot(2, 1 - y)) == doctest::Approx(value_at(pv, x, one_hot(2, y))).epsilon(1e-9));
      CHECK(best_action(pp, x, one_hot(2, 1 - y)) == best_action(pv, x, one_hot(2, y)));
    }
  }
  const double v0 = value_at(pv, m.initial_x, m.initial_belief);
  CHECK(std::abs(value_at(pp, p.initial_x, p.initial_belief) - v0) <= 0.02 * std::abs(v0));
}

TEST_CASE("solver output is deterministic and round-trips") {
  const auto m = toy(1);
  SolverOptions opt;
  opt.seed = 12;
  const auto a = solve_point_based(m, opt);
  const auto b = solve_point_based(m, opt);
  CHECK(to_json(a) == to_json(b));
  const auto back = policy_value_from_json(nlohmann::json::parse(to_json(a).dump()));
  CHECK(back.alphas == a.alphas);
  CHECK(a.converged);
}

TEST_CASE("hand-finishing robot waits until it is confident about the hand") {
  const hand_finishing::Config c;
  const auto m = hand_finishing::make_momdp(c);
  SolverOptions opt;
  opt.n_points = 300;
  const auto pv = solve_point_based(m, opt);
  const int x0 = m.initial_x;
  CHECK(best_action(pv, x0, {0.5, 0.5}) == hand_finishing::wait);
  CHECK(best_action(pv, x0, {0.999, 0.001}) == hand_finishing::left);
  CHECK(best_action(pv, x0, {0.001, 0.999}) == hand_finishing::right);
}

}  // TEST_SUITE
