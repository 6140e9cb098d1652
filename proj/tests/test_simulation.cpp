#include <doctest.h>

#include <cmath>
#include <vector>

#include "pol/simulation.hpp"

using namespace pol;

namespace {

IncentiveParams demo(std::size_t alpha) {
  IncentiveParams p;
  p.total_cost = 1e4;
  p.reward = 2e4;
  p.kappa = 0.5;
  p.alpha = alpha;
  p.stages = 10000;
  p.competition = Competition::exponential(1.0);
  return p;
}

IncentiveParams verifier_params(double r1, std::size_t alpha = 100) {
  IncentiveParams p;
  p.total_cost = 1e4;
  p.reward = 2e4;
  p.stages = 10000;
  p.alpha = alpha;
  p.eta_flag = 0.2;
  p.r1 = r1;
  return p;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("trial seeds") {
  Seed m = Seed::from_u64(1);
  CHECK(trial_seed(m, 7) == m.derive(7));
  CHECK_FALSE(trial_seed(m, 7) == trial_seed(m, 8));
}

TEST_CASE("prover utility matches the analytic law") {
  auto p = demo(10);
  std::vector<std::size_t> grid{0, 5, 50, 2000, 10000};
  SimOptions opt;
  opt.trials = 20000;
  opt.master_seed = Seed::from_u64(44);
  auto r = simulate_prover_utility(p, grid, opt);
  REQUIRE(r.points.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double analytic = prover_utility_cheats(p, grid[i]);
    CHECK(std::abs(r.points[i].mean_utility - analytic) <= 3.5 * r.points[i].std_error + 1e-9);
  }
  std::vector<std::size_t> bad{10001};
  CHECK_THROWS(simulate_prover_utility(p, bad, opt));
}

TEST_CASE("results do not depend on the thread count") {
  auto p = demo(4);
  std::vector<std::size_t> grid{0, 100, 10000};
  SimOptions one;
  one.trials = 3000;
  SimOptions four = one;
  four.threads = 4;
  auto a = simulate_prover_utility(p, grid, one);
  auto b = simulate_prover_utility(p, grid, four);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a.points[i].mean_utility == b.points[i].mean_utility);
    CHECK(a.points[i].std_error == b.points[i].std_error);
  }
  auto vp = verifier_params(12);
  std::vector<std::size_t> mg{0, 10, 20};
  auto ga = simulate_verifier_greedy(vp, mg, one);
  auto gb = simulate_verifier_greedy(vp, mg, four);
  for (std::size_t i = 0; i < mg.size(); ++i) {
    CHECK(ga.points[i].mean_utility == gb.points[i].mean_utility);
  }
}

TEST_CASE("constant verifier") {
  auto p = verifier_params(12);
  std::vector<std::size_t> grid{0, 25, 50, 100};
  SimOptions opt;
  opt.trials = 20000;
  auto r = simulate_verifier_constant(p, grid, opt);
  CHECK(r.points[0].mean_utility == 0.0);
  CHECK(r.points[0].std_error == 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double expect = 1.2 * double(grid[i]);  // (0.2*12 - 1 - 0.2) alpha'
    CHECK(std::abs(r.points[i].mean_utility - expect) <= 4 * r.points[i].std_error);
  }
  CHECK(r.points[find_optimal(r)].grid_value == 100.0);

  std::vector<std::size_t> over{150};
  CHECK_THROWS(simulate_verifier_constant(p, over, opt));
  opt.allow_exceed_alpha = true;
  CHECK_NOTHROW(simulate_verifier_constant(p, over, opt));
}

TEST_CASE("greedy verifier") {
  auto p = verifier_params(12);
  std::vector<std::size_t> grid{0, 5, 20};
  SimOptions opt;
  opt.trials = 5000;
  auto r = simulate_verifier_greedy(p, grid, opt);
  CHECK(r.points[0].mean_utility == 0.0);
  CHECK(r.points[0].mean_alpha_prime == 0.0);
  // Waiting for 5 flags takes about 5 / 0.2 = 25 stages.
  CHECK(r.points[1].mean_alpha_prime == doctest::Approx(25.0).epsilon(0.05));
  CHECK(r.points[2].mean_alpha_prime <= 100.0);
  CHECK(r.points[2].alpha_prime_histogram.size() == 101);
  std::vector<std::size_t> bad{2001};
  CHECK_THROWS(simulate_verifier_greedy(p, bad, opt));
}

TEST_CASE("honest verifier dominates lazier constant policies") {
  auto p = verifier_params(12);
  SimOptions opt;
  opt.trials = 100000;
  auto honest = evaluate_verifier_policy(p, HonestVerifier{}, opt);
  for (std::size_t a : {0u, 50u, 99u}) {
    auto lazy = evaluate_verifier_policy(p, ConstantVerifier{a}, opt);
    double se = std::hypot(honest.std_error, lazy.std_error);
    CHECK(honest.mean_utility - lazy.mean_utility > 3 * se);
  }
}

TEST_CASE("detection_rate") {
  auto r = detection_rate(1, 100, 10, 1.0, 10000, Seed::from_u64(5));
  CHECK(r.analytic == doctest::Approx(0.1));
  CHECK(std::abs(r.empirical - 0.1) < 0.02);
  CHECK(detection_rate(0, 100, 10, 1.0, 500, Seed::from_u64(5)).empirical == 0.0);
  CHECK(detection_rate(10, 10, 1, 1.0, 500, Seed::from_u64(5)).empirical == 1.0);

  for (std::size_t d : {3u, 20u, 60u}) {
    for (double kappa : {0.5, 1.0}) {
      auto x = detection_rate(d, 100, 10, kappa, 4000, Seed::from_u64(d));
      CHECK(x.abs_error <= 3 * x.std_error + 1e-12);
    }
  }
}

TEST_CASE("find_optimal") {
  SimReport one{"x", {{3.0, 1, 5.0}}};
  CHECK(find_optimal(one) == 0);
  SimReport peak{"x", {{1, 1, 1.0}, {2, 1, 4.0}, {3, 1, 9.0}, {4, 1, 2.0}}};
  CHECK(find_optimal(peak) == 2);
  SimReport tie{"x", {{1, 1, 3.0}, {2, 1, 7.0}, {3, 1, 7.0}}};
  CHECK(find_optimal(tie) == 1);
  CHECK_THROWS(find_optimal(SimReport{}));
}

TEST_CASE("population and dilemma") {
  PopulationModel pop{0.3, {1.0, 1.0}};
  CHECK_NOTHROW(pop.validate(10));
  RandomStream r(Seed::from_u64(1));
  int dishonest = 0;
  for (int i = 0; i < 10000; ++i) dishonest += pop.sample_cheats(r) > 0;
  CHECK(std::abs(dishonest / 10000.0 - 0.3) < 0.02);
  CHECK_THROWS(PopulationModel{1.5, {1.0}}.validate(10));

  IncentiveParams p;
  p.total_cost = 100;
  p.reward = 200;
  p.stages = 100;
  p.alpha = 10;
  SimOptions opt;
  opt.trials = 20000;
  // Lazy wins below the epsilon threshold M/(T (v+ - v0)) = 0.1 for one-stage verification;
  // with alpha = 10 stages it costs 10, so honesty needs a large dishonest share.
  auto low = simulate_dilemma(PopulationModel{0.01, {1.0}}, 10.0, 0.0, p, opt);
  CHECK(low.lazy_utility > low.honest_utility);
}

}  // TEST_SUITE
