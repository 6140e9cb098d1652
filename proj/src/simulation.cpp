#include "pol/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

namespace pol {

double catch_probability(Disguise disguise) {
  return disguise == Disguise::AsFlag ? 0.5 : 1.0;
}

void PopulationModel::validate(std::size_t stages) const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (cheat_weights.size() > stages) {
    throw std::invalid_argument("cheat distribution has support beyond T");
  }
  double total = 0.0;
  for (double w : cheat_weights) {
    if (w < 0.0) throw std::invalid_argument("cheat weights must be non-negative");
    total += w;
  }
  if (epsilon > 0.0 && !(total > 0.0)) {
    throw std::invalid_argument("a dishonest population needs a cheat distribution");
  }
}

std::size_t PopulationModel::sample_cheats(RandomStream& stream) const {
  if (stream.uniform01() >= epsilon) return 0;
  double total = std::accumulate(cheat_weights.begin(), cheat_weights.end(), 0.0);
  double target = stream.uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < cheat_weights.size(); ++i) {
    acc += cheat_weights[i];
    if (target < acc) return i + 1;
  }
  return cheat_weights.size();
}

Seed trial_seed(const Seed& master, std::size_t trial) { return master.derive(trial); }

namespace {

/// Runs body(trial) for every trial; results are written by index, so the
/// outcome does not depend on the thread count.
void parallel_trials(std::size_t trials, std::size_t threads,
                     const std::function<void(std::size_t)>& body) {
  threads = std::max<std::size_t>(1, std::min(threads, trials));
  if (threads == 1) {
    for (std::size_t i = 0; i < trials; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (trials + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(trials, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct Moments {
  double mean = 0.0;
  double std_error = 0.0;
  double sd = 0.0;
};

/// Column `col` of a trials x cols matrix, summed in trial order.
Moments column_moments(const std::vector<double>& values, std::size_t trials, std::size_t cols,
                       std::size_t col) {
  Moments m;
  double sum = 0.0;
  for (std::size_t i = 0; i < trials; ++i) sum += values[i * cols + col];
  m.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
      double d = values[i * cols + col] - m.mean;
      ss += d * d;
    }
    m.sd = std::sqrt(ss / static_cast<double>(trials - 1));
    m.std_error = m.sd / std::sqrt(static_cast<double>(trials));
  }
  return m;
}

void check_trials(const SimOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("need at least one trial");
}

}  // namespace

SimReport simulate_prover_utility(const IncentiveParams& params,
                                  std::span<const std::size_t> cheat_grid,
                                  const SimOptions& options) {
  params.validate();
  check_trials(options);
  const std::size_t T = params.stages;
  const double per_stage = params.total_cost / static_cast<double>(T);
  for (auto d : cheat_grid) {
    if (d > T) throw std::invalid_argument("cheat count " + std::to_string(d) + " exceeds T");
  }
  const std::size_t cols = cheat_grid.size();
  const std::size_t trials = options.trials;

  struct PointConstants {
    double rho, win_prob, sunk_cost, extra_cost;
  };
  std::vector<PointConstants> consts;
  for (auto d : cheat_grid) {
    double rho = static_cast<double>(T - d) / static_cast<double>(T);
    double p = params.competition.winning_prob(rho);
    double mu = p < 1.0 ? sunk_cost_mu(params.competition, rho, params.total_cost) : 0.0;
    consts.push_back({rho, p, mu, options.dishonest_stage_cost * per_stage * static_cast<double>(d)});
  }

  std::vector<double> utility(trials * cols);
  std::vector<double> verified(trials * cols);  // 1 if the proof reached verification
  std::vector<double> caught(trials * cols);

  parallel_trials(trials, options.threads, [&](std::size_t trial) {
    const Seed base = trial_seed(options.master_seed, trial);
    for (std::size_t g = 0; g < cols; ++g) {
      // Common random numbers across grid points: every d uses the same stream.
      RandomStream stream(base);
      const auto& c = consts[g];
      const std::size_t d = cheat_grid[g];
      double value;
      bool won = stream.uniform01() < c.win_prob;
      bool was_caught = false;
      if (!won) {
        value = -c.sunk_cost;
      } else {
        // t_ve is a uniform alpha-subset and the cheat set a uniform d-subset;
        // drawing cheat membership of each verified stage sequentially gives
        // the same joint law.
        std::size_t cheats_left = d;
        std::size_t remaining = T;
        for (std::size_t i = 0; i < params.alpha && !was_caught; ++i) {
          bool is_cheat = stream.uniform_below(remaining) < cheats_left;
          --remaining;
          if (is_cheat) {
            --cheats_left;
            was_caught = stream.uniform01() < params.kappa;
          }
        }
        double work = c.rho * params.total_cost + c.extra_cost;
        value = was_caught ? -(params.penalty_ratio * params.reward + work) : params.reward - work;
      }
      utility[trial * cols + g] = value;
      verified[trial * cols + g] = won ? 1.0 : 0.0;
      caught[trial * cols + g] = was_caught ? 1.0 : 0.0;
    }
  });

  SimReport report{"prover", {}};
  for (std::size_t g = 0; g < cols; ++g) {
    auto m = column_moments(utility, trials, cols, g);
    double n_verified = 0.0;
    double n_caught = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
      n_verified += verified[i * cols + g];
      n_caught += caught[i * cols + g];
    }
    SimPoint p;
    p.grid_value = static_cast<double>(cheat_grid[g]);
    p.trials = trials;
    p.mean_utility = m.mean;
    p.std_error = m.std_error;
    p.detection_rate = n_verified > 0.0 ? n_caught / n_verified : 0.0;
    p.mean_alpha_prime = static_cast<double>(params.alpha);
    report.points.push_back(std::move(p));
  }
  return report;
}

namespace {

std::size_t access_cap(const IncentiveParams& params, const SimOptions& options) {
  return options.allow_exceed_alpha ? params.stages : params.alpha;
}

}  // namespace

SimReport simulate_verifier_constant(const IncentiveParams& params,
                                     std::span<const std::size_t> alpha_prime_grid,
                                     const SimOptions& options) {
  params.validate();
  check_trials(options);
  const std::size_t T = params.stages;
  const std::size_t flags = flag_slot_count(T, params.eta_flag);
  const double per_stage = params.total_cost / static_cast<double>(T);
  const std::size_t cap = access_cap(params, options);
  std::size_t max_alpha = 0;
  for (auto a : alpha_prime_grid) {
    if (a > cap) {
      throw std::invalid_argument("alpha' = " + std::to_string(a) + " exceeds the access cap " +
                                  std::to_string(cap) +
                                  (options.allow_exceed_alpha ? "" : " (protocol allows alpha' <= alpha)"));
    }
    max_alpha = std::max(max_alpha, a);
  }
  const std::size_t cols = alpha_prime_grid.size();
  const std::size_t trials = options.trials;
  std::vector<double> utility(trials * cols);
  std::vector<double> found(trials * cols);

  parallel_trials(trials, options.threads, [&](std::size_t trial) {
    RandomStream stream(trial_seed(options.master_seed, trial));
    // The verified stages' sigma values form a uniform sample without
    // replacement from {1..T}; a stage is a flag when its value <= eta T.
    DistinctSampler sampler(stream, T);
    std::vector<std::size_t> flags_in_prefix(max_alpha + 1, 0);
    for (std::size_t k = 1; k <= max_alpha; ++k) {
      flags_in_prefix[k] = flags_in_prefix[k - 1] + (sampler.next() <= flags ? 1 : 0);
    }
    for (std::size_t g = 0; g < cols; ++g) {
      std::size_t a = alpha_prime_grid[g];
      auto u = static_cast<double>(flags_in_prefix[a]);
      utility[trial * cols + g] = params.r1 * u - (static_cast<double>(a) + u) * per_stage;
      found[trial * cols + g] = u;
    }
  });

  SimReport report{"verifier-constant", {}};
  for (std::size_t g = 0; g < cols; ++g) {
    auto m = column_moments(utility, trials, cols, g);
    auto f = column_moments(found, trials, cols, g);
    SimPoint p;
    p.grid_value = static_cast<double>(alpha_prime_grid[g]);
    p.trials = trials;
    p.mean_utility = m.mean;
    p.std_error = m.std_error;
    auto a = static_cast<double>(alpha_prime_grid[g]);
    p.detection_rate = a > 0.0 ? f.mean / a : 0.0;
    p.mean_alpha_prime = a;
    report.points.push_back(std::move(p));
  }
  return report;
}

SimReport simulate_verifier_greedy(const IncentiveParams& params,
                                   std::span<const std::size_t> flag_grid,
                                   const SimOptions& options) {
  params.validate();
  check_trials(options);
  const std::size_t T = params.stages;
  const std::size_t flags = flag_slot_count(T, params.eta_flag);
  const double per_stage = params.total_cost / static_cast<double>(T);
  const std::size_t cap = access_cap(params, options);
  std::size_t max_m = 0;
  for (auto m : flag_grid) {
    if (m > flags) {
      throw std::invalid_argument("target m = " + std::to_string(m) + " exceeds eta T = " +
                                  std::to_string(flags));
    }
    max_m = std::max(max_m, m);
  }
  const std::size_t cols = flag_grid.size();
  const std::size_t trials = options.trials;
  std::vector<double> utility(trials * cols);
  std::vector<double> found(trials * cols);
  std::vector<std::size_t> stopped(trials * cols);

  parallel_trials(trials, options.threads, [&](std::size_t trial) {
    RandomStream stream(trial_seed(options.master_seed, trial));
    DistinctSampler sampler(stream, T);
    // position[k] = stages verified when the k-th flag turned up.
    std::vector<std::size_t> position;
    position.reserve(max_m);
    std::size_t verified = 0;
    while (position.size() < max_m && verified < cap) {
      ++verified;
      if (sampler.next() <= flags) position.push_back(verified);
    }
    for (std::size_t g = 0; g < cols; ++g) {
      std::size_t m = flag_grid[g];
      std::size_t alpha_prime;
      std::size_t u;
      if (m == 0) {
        alpha_prime = 0;
        u = 0;
      } else if (position.size() >= m) {
        alpha_prime = position[m - 1];
        u = m;
      } else {
        alpha_prime = verified;  // access exhausted before m flags
        u = position.size();
      }
      utility[trial * cols + g] = params.r1 * static_cast<double>(u) -
                                  static_cast<double>(alpha_prime + u) * per_stage;
      found[trial * cols + g] = static_cast<double>(u);
      stopped[trial * cols + g] = alpha_prime;
    }
  });

  SimReport report{"verifier-greedy", {}};
  for (std::size_t g = 0; g < cols; ++g) {
    auto m = column_moments(utility, trials, cols, g);
    SimPoint p;
    p.grid_value = static_cast<double>(flag_grid[g]);
    p.trials = trials;
    p.mean_utility = m.mean;
    p.std_error = m.std_error;
    std::vector<double> stops(trials);
    double total_found = 0.0;
    double total_verified = 0.0;
    p.alpha_prime_histogram.assign(cap + 1, 0);
    for (std::size_t i = 0; i < trials; ++i) {
      std::size_t a = stopped[i * cols + g];
      stops[i] = static_cast<double>(a);
      ++p.alpha_prime_histogram[a];
      total_found += found[i * cols + g];
      total_verified += static_cast<double>(a);
    }
    auto s = column_moments(stops, trials, 1, 0);
    p.mean_alpha_prime = s.mean;
    p.sd_alpha_prime = s.sd;
    p.detection_rate = total_verified > 0.0 ? total_found / total_verified : 0.0;
    report.points.push_back(std::move(p));
  }
  return report;
}

SimPoint evaluate_verifier_policy(const IncentiveParams& params, const VerifierPolicy& policy,
                                  const SimOptions& options) {
  if (const auto* greedy = std::get_if<GreedyAdaptiveVerifier>(&policy)) {
    std::size_t grid[] = {greedy->flags};
    return simulate_verifier_greedy(params, grid, options).points.front();
  }
  std::size_t stages = params.alpha;
  if (const auto* constant = std::get_if<ConstantVerifier>(&policy)) stages = constant->stages;
  std::size_t grid[] = {stages};
  return simulate_verifier_constant(params, grid, options).points.front();
}

DetectionResult detection_rate(std::size_t cheats, std::size_t stages, std::size_t alpha,
                               double kappa, std::size_t trials, const Seed& master_seed) {
  if (cheats > stages || alpha < 1 || alpha > stages) {
    throw std::invalid_argument("detection_rate: need cheats <= T and 1 <= alpha <= T");
  }
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  std::size_t caught_count = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const Seed base = trial_seed(master_seed, trial);
    std::set<std::size_t> cheat_set;
    if (cheats > 0) {
      auto drawn = sample_without_replacement(base.derive(0), stages, cheats);
      cheat_set.insert(drawn.begin(), drawn.end());
    }
    auto t_ve = sample_without_replacement(base.derive(1), stages, alpha);
    RandomStream coins(base.derive(2));
    bool caught = false;
    for (auto t : t_ve) {
      if (cheat_set.contains(t) && coins.uniform01() < kappa) {
        caught = true;
        break;
      }
    }
    if (caught) ++caught_count;
  }
  DetectionResult r;
  r.trials = trials;
  r.empirical = static_cast<double>(caught_count) / static_cast<double>(trials);
  r.analytic = 1.0 - pass_prob_exact(cheats, stages, alpha, kappa);
  r.abs_error = std::abs(r.empirical - r.analytic);
  r.std_error = std::sqrt(r.analytic * (1.0 - r.analytic) / static_cast<double>(trials));
  return r;
}

DilemmaOutcome simulate_dilemma(const PopulationModel& population, double v_plus, double v_zero,
                                const IncentiveParams& params, const SimOptions& options) {
  params.validate();
  population.validate(params.stages);
  check_trials(options);
  const double cost = static_cast<double>(params.alpha) * params.total_cost /
                      static_cast<double>(params.stages);
  std::vector<double> honest(options.trials);
  parallel_trials(options.trials, options.threads, [&](std::size_t trial) {
    RandomStream stream(trial_seed(options.master_seed, trial));
    std::size_t d = population.sample_cheats(stream);
    std::size_t cheats_left = d;
    std::size_t remaining = params.stages;
    bool caught = false;
    for (std::size_t i = 0; i < params.alpha && !caught && cheats_left > 0; ++i) {
      bool is_cheat = stream.uniform_below(remaining) < cheats_left;
      --remaining;
      if (is_cheat) {
        --cheats_left;
        caught = stream.uniform01() < params.kappa;
      }
    }
    honest[trial] = (caught ? v_plus : v_zero) - cost;
  });
  auto m = column_moments(honest, options.trials, 1, 0);
  return {m.mean, v_zero, m.std_error};
}

std::size_t find_optimal(const SimReport& report) {
  if (report.points.empty()) throw std::invalid_argument("find_optimal: empty grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    const auto& p = report.points[i];
    const auto& b = report.points[best];
    if (p.mean_utility > b.mean_utility ||
        (p.mean_utility == b.mean_utility && p.grid_value < b.grid_value)) {
      best = i;
    }
  }
  return best;
}

}  // namespace pol
