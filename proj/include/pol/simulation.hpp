#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pol/certificate.hpp"
#include "pol/incentives.hpp"
#include "pol/prng.hpp"

namespace pol {

// ---------------------------------------------------------------------------
// Policies and population
// ---------------------------------------------------------------------------

struct HonestProver {};
/// Cheats in `cheats` stages placed uniformly at random.
struct SymmetricCheat {
  std::size_t cheats = 0;
  Disguise disguise = Disguise::AsNormal;
};
using ProverPolicy = std::variant<HonestProver, SymmetricCheat>;

struct HonestVerifier {};
/// Verifies a fixed number of stages.
struct ConstantVerifier {
  std::size_t stages = 0;
};
/// Verifies until `flags` flags have been found (or access runs out).
struct GreedyAdaptiveVerifier {
  std::size_t flags = 0;
};
using VerifierPolicy = std::variant<HonestVerifier, ConstantVerifier, GreedyAdaptiveVerifier>;

/// Catch probability of a verified cheating stage: 1 when disguised as a
/// normal stage, 1/2 when claimed as a flag.
double catch_probability(Disguise disguise);

/// Provers are honest with probability 1 - epsilon; dishonest ones draw
/// their cheat count from `cheat_weights` (index d - 1 holds weight of d).
struct PopulationModel {
  double epsilon = 0.0;
  std::vector<double> cheat_weights;

  void validate(std::size_t stages) const;
  /// Returns 0 for an honest prover.
  std::size_t sample_cheats(RandomStream& stream) const;
};

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct SimPoint {
  double grid_value = 0.0;
  std::size_t trials = 0;
  double mean_utility = 0.0;
  double std_error = 0.0;
  /// Prover runs: caught / verified. Verifier runs: flags found per verified stage.
  double detection_rate = 0.0;
  double mean_alpha_prime = 0.0;
  double sd_alpha_prime = 0.0;
  std::vector<std::size_t> alpha_prime_histogram;  // greedy runs only
};

struct SimReport {
  std::string experiment;
  std::vector<SimPoint> points;
};

struct SimOptions {
  std::size_t trials = 10000;
  Seed master_seed = Seed::from_u64(0);
  std::size_t threads = 1;
  /// Cost of a dishonest stage as a fraction of M/T (0: free cheating).
  double dishonest_stage_cost = 0.0;
  /// Lets verifier strategies go beyond the alpha stages of t_ve.
  bool allow_exceed_alpha = false;
};

/// Seed of trial i: hash(master || LE64(i)).
Seed trial_seed(const Seed& master, std::size_t trial);

/// Prover utility versus number of cheating stages, with competition,
/// uniform stage sampling and kappa-effective catches.
SimReport simulate_prover_utility(const IncentiveParams& params,
                                  std::span<const std::size_t> cheat_grid,
                                  const SimOptions& options);

/// Verifier utility R1 u - (alpha' + u) M/T against an honest prover, for a
/// constant number alpha' of verified stages.
SimReport simulate_verifier_constant(const IncentiveParams& params,
                                     std::span<const std::size_t> alpha_prime_grid,
                                     const SimOptions& options);

/// Greedy-adaptive verifier: stop after m flags or when access runs out.
SimReport simulate_verifier_greedy(const IncentiveParams& params,
                                   std::span<const std::size_t> flag_grid,
                                   const SimOptions& options);

SimPoint evaluate_verifier_policy(const IncentiveParams& params, const VerifierPolicy& policy,
                                  const SimOptions& options);

struct DetectionResult {
  double empirical = 0.0;
  double analytic = 0.0;
  double abs_error = 0.0;
  double std_error = 0.0;  // binomial standard error of the empirical rate
  std::size_t trials = 0;
};

/// Draws the cheat set and t_ve literally and compares the catch frequency
/// with 1 - pass_prob_exact.
DetectionResult detection_rate(std::size_t cheats, std::size_t stages, std::size_t alpha,
                               double kappa, std::size_t trials, const Seed& master_seed);

struct DilemmaOutcome {
  double honest_utility = 0.0;
  double lazy_utility = 0.0;
  double honest_std_error = 0.0;
};

/// Basic mechanism verifier facing a population: verifying alpha stages
/// earns v_plus on a catch and v_zero otherwise at cost alpha M/T; the lazy
/// verifier always earns v_zero.
DilemmaOutcome simulate_dilemma(const PopulationModel& population, double v_plus, double v_zero,
                                const IncentiveParams& params, const SimOptions& options);

/// Index of the best mean utility; ties go to the smaller grid value.
std::size_t find_optimal(const SimReport& report);

}  // namespace pol
