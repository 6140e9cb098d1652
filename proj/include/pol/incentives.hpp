#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace pol {

/// Winning probability P(rho) as a function of the honestly-trained fraction.
class Competition {
 public:
  struct ConstantOne {};
  struct ExponentialHazard {
    double lambda = 1.0;
  };
  /// Piecewise-linear through (rho, P) knots; must start at (0, 1), end at
  /// rho = 1 and be non-increasing with P in (0, 1].
  struct Table {
    std::vector<std::pair<double, double>> knots;
  };
  using Family = std::variant<ConstantOne, ExponentialHazard, Table>;

  Competition() = default;
  explicit Competition(Family family);

  static Competition constant_one() { return Competition(ConstantOne{}); }
  static Competition exponential(double lambda) { return Competition(ExponentialHazard{lambda}); }
  static Competition table(std::vector<std::pair<double, double>> knots) {
    return Competition(Table{std::move(knots)});
  }

  const Family& family() const { return family_; }

  double winning_prob(double rho) const;
  /// int_0^rho P(x) dx, in closed form for every family.
  double integral(double rho) const;
  /// sup of -P'/P over [0,1].
  double hazard_bound() const;

 private:
  Family family_ = ConstantOne{};
};

/// Economic parameters of one PoL task.
struct IncentiveParams {
  double total_cost = 1.0;    // M
  double reward = 2.0;        // R
  double penalty_ratio = 0.0; // gamma
  double kappa = 1.0;         // per-stage catch probability when verified
  std::size_t alpha = 1;
  std::size_t stages = 1;     // T
  double eta_flag = 0.2;
  double r0 = 0.0;
  double r1 = 0.0;
  Competition competition;

  double beta() const { return total_cost / reward; }
  /// lambda: the competition's hazard-rate bound.
  double hazard_bound() const { return competition.hazard_bound(); }
  void validate() const;
};

enum class PassMode { Exact, Bound };

double winning_prob(const Competition& comp, double rho);

/// Expected sunk cost when losing the competition after training rho of the task.
/// Undefined when P(rho) = 1 (losing is impossible); throws in that case.
double sunk_cost_mu(const Competition& comp, double rho, double total_cost);

/// C(rho T, s) / C(T, s): pass probability given s effectively verified stages.
double pass_prob_given_s(double rho, std::size_t stages, std::size_t s);

/// (1 - kappa + kappa rho)^alpha.
double pass_prob_bound(double rho, std::size_t alpha, double kappa);

/// Exact pass probability with `cheats` dishonest stages: uniform t_ve of size
/// alpha, each verified cheat caught independently with probability kappa.
double pass_prob_exact(std::size_t cheats, std::size_t stages, std::size_t alpha, double kappa);

/// P(j cheats land in t_ve) for j = 0..min(cheats, alpha).
std::vector<double> hypergeometric_pmf(std::size_t cheats, std::size_t stages, std::size_t alpha);

/// u(rho) = P(rho) (Q - gamma (1 - Q)) R - M int_0^rho P.
/// Exact mode requires rho T to be an integer.
double prover_utility(const IncentiveParams& params, double rho, PassMode mode = PassMode::Exact);
/// Exact-mode utility for an integral number of cheating stages.
double prover_utility_cheats(const IncentiveParams& params, std::size_t cheats);

struct IrReport {
  bool holds = false;          // u(1) > 0
  double honest_utility = 0.0; // u(1)
  bool threshold_feasible = false;
  double threshold_reward = 0.0;  // int P M / (P(1) - (1-kappa)^alpha)
  double asymptotic_reward = 0.0; // int P M / P(1)
};
IrReport check_ir(const IncentiveParams& params);

/// Smallest alpha >= 2 with alpha >= max{2(lambda+beta)/(beta kappa), 2 ln(T/beta)/kappa}.
std::size_t min_alpha_bis(double beta, double lambda, double kappa, std::size_t stages);
std::size_t min_alpha_bis(const IncentiveParams& params);

/// Smallest alpha with alpha > max{beta/(gamma kappa), lambda/kappa}.
std::size_t min_alpha_penalty(double beta, double gamma, double kappa, double lambda);
std::size_t min_alpha_penalty(const IncentiveParams& params, double gamma);

struct VisReport {
  bool holds = false;
  bool eta_in_range = false;   // eta in [2 alpha / T, 1/2)
  bool reward_sufficient = false;
  double eta_lower = 0.0;      // 2 alpha / T
  double eta_slack = 0.0;      // eta - 2 alpha / T
  double min_r1 = 0.0;         // (M/T)(2/eta + 1)
  double r1_slack = 0.0;
};
VisReport vis_check(std::size_t alpha, std::size_t stages, double eta_flag, double r1,
                    double total_cost);

/// (eta T - found) / (T - verified).
double flag_find_prob(double eta_flag, std::size_t stages, std::size_t found,
                      std::size_t verified);
inline double flag_find_prob_lower_bound(double eta_flag) { return eta_flag / 2.0; }

/// p (R1 - M/T) - M/T.
double verifier_marginal_gain(double p, double r1, double total_cost, std::size_t stages);

struct DilemmaThreshold {
  bool always_lazy = false;
  double epsilon = 0.0;  // meaningful when !always_lazy
};
/// Below this dishonest fraction, skipping verification strictly dominates.
DilemmaThreshold dilemma_epsilon_threshold(double v_plus, double v_zero, double total_cost,
                                           std::size_t stages);

}  // namespace pol
