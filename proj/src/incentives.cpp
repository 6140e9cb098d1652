#include "pol/incentives.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>

namespace pol {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("rho must lie in [0, 1], got " + std::to_string(rho));
  }
}

// Threshold rounding: values within this relative distance of an integer
// are treated as attaining it.
constexpr double kIntegerTolerance = 1e-9;

std::size_t ceil_threshold(double x) {
  double tol = kIntegerTolerance * std::max(1.0, std::abs(x));
  return static_cast<std::size_t>(std::max(0.0, std::ceil(x - tol)));
}

std::size_t strict_threshold(double x) {
  double tol = kIntegerTolerance * std::max(1.0, std::abs(x));
  return static_cast<std::size_t>(std::max(0.0, std::floor(x + tol))) + 1;
}

}  // namespace

Competition::Competition(Family family) : family_(std::move(family)) {
  if (auto* exp = std::get_if<ExponentialHazard>(&family_)) {
    if (!(exp->lambda > 0.0) || !std::isfinite(exp->lambda)) {
      throw std::invalid_argument("hazard rate lambda must be positive");
    }
  }
  if (auto* table = std::get_if<Table>(&family_)) {
    const auto& k = table->knots;
    if (k.size() < 2) throw std::invalid_argument("competition table needs at least two knots");
    if (k.front().first != 0.0 || k.front().second != 1.0) {
      throw std::invalid_argument("competition table must start at (0, 1)");
    }
    if (k.back().first != 1.0) throw std::invalid_argument("competition table must end at rho = 1");
    for (std::size_t i = 1; i < k.size(); ++i) {
      if (!(k[i].first > k[i - 1].first)) {
        throw std::invalid_argument("competition table rho values must be strictly increasing");
      }
      if (k[i].second > k[i - 1].second) {
        throw std::invalid_argument("competition table is not non-increasing");
      }
      if (!(k[i].second > 0.0)) {
        throw std::invalid_argument("competition table probabilities must be positive");
      }
    }
  }
}

double Competition::winning_prob(double rho) const {
  check_rho(rho);
  return std::visit(overloaded{
                        [](const ConstantOne&) { return 1.0; },
                        [&](const ExponentialHazard& e) { return std::exp(-e.lambda * rho); },
                        [&](const Table& t) {
                          const auto& k = t.knots;
                          auto it = std::upper_bound(
                              k.begin(), k.end(), rho,
                              [](double r, const auto& knot) { return r < knot.first; });
                          if (it == k.end()) return k.back().second;
                          auto prev = std::prev(it);
                          double frac = (rho - prev->first) / (it->first - prev->first);
                          return prev->second + frac * (it->second - prev->second);
                        },
                    },
                    family_);
}

double Competition::integral(double rho) const {
  check_rho(rho);
  return std::visit(overloaded{
                        [&](const ConstantOne&) { return rho; },
                        [&](const ExponentialHazard& e) {
                          return -std::expm1(-e.lambda * rho) / e.lambda;
                        },
                        [&](const Table& t) {
                          double acc = 0.0;
                          const auto& k = t.knots;
                          for (std::size_t i = 1; i < k.size() && k[i - 1].first < rho; ++i) {
                            double hi = std::min(rho, k[i].first);
                            double p_hi = winning_prob(hi);
                            acc += 0.5 * (k[i - 1].second + p_hi) * (hi - k[i - 1].first);
                          }
                          return acc;
                        },
                    },
                    family_);
}

double Competition::hazard_bound() const {
  return std::visit(overloaded{
                        [](const ConstantOne&) { return 0.0; },
                        [](const ExponentialHazard& e) { return e.lambda; },
                        [](const Table& t) {
                          double worst = 0.0;
                          const auto& k = t.knots;
                          for (std::size_t i = 1; i < k.size(); ++i) {
                            double slope =
                                (k[i].second - k[i - 1].second) / (k[i].first - k[i - 1].first);
                            worst = std::max(worst, -slope / k[i].second);
                          }
                          return worst;
                        },
                    },
                    family_);
}

void IncentiveParams::validate() const {
  if (!(total_cost > 0.0) || !(reward > 0.0)) throw std::invalid_argument("M and R must be positive");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
  if (stages < 1 || alpha < 1 || alpha > stages) {
    throw std::invalid_argument("need 1 <= alpha <= T");
  }
  if (penalty_ratio < 0.0) throw std::invalid_argument("gamma must be non-negative");
}

double winning_prob(const Competition& comp, double rho) { return comp.winning_prob(rho); }

double sunk_cost_mu(const Competition& comp, double rho, double total_cost) {
  double p = comp.winning_prob(rho);
  if (p >= 1.0) {
    throw std::domain_error("sunk_cost_mu undefined at P(rho) = 1: losing has probability 0");
  }
  return total_cost * (comp.integral(rho) - rho * p) / (1.0 - p);
}

double pass_prob_given_s(double rho, std::size_t stages, std::size_t s) {
  check_rho(rho);
  if (s > stages) throw std::invalid_argument("s must not exceed T");
  double honest = rho * static_cast<double>(stages);
  double rounded = std::round(honest);
  if (std::abs(honest - rounded) > 1e-9 * std::max(1.0, honest)) {
    throw std::invalid_argument("rho * T must be an integer");
  }
  auto h = static_cast<std::size_t>(rounded);
  if (s > h) return 0.0;
  double q = 1.0;
  for (std::size_t i = 0; i < s; ++i) {
    q *= static_cast<double>(h - i) / static_cast<double>(stages - i);
  }
  return q;
}

double pass_prob_bound(double rho, std::size_t alpha, double kappa) {
  check_rho(rho);
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
  return std::pow(1.0 - kappa + kappa * rho, static_cast<double>(alpha));
}

std::vector<double> hypergeometric_pmf(std::size_t cheats, std::size_t stages, std::size_t alpha) {
  if (cheats > stages || alpha > stages) {
    throw std::invalid_argument("hypergeometric_pmf: need cheats, alpha <= T");
  }
  // Term ratios from the mode outward, then normalize. Staying in linear
  // space keeps the error at a few ulps; lgamma differences lose ~1e-11.
  const double d = static_cast<double>(cheats);
  const double n = static_cast<double>(stages);
  const double a = static_cast<double>(alpha);
  std::size_t lo = alpha > stages - cheats ? alpha - (stages - cheats) : 0;
  std::size_t hi = std::min(cheats, alpha);
  std::size_t mode = static_cast<std::size_t>(std::floor((a + 1.0) * (d + 1.0) / (n + 2.0)));
  mode = std::clamp(mode, lo, hi);

  std::vector<double> pmf(hi + 1, 0.0);
  pmf[mode] = 1.0;
  for (std::size_t j = mode; j < hi; ++j) {
    double jd = static_cast<double>(j);
    pmf[j + 1] = pmf[j] * ((d - jd) * (a - jd)) / ((jd + 1.0) * (n - d - a + jd + 1.0));
  }
  for (std::size_t j = mode; j > lo; --j) {
    double jd = static_cast<double>(j);
    pmf[j - 1] = pmf[j] * (jd * (n - d - a + jd)) / ((d - jd + 1.0) * (a - jd + 1.0));
  }
  double total = 0.0;
  for (std::size_t j = lo; j <= hi; ++j) total += pmf[j];
  for (auto& v : pmf) v /= total;
  return pmf;
}

double pass_prob_exact(std::size_t cheats, std::size_t stages, std::size_t alpha, double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
  if (cheats == 0) return 1.0;
  auto pmf = hypergeometric_pmf(cheats, stages, alpha);
  double q = 0.0;
  for (std::size_t j = 0; j < pmf.size(); ++j) {
    q += pmf[j] * std::pow(1.0 - kappa, static_cast<double>(j));
  }
  return std::min(q, 1.0);
}

double prover_utility(const IncentiveParams& params, double rho, PassMode mode) {
  params.validate();
  check_rho(rho);
  double q = 0.0;
  if (mode == PassMode::Bound) {
    q = pass_prob_bound(rho, params.alpha, params.kappa);
  } else {
    double honest = rho * static_cast<double>(params.stages);
    double rounded = std::round(honest);
    if (std::abs(honest - rounded) > 1e-9 * std::max(1.0, honest)) {
      throw std::invalid_argument("exact mode needs rho * T to be an integer");
    }
    auto cheats = params.stages - static_cast<std::size_t>(rounded);
    q = pass_prob_exact(cheats, params.stages, params.alpha, params.kappa);
  }
  const auto& comp = params.competition;
  return comp.winning_prob(rho) * (q - params.penalty_ratio * (1.0 - q)) * params.reward -
         comp.integral(rho) * params.total_cost;
}

double prover_utility_cheats(const IncentiveParams& params, std::size_t cheats) {
  if (cheats > params.stages) throw std::invalid_argument("cheat count exceeds T");
  double rho = static_cast<double>(params.stages - cheats) / static_cast<double>(params.stages);
  return prover_utility(params, rho, PassMode::Exact);
}

IrReport check_ir(const IncentiveParams& params) {
  params.validate();
  IrReport r;
  const auto& comp = params.competition;
  double p1 = comp.winning_prob(1.0);
  double area = comp.integral(1.0);
  r.honest_utility = p1 * params.reward - area * params.total_cost;
  r.holds = r.honest_utility > 0.0;
  double denom = p1 - std::pow(1.0 - params.kappa, static_cast<double>(params.alpha));
  r.threshold_feasible = denom > 0.0;
  if (r.threshold_feasible) r.threshold_reward = area * params.total_cost / denom;
  r.asymptotic_reward = area * params.total_cost / p1;
  return r;
}

std::size_t min_alpha_bis(double beta, double lambda, double kappa, std::size_t stages) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta = M/R must lie in (0, 1)");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
  if (lambda < 0.0) throw std::invalid_argument("hazard bound must be non-negative");
  if (stages < 2) throw std::invalid_argument("T must be at least 2");
  double hazard_term = 2.0 * (lambda + beta) / (beta * kappa);
  double log_term = 2.0 * std::log(static_cast<double>(stages) / beta) / kappa;
  return std::max<std::size_t>(2, ceil_threshold(std::max(hazard_term, log_term)));
}

std::size_t min_alpha_bis(const IncentiveParams& params) {
  return min_alpha_bis(params.beta(), params.hazard_bound(), params.kappa, params.stages);
}

std::size_t min_alpha_penalty(double beta, double gamma, double kappa, double lambda) {
  if (!(gamma > 0.0)) throw std::invalid_argument("penalty ratio gamma must be positive");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  return strict_threshold(std::max(beta / (gamma * kappa), lambda / kappa));
}

std::size_t min_alpha_penalty(const IncentiveParams& params, double gamma) {
  return min_alpha_penalty(params.beta(), gamma, params.kappa, params.hazard_bound());
}

VisReport vis_check(std::size_t alpha, std::size_t stages, double eta_flag, double r1,
                    double total_cost) {
  if (stages < 1) throw std::invalid_argument("T must be positive");
  VisReport v;
  double per_stage = total_cost / static_cast<double>(stages);
  v.eta_lower = 2.0 * static_cast<double>(alpha) / static_cast<double>(stages);
  v.eta_slack = eta_flag - v.eta_lower;
  v.eta_in_range = eta_flag >= v.eta_lower && eta_flag < 0.5;
  v.min_r1 = eta_flag > 0.0 ? per_stage * (2.0 / eta_flag + 1.0)
                            : std::numeric_limits<double>::infinity();
  v.r1_slack = r1 - v.min_r1;
  v.reward_sufficient = r1 >= v.min_r1;
  v.holds = v.eta_in_range && v.reward_sufficient;
  return v;
}

double flag_find_prob(double eta_flag, std::size_t stages, std::size_t found,
                      std::size_t verified) {
  double flags = eta_flag * static_cast<double>(stages);
  if (static_cast<double>(found) > flags + 1e-9) {
    throw std::invalid_argument("found more flags than were planted");
  }
  if (verified >= stages) throw std::invalid_argument("no unverified stages remain");
  return (flags - static_cast<double>(found)) / static_cast<double>(stages - verified);
}

double verifier_marginal_gain(double p, double r1, double total_cost, std::size_t stages) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  double per_stage = total_cost / static_cast<double>(stages);
  return p * (r1 - per_stage) - per_stage;
}

DilemmaThreshold dilemma_epsilon_threshold(double v_plus, double v_zero, double total_cost,
                                           std::size_t stages) {
  if (!(total_cost > 0.0) || stages == 0) throw std::invalid_argument("M and T must be positive");
  if (v_plus <= v_zero) return {true, 0.0};
  return {false, total_cost / (static_cast<double>(stages) * (v_plus - v_zero))};
}

}  // namespace pol
