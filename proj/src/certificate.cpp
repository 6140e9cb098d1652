#include "pol/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace pol {

Digest hash_weights(std::span<const double> w) {
  for (double v : w) {
    if (!std::isfinite(v)) throw std::invalid_argument("hash_weights: non-finite weight");
  }
  return sha256(serialize_weights(w));
}

Digest hash_permutation(std::span<const std::size_t> sigma) {
  std::vector<std::uint8_t> buf;
  buf.reserve(sigma.size() * 8);
  for (auto v : sigma) append_le64(buf, v);
  return sha256(buf);
}

namespace {

std::set<std::size_t> validated_cheat_set(const CheatSpec& cheat, std::size_t stages) {
  std::set<std::size_t> set(cheat.cheat_stages.begin(), cheat.cheat_stages.end());
  for (auto t : set) {
    if (t < 1 || t > stages) {
      throw std::invalid_argument("cheat stage " + std::to_string(t) + " outside 1.." +
                                  std::to_string(stages));
    }
  }
  return set;
}

Weights fabricate(const Problem& problem, const Weights& prev, const Seed& claimed_seed,
                  Fabrication rule) {
  switch (rule) {
    case Fabrication::SingleEpoch:
      if (problem.env.epochs_per_stage < 2) {
        throw std::invalid_argument(
            "single-epoch fabrication needs at least 2 epochs per stage to differ from "
            "honest training");
      }
      return train_epochs(prev, claimed_seed, problem.env, problem.data, 1);
    case Fabrication::ReusePrevious:
      return prev;
  }
  throw std::invalid_argument("unknown fabrication rule");
}

/// Trains stage by stage. `seed_for(t)` picks the seed; `cheat` marks stages
/// produced by the fabrication rule instead.
template <typename SeedFor>
CheckpointStore run_stages(const Problem& problem, SeedFor seed_for,
                           const std::set<std::size_t>& cheat, Fabrication rule) {
  problem.validate();
  const std::size_t stages = problem.stages();
  CheckpointStore store;
  store.checkpoints.reserve(stages + 1);
  store.checkpoints.push_back(problem.initial_weights());
  for (std::size_t t = 1; t <= stages; ++t) {
    const Weights& prev = store.checkpoints.back();
    Seed seed = seed_for(t);
    if (cheat.contains(t)) {
      store.checkpoints.push_back(fabricate(problem, prev, seed, rule));
    } else {
      store.checkpoints.push_back(train_stage(prev, seed, problem.env, problem.data));
    }
  }
  return store;
}

std::vector<Digest> digests_of(const CheckpointStore& store) {
  std::vector<Digest> out;
  out.reserve(store.checkpoints.size() - 1);
  for (std::size_t t = 1; t < store.checkpoints.size(); ++t) {
    out.push_back(hash_weights(store.checkpoints[t]));
  }
  return out;
}

}  // namespace

std::pair<BasicCertificate, CheckpointStore> generate_basic_cheating(const Problem& problem,
                                                                     const CheatSpec& cheat) {
  auto cheat_set = validated_cheat_set(cheat, problem.stages());
  auto store = run_stages(
      problem,
      [&](std::size_t t) { return derive_stage_seed(problem.root_seed, t, SeedVariant::Normal); },
      cheat_set, cheat.fabrication);
  return {BasicCertificate{digests_of(store)}, std::move(store)};
}

std::pair<BasicCertificate, CheckpointStore> generate_basic(const Problem& problem) {
  return generate_basic_cheating(problem, CheatSpec{});
}

std::size_t flag_slot_count(std::size_t stages, double eta_flag) {
  if (!(eta_flag > 0.0) || !(eta_flag < 0.5)) {
    throw std::invalid_argument("flag fraction must lie in (0, 1/2)");
  }
  double slots = eta_flag * static_cast<double>(stages);
  double rounded = std::round(slots);
  if (std::abs(slots - rounded) > 1e-9 * std::max(1.0, slots)) {
    throw std::invalid_argument("eta_flag * T = " + std::to_string(slots) +
                                " is not an integer");
  }
  auto count = static_cast<std::size_t>(rounded);
  if (count == 0 || count % 2 != 0) {
    throw std::invalid_argument("eta_flag * T = " + std::to_string(count) +
                                " must be a positive even integer");
  }
  return count;
}

FlagPlan make_flag_plan(std::size_t stages, double eta_flag, const Seed& prover_secret) {
  std::size_t count = flag_slot_count(stages, eta_flag);
  return FlagPlan{shuffle(prover_secret, stages), prover_secret, count};
}

SeedVariant stage_variant(std::span<const std::size_t> sigma, std::size_t stage,
                          std::size_t flag_count) {
  if (stage < 1 || stage > sigma.size()) {
    throw std::out_of_range("stage " + std::to_string(stage) + " outside 1.." +
                            std::to_string(sigma.size()));
  }
  std::size_t slot = sigma[stage - 1];
  if (slot > flag_count) return SeedVariant::Normal;
  return slot % 2 == 1 ? SeedVariant::F1 : SeedVariant::F2;
}

SeedVariant stage_variant(const FlagPlan& plan, std::size_t stage) {
  return stage_variant(plan.sigma, stage, plan.flag_count);
}

FullProof generate_cheating(const Problem& problem, double eta_flag, const Seed& prover_secret,
                            const CheatSpec& cheat) {
  problem.validate();
  const std::size_t stages = problem.stages();
  FlagPlan plan = make_flag_plan(stages, eta_flag, prover_secret);
  auto cheat_set = validated_cheat_set(cheat, stages);

  // Move cheat stages into flag slots (AsFlag) or out of them (AsNormal) by
  // swapping sigma entries with the first honest stage of the other kind.
  const bool want_flag = cheat.disguise == Disguise::AsFlag;
  const std::size_t capacity = want_flag ? plan.flag_count : stages - plan.flag_count;
  if (cheat_set.size() > capacity) {
    throw std::invalid_argument("cannot disguise " + std::to_string(cheat_set.size()) +
                                " cheating stages; only " + std::to_string(capacity) +
                                " slots of that kind");
  }
  auto is_flag = [&](std::size_t t) { return plan.sigma[t - 1] <= plan.flag_count; };
  for (auto c : cheat_set) {
    if (is_flag(c) == want_flag) continue;
    for (std::size_t s = 1; s <= stages; ++s) {
      if (!cheat_set.contains(s) && is_flag(s) == want_flag) {
        std::swap(plan.sigma[c - 1], plan.sigma[s - 1]);
        break;
      }
    }
  }

  auto store = run_stages(
      problem,
      [&](std::size_t t) { return derive_stage_seed(problem.root_seed, t, stage_variant(plan, t)); },
      cheat_set, cheat.fabrication);
  FullCertificate cert{digests_of(store), hash_permutation(plan.sigma)};
  return FullProof{std::move(cert), std::move(plan), std::move(store)};
}

FullProof generate_full(const Problem& problem, double eta_flag, const Seed& prover_secret) {
  return generate_cheating(problem, eta_flag, prover_secret, CheatSpec{});
}

}  // namespace pol
