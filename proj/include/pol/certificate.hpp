#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pol/prng.hpp"
#include "pol/training.hpp"

namespace pol {

/// An assigned PoL task: dataset, training environment and root seed.
struct Problem {
  Dataset data;
  Hyper env;
  Seed root_seed;

  std::size_t stages() const { return env.stages(); }
  void validate() const { env.validate(data.size()); }
  Weights initial_weights() const { return pol::initial_weights(env, data.dim()); }
};

struct BasicCertificate {
  std::vector<Digest> digests;  // c_1..c_T
};

/// Prover's secret flag designation. Stage t is a flag when
/// sigma[t-1] <= flag_count; odd slots are F1, even slots F2.
struct FlagPlan {
  std::vector<std::size_t> sigma;
  Seed prover_secret;
  std::size_t flag_count = 0;

  std::size_t stages() const { return sigma.size(); }
};

struct FullCertificate {
  std::vector<Digest> digests;
  Digest commitment{};  // hash of sigma
};

/// W_0..W_T kept by the prover for later reveals.
struct CheckpointStore {
  std::vector<Weights> checkpoints;
};

enum class Disguise : std::uint8_t { AsNormal, AsFlag };

enum class Fabrication : std::uint8_t {
  SingleEpoch,    // train one epoch with the claimed seed instead of k
  ReusePrevious,  // W_t := W_{t-1}, zero cost
};

struct CheatSpec {
  std::vector<std::size_t> cheat_stages;  // subset of {1..T}
  Disguise disguise = Disguise::AsNormal;
  Fabrication fabrication = Fabrication::SingleEpoch;
};

struct FullProof {
  FullCertificate certificate;
  FlagPlan plan;
  CheckpointStore checkpoints;
};

Digest hash_weights(std::span<const double> w);
/// SHA-256 over LE64(sigma_1) .. LE64(sigma_T).
Digest hash_permutation(std::span<const std::size_t> sigma);

std::pair<BasicCertificate, CheckpointStore> generate_basic(const Problem& problem);

/// eta_flag * stages must be a positive even integer and eta_flag < 1/2.
std::size_t flag_slot_count(std::size_t stages, double eta_flag);

FlagPlan make_flag_plan(std::size_t stages, double eta_flag, const Seed& prover_secret);

SeedVariant stage_variant(const FlagPlan& plan, std::size_t stage);
SeedVariant stage_variant(std::span<const std::size_t> sigma, std::size_t stage,
                          std::size_t flag_count);

/// Basic-mechanism adversary: stages in `cheat.cheat_stages` are fabricated
/// (disguise is irrelevant without flags).
std::pair<BasicCertificate, CheckpointStore> generate_basic_cheating(const Problem& problem,
                                                                     const CheatSpec& cheat);

FullProof generate_full(const Problem& problem, double eta_flag, const Seed& prover_secret);

/// Adversary harness: stages in `cheat.cheat_stages` are fabricated, all
/// others trained as the (possibly rearranged) flag plan dictates.
FullProof generate_cheating(const Problem& problem, double eta_flag, const Seed& prover_secret,
                            const CheatSpec& cheat);

}  // namespace pol
