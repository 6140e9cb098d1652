#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pol/certificate.hpp"

namespace pol {

struct VerificationRequest {
  std::vector<std::size_t> stages;  // t_ve, sorted, distinct, in 1..T
};

/// Prover's answer for one requested stage: (W_{t-1}, W_t).
struct RevealedStage {
  std::size_t stage = 0;
  Weights before;
  Weights after;
};

enum class FailReason : std::uint8_t { InvalidWeights, ErrorInStage, InvalidFlagCommitment };

const char* to_string(FailReason reason);

/// V_i posted by the verifier for stage t_i.
struct StageVerdict {
  std::size_t stage = 0;
  SeedVariant reported = SeedVariant::Normal;
  std::size_t retrains = 0;  // 1 if the Normal seed matched, else 2
};

struct Verdict {
  bool success = false;
  std::optional<FailReason> reason;
  std::optional<std::size_t> failed_stage;
  std::vector<std::size_t> t_ve;
  std::vector<std::size_t> flags_found;
  std::size_t u = 0;  // |flags_found|
  std::size_t D = 0;  // confirmed dishonest stages
  std::size_t single_probes = 0;
  std::size_t double_probes = 0;

  /// Verification work in units of one stage's training (M/T = 1).
  double cost() const { return static_cast<double>(single_probes + 2 * double_probes); }
};

/// Raised when a protocol message arrives out of order.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

VerificationRequest select_stages(std::size_t stages, std::size_t alpha,
                                  const Seed& verifier_secret);

/// Honest prover's response to a request.
std::vector<RevealedStage> reveal_stages(const CheckpointStore& store,
                                         const VerificationRequest& request);

/// Basic mechanism: hash checks then a Normal-seed re-train of each stage.
Verdict verify_basic(const Problem& problem, const BasicCertificate& certificate,
                     std::span<const RevealedStage> revealed,
                     const VerificationRequest& request);

/// The verifier's coin xi for stage t: bit from counter 2^63 + t of the
/// verifier-secret stream (stage selection uses the low counters).
bool verifier_coin(const Seed& verifier_secret, std::size_t stage);

/// Capture-the-flag probe of one stage. Returns V in {Normal, F1, F2} and
/// how many re-trainings it took.
StageVerdict probe_stage_full(const Problem& problem, std::span<const double> before,
                              std::span<const double> after, std::size_t stage, bool coin);

/// Message-ordered full verification session:
/// CertPosted -> StagesRequested -> WeightsRevealed -> VerdictsPosted ->
/// FlagPlanRevealed -> Final. A hash mismatch ends the session early (Final).
/// The problem must outlive the session.
class ProtocolSession {
 public:
  enum class State : std::uint8_t {
    CertPosted,
    StagesRequested,
    WeightsRevealed,
    VerdictsPosted,
    FlagPlanRevealed,
    Final,
  };

  ProtocolSession(const Problem& problem, FullCertificate certificate, double eta_flag);

  const VerificationRequest& request_stages(std::size_t alpha, const Seed& verifier_secret);
  void reveal_weights(std::vector<RevealedStage> revealed);
  /// Runs hash checks and probes; posts V. On a hash mismatch the session
  /// becomes Final with Fail(InvalidWeights) and the returned list is empty.
  const std::vector<StageVerdict>& post_verdicts();
  const Verdict& reveal_flag_plan(std::span<const std::size_t> sigma);

  State state() const { return state_; }
  bool finished() const { return state_ == State::Final; }
  const Verdict& verdict() const;
  const VerificationRequest& request() const { return request_; }
  const nlohmann::json& transcript() const { return transcript_; }

 private:
  void expect(State required, const char* action) const;
  void finish(Verdict verdict);

  const Problem* problem_;
  FullCertificate certificate_;
  std::size_t flag_count_;
  State state_ = State::CertPosted;
  Seed verifier_secret_;
  VerificationRequest request_;
  std::vector<RevealedStage> revealed_;
  std::vector<StageVerdict> verdicts_;
  Verdict verdict_;
  nlohmann::json transcript_ = nlohmann::json::array();
};

const char* to_string(ProtocolSession::State state);

/// Drives a session that has already requested stages through to its verdict.
Verdict verify_full(ProtocolSession& session, std::vector<RevealedStage> revealed,
                    std::span<const std::size_t> sigma);

/// Full protocol against a prover who answers from `proof` honestly
/// (its checkpoints and flag plan, whatever they contain).
Verdict run_full_protocol(const Problem& problem, const FullProof& proof, double eta_flag,
                          std::size_t alpha, const Seed& verifier_secret,
                          nlohmann::json* transcript = nullptr);

/// W_v = R0 [D > 0] + R1 u.
double verifier_reward(std::int64_t u, std::int64_t dishonest, double r0, double r1);

/// (a + 2b) M / T for a single-probed and b double-probed stages.
double verification_cost(std::int64_t single_probed, std::int64_t double_probed, double total_cost,
                         std::size_t stages);

}  // namespace pol
