#include "pol/verification.hpp"

#include <algorithm>
#include <cmath>

#include "pol/io.hpp"

namespace pol {

const char* to_string(FailReason reason) {
  switch (reason) {
    case FailReason::InvalidWeights:
      return "InvalidWeights";
    case FailReason::ErrorInStage:
      return "ErrorInStage";
    case FailReason::InvalidFlagCommitment:
      return "InvalidFlagCommitment";
  }
  return "Unknown";
}

const char* to_string(ProtocolSession::State state) {
  using S = ProtocolSession::State;
  switch (state) {
    case S::CertPosted:
      return "CertPosted";
    case S::StagesRequested:
      return "StagesRequested";
    case S::WeightsRevealed:
      return "WeightsRevealed";
    case S::VerdictsPosted:
      return "VerdictsPosted";
    case S::FlagPlanRevealed:
      return "FlagPlanRevealed";
    case S::Final:
      return "Final";
  }
  return "Unknown";
}

VerificationRequest select_stages(std::size_t stages, std::size_t alpha,
                                  const Seed& verifier_secret) {
  if (alpha < 1 || alpha > stages) {
    throw std::invalid_argument("alpha must lie in 1..T (alpha=" + std::to_string(alpha) +
                                ", T=" + std::to_string(stages) + ")");
  }
  return VerificationRequest{sample_without_replacement(verifier_secret, stages, alpha)};
}

std::vector<RevealedStage> reveal_stages(const CheckpointStore& store,
                                         const VerificationRequest& request) {
  std::vector<RevealedStage> out;
  out.reserve(request.stages.size());
  for (auto t : request.stages) {
    if (t < 1 || t >= store.checkpoints.size()) {
      throw std::out_of_range("requested stage " + std::to_string(t) + " not in checkpoint store");
    }
    out.push_back(RevealedStage{t, store.checkpoints[t - 1], store.checkpoints[t]});
  }
  return out;
}

namespace {

void check_alignment(std::span<const RevealedStage> revealed, const VerificationRequest& request) {
  if (revealed.size() != request.stages.size()) {
    throw std::invalid_argument("revealed " + std::to_string(revealed.size()) +
                                " stages, expected " + std::to_string(request.stages.size()));
  }
  for (std::size_t i = 0; i < revealed.size(); ++i) {
    if (revealed[i].stage != request.stages[i]) {
      throw std::invalid_argument("revealed stage " + std::to_string(revealed[i].stage) +
                                  " does not match requested stage " +
                                  std::to_string(request.stages[i]));
    }
  }
}

/// The left checkpoint of stage 1 is W_0 itself, which is not part of c.
bool hashes_match(const Problem& problem, std::span<const Digest> digests,
                  const RevealedStage& r) {
  if (r.stage < 1 || r.stage > digests.size()) return false;
  if (r.stage == 1) {
    if (!bitwise_equal(r.before, problem.initial_weights())) return false;
  } else {
    if (r.before.size() != problem.initial_weights().size()) return false;
    if (hash_weights(r.before) != digests[r.stage - 2]) return false;
  }
  if (r.after.size() != problem.initial_weights().size()) return false;
  return hash_weights(r.after) == digests[r.stage - 1];
}

Verdict fail(FailReason reason, std::optional<std::size_t> stage, const VerificationRequest& req) {
  Verdict v;
  v.success = false;
  v.reason = reason;
  v.failed_stage = stage;
  v.t_ve = req.stages;
  v.D = reason == FailReason::ErrorInStage ? 1 : 0;
  return v;
}

bool finite(std::span<const double> w) {
  return std::all_of(w.begin(), w.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Verdict verify_basic(const Problem& problem, const BasicCertificate& certificate,
                     std::span<const RevealedStage> revealed,
                     const VerificationRequest& request) {
  problem.validate();
  if (certificate.digests.size() != problem.stages()) {
    throw std::invalid_argument("certificate length does not match T");
  }
  check_alignment(revealed, request);
  Verdict ok;
  ok.t_ve = request.stages;
  for (const auto& r : revealed) {
    if (!finite(r.before) || !finite(r.after) ||
        !hashes_match(problem, certificate.digests, r)) {
      auto v = fail(FailReason::InvalidWeights, r.stage, request);
      v.single_probes = ok.single_probes;
      return v;
    }
    Seed seed = derive_stage_seed(problem.root_seed, r.stage, SeedVariant::Normal);
    Weights w = train_stage(r.before, seed, problem.env, problem.data);
    ++ok.single_probes;
    if (!bitwise_equal(w, r.after)) {
      auto v = fail(FailReason::ErrorInStage, r.stage, request);
      v.single_probes = ok.single_probes;
      return v;
    }
  }
  ok.success = true;
  return ok;
}

bool verifier_coin(const Seed& verifier_secret, std::size_t stage) {
  RandomStream stream(verifier_secret, (std::uint64_t{1} << 63) + stage);
  return stream.coin();
}

StageVerdict probe_stage_full(const Problem& problem, std::span<const double> before,
                              std::span<const double> after, std::size_t stage, bool coin) {
  auto retrain = [&](SeedVariant variant) {
    return train_stage(before, derive_stage_seed(problem.root_seed, stage, variant), problem.env,
                       problem.data);
  };
  if (bitwise_equal(retrain(SeedVariant::Normal), after)) {
    return {stage, SeedVariant::Normal, 1};
  }
  if (coin) {
    bool match = bitwise_equal(retrain(SeedVariant::F1), after);
    return {stage, match ? SeedVariant::F1 : SeedVariant::F2, 2};
  }
  bool match = bitwise_equal(retrain(SeedVariant::F2), after);
  return {stage, match ? SeedVariant::F2 : SeedVariant::F1, 2};
}

ProtocolSession::ProtocolSession(const Problem& problem, FullCertificate certificate,
                                 double eta_flag)
    : problem_(&problem), certificate_(std::move(certificate)) {
  problem.validate();
  if (certificate_.digests.size() != problem.stages()) {
    throw std::invalid_argument("certificate length does not match T");
  }
  flag_count_ = flag_slot_count(problem.stages(), eta_flag);
  transcript_.push_back(
      {{"type", "certificate"}, {"T", problem.stages()}, {"c", digests_to_json(certificate_.digests)},
       {"H", to_hex(certificate_.commitment)}});
}

void ProtocolSession::expect(State required, const char* action) const {
  if (state_ != required) {
    throw ProtocolError(std::string(action) + " requires state " + to_string(required) +
                        ", session is in " + to_string(state_));
  }
}

void ProtocolSession::finish(Verdict verdict) {
  verdict_ = std::move(verdict);
  state_ = State::Final;
  transcript_.push_back({{"type", "verdict"}, {"verdict", verdict_to_json(verdict_)}});
}

const VerificationRequest& ProtocolSession::request_stages(std::size_t alpha,
                                                           const Seed& verifier_secret) {
  expect(State::CertPosted, "request_stages");
  verifier_secret_ = verifier_secret;
  request_ = select_stages(problem_->stages(), alpha, verifier_secret);
  state_ = State::StagesRequested;
  transcript_.push_back({{"type", "request"}, {"t_ve", request_.stages}});
  return request_;
}

void ProtocolSession::reveal_weights(std::vector<RevealedStage> revealed) {
  expect(State::StagesRequested, "reveal_weights");
  check_alignment(revealed, request_);
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& r : revealed) {
    stages.push_back({{"stage", r.stage},
                      {"before", to_hex(serialize_weights(r.before))},
                      {"after", to_hex(serialize_weights(r.after))}});
  }
  revealed_ = std::move(revealed);
  state_ = State::WeightsRevealed;
  transcript_.push_back({{"type", "reveal"}, {"stages", std::move(stages)}});
}

const std::vector<StageVerdict>& ProtocolSession::post_verdicts() {
  expect(State::WeightsRevealed, "post_verdicts");
  verdicts_.clear();
  std::size_t probes = 0;
  for (const auto& r : revealed_) {
    if (!finite(r.before) || !finite(r.after) ||
        !hashes_match(*problem_, certificate_.digests, r)) {
      auto v = fail(FailReason::InvalidWeights, r.stage, request_);
      v.single_probes = probes;
      verdicts_.clear();
      finish(std::move(v));
      return verdicts_;
    }
    verdicts_.push_back(probe_stage_full(*problem_, r.before, r.after, r.stage,
                                         verifier_coin(verifier_secret_, r.stage)));
    ++probes;
  }
  nlohmann::json posted = nlohmann::json::array();
  for (const auto& v : verdicts_) {
    posted.push_back({{"stage", v.stage}, {"V", static_cast<int>(v.reported)}});
  }
  state_ = State::VerdictsPosted;
  transcript_.push_back({{"type", "verdicts"}, {"V", std::move(posted)}});
  return verdicts_;
}

const Verdict& ProtocolSession::reveal_flag_plan(std::span<const std::size_t> sigma) {
  expect(State::VerdictsPosted, "reveal_flag_plan");
  transcript_.push_back({{"type", "flag_plan"}, {"sigma", std::vector<std::size_t>(sigma.begin(), sigma.end())}});
  state_ = State::FlagPlanRevealed;

  std::size_t single = 0;
  std::size_t dbl = 0;
  for (const auto& v : verdicts_) (v.retrains == 1 ? single : dbl)++;

  auto failed = [&](FailReason reason, std::optional<std::size_t> stage) {
    auto v = fail(reason, stage, request_);
    v.single_probes = single;
    v.double_probes = dbl;
    finish(std::move(v));
  };

  if (sigma.size() != problem_->stages() || hash_permutation(sigma) != certificate_.commitment) {
    failed(FailReason::InvalidFlagCommitment, std::nullopt);
    return verdict_;
  }
  Verdict ok;
  ok.t_ve = request_.stages;
  for (const auto& v : verdicts_) {
    SeedVariant expected = stage_variant(sigma, v.stage, flag_count_);
    if (v.reported != expected) {
      failed(FailReason::ErrorInStage, v.stage);
      return verdict_;
    }
    if (expected != SeedVariant::Normal) ok.flags_found.push_back(v.stage);
  }
  ok.success = true;
  ok.u = ok.flags_found.size();
  ok.single_probes = single;
  ok.double_probes = dbl;
  finish(std::move(ok));
  return verdict_;
}

const Verdict& ProtocolSession::verdict() const {
  if (state_ != State::Final) throw ProtocolError("no verdict before the session is final");
  return verdict_;
}

Verdict verify_full(ProtocolSession& session, std::vector<RevealedStage> revealed,
                    std::span<const std::size_t> sigma) {
  session.reveal_weights(std::move(revealed));
  session.post_verdicts();
  if (session.finished()) return session.verdict();
  return session.reveal_flag_plan(sigma);
}

Verdict run_full_protocol(const Problem& problem, const FullProof& proof, double eta_flag,
                          std::size_t alpha, const Seed& verifier_secret,
                          nlohmann::json* transcript) {
  ProtocolSession session(problem, proof.certificate, eta_flag);
  const auto& request = session.request_stages(alpha, verifier_secret);
  Verdict v = verify_full(session, reveal_stages(proof.checkpoints, request), proof.plan.sigma);
  if (transcript) *transcript = session.transcript();
  return v;
}

double verifier_reward(std::int64_t u, std::int64_t dishonest, double r0, double r1) {
  if (u < 0 || dishonest < 0) throw std::invalid_argument("verifier_reward: negative count");
  return (dishonest > 0 ? r0 : 0.0) + r1 * static_cast<double>(u);
}

double verification_cost(std::int64_t single_probed, std::int64_t double_probed, double total_cost,
                         std::size_t stages) {
  if (single_probed < 0 || double_probed < 0) {
    throw std::invalid_argument("verification_cost: negative count");
  }
  if (stages == 0) throw std::invalid_argument("verification_cost: T must be positive");
  return static_cast<double>(single_probed + 2 * double_probed) * total_cost /
         static_cast<double>(stages);
}

}  // namespace pol
