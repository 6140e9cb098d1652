// pol: generate PoL problems, prove, verify, analyze incentives, simulate.

#include <cstdio>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pol/io.hpp"

namespace {

using namespace pol;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFail = 2;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// gen-problem ---------------------------------------------------------------

struct GenArgs {
  std::size_t dim = 8, samples = 128, batch = 16, epochs = 40, per_stage = 2;
  double learning_rate = 0.01, noise = 0.1;
  std::string data_seed = "1", root_seed = "2", out;
};

int run_gen(const GenArgs& a) {
  Hyper env;
  env.learning_rate = a.learning_rate;
  env.batch_size = a.batch;
  env.epochs = a.epochs;
  env.epochs_per_stage = a.per_stage;
  Problem p{make_synthetic_dataset(Seed::parse(a.data_seed), a.dim, a.samples, a.noise), env,
            Seed::parse(a.root_seed)};
  p.validate();
  emit(a.out, dump(problem_to_json(p)));
  return kExitOk;
}

// prove ---------------------------------------------------------------------

struct ProveArgs {
  std::string problem, mode = "full", prover_secret = "prover", cert, checkpoints, plan;
  double eta_flag = 0.2;
  std::vector<std::size_t> cheat_stages;
  std::string disguise = "as-normal", fabrication = "single-epoch";
};

int run_prove(const ProveArgs& a) {
  Problem problem = problem_from_json(read_json_file(a.problem));
  CheatSpec cheat;
  cheat.cheat_stages = a.cheat_stages;
  cheat.disguise = a.disguise == "as-flag" ? Disguise::AsFlag : Disguise::AsNormal;
  cheat.fabrication =
      a.fabrication == "reuse-previous" ? Fabrication::ReusePrevious : Fabrication::SingleEpoch;

  if (a.mode == "basic") {
    auto [cert, store] = generate_basic_cheating(problem, cheat);
    write_text_file(a.cert, dump(certificate_to_json(cert)));
    write_binary_file(a.checkpoints, encode_checkpoints(store));
    return kExitOk;
  }
  FullProof proof = generate_cheating(problem, a.eta_flag, Seed::parse(a.prover_secret), cheat);
  write_text_file(a.cert, dump(certificate_to_json(proof.certificate)));
  write_binary_file(a.checkpoints, encode_checkpoints(proof.checkpoints));
  if (a.plan.empty()) throw std::invalid_argument("full mode needs --plan to store the flag plan");
  write_text_file(a.plan, dump(flag_plan_to_json(proof.plan)));
  return kExitOk;
}

// verify --------------------------------------------------------------------

struct VerifyArgs {
  std::string problem, cert, checkpoints, plan, verifier_secret = "verifier", verdict, transcript;
  std::size_t alpha = 5;
  double eta_flag = 0.2;
};

int run_verify(const VerifyArgs& a) {
  Problem problem = problem_from_json(read_json_file(a.problem));
  CertificateFile file = certificate_from_json(read_json_file(a.cert));
  CheckpointStore store = decode_checkpoints(read_binary_file(a.checkpoints));
  Seed secret = Seed::parse(a.verifier_secret);

  Verdict verdict;
  json transcript = json::array();
  if (!file.commitment) {
    auto request = select_stages(problem.stages(), a.alpha, secret);
    auto revealed = reveal_stages(store, request);
    verdict = verify_basic(problem, file.basic(), revealed, request);
  } else {
    if (a.plan.empty()) throw std::invalid_argument("full certificate needs --plan");
    FullProof proof{file.full(), flag_plan_from_json(read_json_file(a.plan)), std::move(store)};
    verdict = run_full_protocol(problem, proof, a.eta_flag, a.alpha, secret, &transcript);
  }
  json out = verdict_to_json(verdict);
  out["schema"] = "pol.verdict/1";
  emit(a.verdict, dump(out));
  if (!a.transcript.empty()) {
    write_text_file(a.transcript, dump({{"schema", "pol.transcript/1"}, {"messages", transcript}}));
  }
  return verdict.success ? kExitOk : kExitFail;
}

// analyze -------------------------------------------------------------------

struct AnalyzeArgs {
  std::string config, out;
  std::optional<double> cost, reward, gamma, kappa, eta_flag, r0, r1, lambda;
  std::optional<std::size_t> alpha, stages;
  double v_plus = 0.0, v_zero = 0.0;
};

// Flags override values read from --config.
IncentiveParams analyze_params(const AnalyzeArgs& a) {
  IncentiveParams p;
  p.total_cost = 1e4;
  p.reward = 2e4;
  p.kappa = 0.5;
  p.alpha = 10;
  p.stages = 10000;
  p.competition = Competition::exponential(1.0);
  if (!a.config.empty()) p = params_from_json(read_json_file(a.config), p);
  if (a.cost) p.total_cost = *a.cost;
  if (a.reward) p.reward = *a.reward;
  if (a.gamma) p.penalty_ratio = *a.gamma;
  if (a.kappa) p.kappa = *a.kappa;
  if (a.eta_flag) p.eta_flag = *a.eta_flag;
  if (a.r0) p.r0 = *a.r0;
  if (a.r1) p.r1 = *a.r1;
  if (a.alpha) p.alpha = *a.alpha;
  if (a.stages) p.stages = *a.stages;
  if (a.lambda) p.competition = Competition::exponential(*a.lambda);
  return p;
}

int run_analyze(const AnalyzeArgs& a) {
  emit(a.out, dump(analysis_report(analyze_params(a), a.v_plus, a.v_zero)));
  return kExitOk;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::string config, csv, summary;
  std::optional<std::size_t> threads, trials;
};

int run_simulate(const SimulateArgs& a) {
  SimReport report = run_simulation_config(read_json_file(a.config), a.threads, a.trials);
  emit(a.csv, sim_report_csv(report));
  if (!a.summary.empty()) write_text_file(a.summary, dump(sim_report_summary(report)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof-of-Learning prover, verifier and incentive toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", [] { return dump(schema_versions()); });

  GenArgs gen;
  auto* g = app.add_subcommand("gen-problem", "Write a synthetic linear-regression PoL task");
  g->add_option("--dim", gen.dim, "Feature dimension d")->capture_default_str();
  g->add_option("--samples", gen.samples, "Dataset size n")->capture_default_str();
  g->add_option("--batch-size", gen.batch, "Batch size m")->capture_default_str();
  g->add_option("--epochs", gen.epochs, "Total epochs E")->capture_default_str();
  g->add_option("--epochs-per-stage", gen.per_stage, "Epochs per stage k")->capture_default_str();
  g->add_option("--learning-rate", gen.learning_rate)->capture_default_str();
  g->add_option("--noise", gen.noise, "Target noise standard deviation")->capture_default_str();
  g->add_option("--data-seed", gen.data_seed)->capture_default_str();
  g->add_option("--root-seed", gen.root_seed, "Seed s of the task")->capture_default_str();
  g->add_option("-o,--out", gen.out, "Output path (default stdout)");

  ProveArgs prove;
  auto* p = app.add_subcommand("prove", "Train and write certificate and checkpoints");
  p->add_option("--problem", prove.problem)->required()->check(CLI::ExistingFile);
  p->add_option("--mode", prove.mode)->check(CLI::IsMember({"basic", "full"}))->capture_default_str();
  p->add_option("--eta-flag", prove.eta_flag, "Flag fraction")->capture_default_str();
  p->add_option("--prover-secret", prove.prover_secret)->capture_default_str();
  p->add_option("--cert", prove.cert)->required();
  p->add_option("--checkpoints", prove.checkpoints)->required();
  p->add_option("--plan", prove.plan, "Flag plan output (full mode)");
  p->add_option("--cheat-stages", prove.cheat_stages, "Stages to fabricate")->delimiter(',');
  p->add_option("--disguise", prove.disguise)
      ->check(CLI::IsMember({"as-normal", "as-flag"}))
      ->capture_default_str();
  p->add_option("--fabrication", prove.fabrication)
      ->check(CLI::IsMember({"single-epoch", "reuse-previous"}))
      ->capture_default_str();

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Verify a certificate (exit 0 Success, 2 Fail)");
  v->add_option("--problem", verify.problem)->required()->check(CLI::ExistingFile);
  v->add_option("--cert", verify.cert)->required()->check(CLI::ExistingFile);
  v->add_option("--checkpoints", verify.checkpoints)->required()->check(CLI::ExistingFile);
  v->add_option("--plan", verify.plan, "Flag plan revealed by the prover")->check(CLI::ExistingFile);
  v->add_option("--alpha", verify.alpha, "Stages to verify")->capture_default_str();
  v->add_option("--eta-flag", verify.eta_flag)->capture_default_str();
  v->add_option("--verifier-secret", verify.verifier_secret)->capture_default_str();
  v->add_option("--verdict", verify.verdict, "Verdict output (default stdout)");
  v->add_option("--transcript", verify.transcript, "Protocol transcript output");

  AnalyzeArgs analyze;
  auto* a = app.add_subcommand("analyze", "Evaluate IR, BIS, VIS and dilemma thresholds");
  a->add_option("--config", analyze.config, "JSON params; flags take precedence")
      ->check(CLI::ExistingFile);
  a->add_option("--cost", analyze.cost, "M");
  a->add_option("--reward", analyze.reward, "R");
  a->add_option("--gamma", analyze.gamma);
  a->add_option("--kappa", analyze.kappa);
  a->add_option("--alpha", analyze.alpha);
  a->add_option("--stages", analyze.stages, "T");
  a->add_option("--eta-flag", analyze.eta_flag);
  a->add_option("--lambda", analyze.lambda, "Exponential hazard rate");
  a->add_option("--r0", analyze.r0);
  a->add_option("--r1", analyze.r1);
  a->add_option("--v-plus", analyze.v_plus)->capture_default_str();
  a->add_option("--v-zero", analyze.v_zero)->capture_default_str();
  a->add_option("-o,--out", analyze.out);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Monte-Carlo incentive experiments");
  s->add_option("--config", sim.config)->required()->check(CLI::ExistingFile);
  s->add_option("--threads", sim.threads);
  s->add_option("--trials", sim.trials);
  s->add_option("--csv", sim.csv, "CSV output (default stdout)");
  s->add_option("--summary", sim.summary, "JSON summary output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*g) return run_gen(gen);
    if (*p) return run_prove(prove);
    if (*v) return run_verify(verify);
    if (*a) return run_analyze(analyze);
    if (*s) return run_simulate(sim);
  } catch (const std::exception& e) {
    std::cerr << "pol: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
