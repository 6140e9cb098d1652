#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pol/io.hpp"

namespace py = pybind11;
using namespace pol;

namespace {

std::string dumps(const json& j) { return j.dump(); }

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
  std::string s = b;
  return {s.begin(), s.end()};
}

Disguise parse_disguise(const std::string& s) {
  if (s == "as-normal") return Disguise::AsNormal;
  if (s == "as-flag") return Disguise::AsFlag;
  throw std::invalid_argument("disguise must be 'as-normal' or 'as-flag'");
}

std::string make_problem(std::size_t dim, std::size_t samples, std::size_t batch_size,
                         std::size_t epochs, std::size_t epochs_per_stage, double learning_rate,
                         double noise, const std::string& data_seed, const std::string& root_seed) {
  Hyper env;
  env.learning_rate = learning_rate;
  env.batch_size = batch_size;
  env.epochs = epochs;
  env.epochs_per_stage = epochs_per_stage;
  Problem p{make_synthetic_dataset(Seed::parse(data_seed), dim, samples, noise), env,
            Seed::parse(root_seed)};
  p.validate();
  return dumps(problem_to_json(p));
}

// Returns (certificate json, flag plan json or None, checkpoint bytes).
py::tuple prove(const std::string& problem_json, const std::string& mode, double eta_flag,
                const std::string& prover_secret, std::vector<std::size_t> cheat_stages,
                const std::string& disguise) {
  Problem problem = problem_from_json(json::parse(problem_json));
  CheatSpec cheat{std::move(cheat_stages), parse_disguise(disguise), Fabrication::SingleEpoch};
  if (mode == "basic") {
    auto [cert, store] = generate_basic_cheating(problem, cheat);
    return py::make_tuple(dumps(certificate_to_json(cert)), py::none(),
                          to_bytes(encode_checkpoints(store)));
  }
  if (mode != "full") throw std::invalid_argument("mode must be 'basic' or 'full'");
  auto proof = generate_cheating(problem, eta_flag, Seed::parse(prover_secret), cheat);
  return py::make_tuple(dumps(certificate_to_json(proof.certificate)),
                        dumps(flag_plan_to_json(proof.plan)),
                        to_bytes(encode_checkpoints(proof.checkpoints)));
}

std::string verify(const std::string& problem_json, const std::string& cert_json,
                   const py::bytes& checkpoints, const std::optional<std::string>& plan_json,
                   std::size_t alpha, double eta_flag, const std::string& verifier_secret) {
  Problem problem = problem_from_json(json::parse(problem_json));
  CertificateFile file = certificate_from_json(json::parse(cert_json));
  CheckpointStore store = decode_checkpoints(from_bytes(checkpoints));
  Seed secret = Seed::parse(verifier_secret);
  Verdict v;
  if (!file.commitment) {
    auto request = select_stages(problem.stages(), alpha, secret);
    v = verify_basic(problem, file.basic(), reveal_stages(store, request), request);
  } else {
    if (!plan_json) throw std::invalid_argument("full certificate needs the flag plan");
    FullProof proof{file.full(), flag_plan_from_json(json::parse(*plan_json)), std::move(store)};
    v = run_full_protocol(problem, proof, eta_flag, alpha, secret);
  }
  return dumps(verdict_to_json(v));
}

IncentiveParams params_from(const std::string& params_json) {
  auto p = params_from_json(json::parse(params_json));
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_pol, m) {
  m.doc() = "Proof-of-Learning core: deterministic training, certificates, verification, "
            "incentive analysis and Monte-Carlo experiments.";

  m.def("schema_versions", [] { return dumps(schema_versions()); });
  m.def("seed_hex", [](const std::string& text) { return Seed::parse(text).hex(); },
        py::arg("text"));
  m.def("stage_seed_hex",
        [](const std::string& root, std::uint64_t stage, int variant) {
          if (variant < 0 || variant > 2) throw std::invalid_argument("variant must be 0, 1 or 2");
          return derive_stage_seed(Seed::parse(root), stage, static_cast<SeedVariant>(variant))
              .hex();
        },
        py::arg("root"), py::arg("stage"), py::arg("variant") = 0);
  m.def("shuffle", [](const std::string& seed, std::size_t n) { return shuffle(Seed::parse(seed), n); },
        py::arg("seed"), py::arg("n"));
  m.def("sample_without_replacement",
        [](const std::string& seed, std::size_t population, std::size_t count) {
          return sample_without_replacement(Seed::parse(seed), population, count);
        },
        py::arg("seed"), py::arg("population"), py::arg("count"));

  m.def("make_problem", &make_problem, py::arg("dim") = 8, py::arg("samples") = 128,
        py::arg("batch_size") = 16, py::arg("epochs") = 40, py::arg("epochs_per_stage") = 2,
        py::arg("learning_rate") = 0.01, py::arg("noise") = 0.1, py::arg("data_seed") = "1",
        py::arg("root_seed") = "2");
  m.def("prove", &prove, py::arg("problem"), py::arg("mode") = "full", py::arg("eta_flag") = 0.2,
        py::arg("prover_secret") = "prover", py::arg("cheat_stages") = std::vector<std::size_t>{},
        py::arg("disguise") = "as-normal");
  m.def("verify", &verify, py::arg("problem"), py::arg("certificate"), py::arg("checkpoints"),
        py::arg("plan") = py::none(), py::arg("alpha") = 5, py::arg("eta_flag") = 0.2,
        py::arg("verifier_secret") = "verifier");

  m.def("pass_prob_exact", &pass_prob_exact, py::arg("cheats"), py::arg("stages"),
        py::arg("alpha"), py::arg("kappa"));
  m.def("pass_prob_bound", &pass_prob_bound, py::arg("rho"), py::arg("alpha"), py::arg("kappa"));
  m.def("prover_utility",
        [](const std::string& params, double rho, const std::string& mode) {
          if (mode != "exact" && mode != "bound") throw std::invalid_argument("mode: exact|bound");
          return prover_utility(params_from(params), rho,
                                mode == "exact" ? PassMode::Exact : PassMode::Bound);
        },
        py::arg("params"), py::arg("rho"), py::arg("mode") = "exact");
  m.def("sunk_cost_mu",
        [](const std::string& competition, double rho, double total_cost) {
          return sunk_cost_mu(competition_from_json(json::parse(competition)), rho, total_cost);
        },
        py::arg("competition"), py::arg("rho"), py::arg("total_cost"));
  m.def("min_alpha_bis", py::overload_cast<double, double, double, std::size_t>(&min_alpha_bis),
        py::arg("beta"), py::arg("lam"), py::arg("kappa"), py::arg("stages"));
  m.def("min_alpha_penalty",
        py::overload_cast<double, double, double, double>(&min_alpha_penalty), py::arg("beta"),
        py::arg("gamma"), py::arg("kappa"), py::arg("lam"));
  m.def("analyze",
        [](const std::string& params, double v_plus, double v_zero) {
          return dumps(analysis_report(params_from(params), v_plus, v_zero));
        },
        py::arg("params"), py::arg("v_plus") = 0.0, py::arg("v_zero") = 0.0);
  m.def("detection_rate",
        [](std::size_t cheats, std::size_t stages, std::size_t alpha, double kappa,
           std::size_t trials, const std::string& seed) {
          auto r = detection_rate(cheats, stages, alpha, kappa, trials, Seed::parse(seed));
          return py::make_tuple(r.empirical, r.analytic, r.std_error);
        },
        py::arg("cheats"), py::arg("stages"), py::arg("alpha"), py::arg("kappa"),
        py::arg("trials"), py::arg("seed") = "0");
  m.def("simulate",
        [](const std::string& config, std::optional<std::size_t> threads) {
          SimReport r;
          {
            py::gil_scoped_release release;
            r = run_simulation_config(json::parse(config), threads);
          }
          return py::make_tuple(dumps(sim_report_summary(r)), sim_report_csv(r));
        },
        py::arg("config"), py::arg("threads") = py::none());
}
