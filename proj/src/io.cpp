#include "pol/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace pol {

json schema_versions() {
  return {{"problem", "pol.problem/1"},       {"dataset", "pol.dataset/1"},
          {"certificate", "pol.certificate/1"}, {"checkpoints", "pol.checkpoints/1"},
          {"flag_plan", "pol.flag_plan/1"},   {"verdict", "pol.verdict/1"},
          {"transcript", "pol.transcript/1"}, {"analysis", "pol.analysis/1"},
          {"simulation", "pol.simulation/1"}};
}

json dataset_to_json(const Dataset& data) {
  json x = json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto row = data.row(i);
    x.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"d", data.dim()}, {"n", data.size()}, {"x", std::move(x)}, {"y", data.targets()}};
}

Dataset dataset_from_json(const json& j) {
  auto d = j.at("d").get<std::size_t>();
  auto n = j.at("n").get<std::size_t>();
  const auto& rows = j.at("x");
  auto y = j.at("y").get<std::vector<double>>();
  if (rows.size() != n || y.size() != n) {
    throw std::invalid_argument("dataset: x and y must have n = " + std::to_string(n) + " rows");
  }
  std::vector<double> x;
  x.reserve(n * d);
  for (const auto& row : rows) {
    auto values = row.get<std::vector<double>>();
    if (values.size() != d) throw std::invalid_argument("dataset: row of wrong dimension");
    x.insert(x.end(), values.begin(), values.end());
  }
  return Dataset(d, std::move(x), std::move(y));
}

json hyper_to_json(const Hyper& h) {
  return {{"learning_rate", h.learning_rate}, {"batch_size", h.batch_size},
          {"epochs", h.epochs},               {"epochs_per_stage", h.epochs_per_stage},
          {"model", "linear"},                {"loss", "half_squared"},
          {"init", "zeros"}};
}

Hyper hyper_from_json(const json& j) {
  Hyper h;
  h.learning_rate = j.at("learning_rate").get<double>();
  h.batch_size = j.at("batch_size").get<std::size_t>();
  h.epochs = j.at("epochs").get<std::size_t>();
  h.epochs_per_stage = j.at("epochs_per_stage").get<std::size_t>();
  if (j.value("model", "linear") != "linear") throw std::invalid_argument("unsupported model");
  if (j.value("loss", "half_squared") != "half_squared") {
    throw std::invalid_argument("unsupported loss");
  }
  if (j.value("init", "zeros") != "zeros") throw std::invalid_argument("unsupported init rule");
  return h;
}

json problem_to_json(const Problem& p) {
  return {{"schema", "pol.problem/1"},
          {"dataset", dataset_to_json(p.data)},
          {"env", hyper_to_json(p.env)},
          {"root_seed", p.root_seed.hex()}};
}

Problem problem_from_json(const json& j) {
  Problem p{dataset_from_json(j.at("dataset")), hyper_from_json(j.at("env")),
            Seed::from_hex(j.at("root_seed").get<std::string>())};
  p.validate();
  return p;
}

json digests_to_json(const std::vector<Digest>& digests) {
  json out = json::array();
  for (const auto& d : digests) out.push_back(to_hex(d));
  return out;
}

std::vector<Digest> digests_from_json(const json& j) {
  std::vector<Digest> out;
  for (const auto& h : j) out.push_back(digest_from_hex(h.get<std::string>()));
  return out;
}

FullCertificate CertificateFile::full() const {
  if (!commitment) throw std::invalid_argument("certificate has no flag commitment (H is null)");
  return {digests, *commitment};
}

json certificate_to_json(const BasicCertificate& cert) {
  return {{"T", cert.digests.size()}, {"c", digests_to_json(cert.digests)}, {"H", nullptr}};
}

json certificate_to_json(const FullCertificate& cert) {
  return {{"T", cert.digests.size()},
          {"c", digests_to_json(cert.digests)},
          {"H", to_hex(cert.commitment)}};
}

CertificateFile certificate_from_json(const json& j) {
  CertificateFile f;
  f.digests = digests_from_json(j.at("c"));
  if (j.at("T").get<std::size_t>() != f.digests.size()) {
    throw std::invalid_argument("certificate: T does not match the number of digests");
  }
  if (j.contains("H") && !j.at("H").is_null()) {
    f.commitment = digest_from_hex(j.at("H").get<std::string>());
  }
  return f;
}

json flag_plan_to_json(const FlagPlan& plan) {
  return {{"T", plan.stages()},
          {"flag_count", plan.flag_count},
          {"sigma", plan.sigma},
          {"prover_secret", plan.prover_secret.hex()}};
}

FlagPlan flag_plan_from_json(const json& j) {
  FlagPlan plan;
  plan.sigma = j.at("sigma").get<std::vector<std::size_t>>();
  plan.flag_count = j.at("flag_count").get<std::size_t>();
  plan.prover_secret = Seed::from_hex(j.at("prover_secret").get<std::string>());
  if (j.at("T").get<std::size_t>() != plan.sigma.size()) {
    throw std::invalid_argument("flag plan: T does not match sigma");
  }
  return plan;
}

json verdict_to_json(const Verdict& v) {
  json j = {{"outcome", v.success ? "Success" : "Fail"},
            {"t_ve", v.t_ve},
            {"flags_found", v.flags_found},
            {"u", v.u},
            {"D", v.D},
            {"cost", v.cost()}};
  if (v.reason) j["reason"] = to_string(*v.reason);
  if (v.failed_stage) j["stage"] = *v.failed_stage;
  return j;
}

json competition_to_json(const Competition& comp) {
  const auto& f = comp.family();
  if (std::holds_alternative<Competition::ConstantOne>(f)) return {{"family", "constant"}};
  if (const auto* e = std::get_if<Competition::ExponentialHazard>(&f)) {
    return {{"family", "exponential"}, {"lambda", e->lambda}};
  }
  json knots = json::array();
  for (const auto& [r, p] : std::get<Competition::Table>(f).knots) knots.push_back({r, p});
  return {{"family", "table"}, {"knots", knots}};
}

Competition competition_from_json(const json& j) {
  auto family = j.at("family").get<std::string>();
  if (family == "constant") return Competition::constant_one();
  if (family == "exponential") return Competition::exponential(j.at("lambda").get<double>());
  if (family == "table") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : j.at("knots")) knots.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
    return Competition::table(std::move(knots));
  }
  throw std::invalid_argument("unknown competition family '" + family + "'");
}

json params_to_json(const IncentiveParams& p) {
  return {{"M", p.total_cost},   {"R", p.reward},     {"gamma", p.penalty_ratio},
          {"kappa", p.kappa},    {"alpha", p.alpha},  {"T", p.stages},
          {"eta_flag", p.eta_flag}, {"R0", p.r0},     {"R1", p.r1},
          {"competition", competition_to_json(p.competition)}};
}

IncentiveParams params_from_json(const json& j, IncentiveParams p) {
  p.total_cost = j.value("M", p.total_cost);
  p.reward = j.value("R", p.reward);
  p.penalty_ratio = j.value("gamma", p.penalty_ratio);
  p.kappa = j.value("kappa", p.kappa);
  p.alpha = j.value("alpha", p.alpha);
  p.stages = j.value("T", p.stages);
  p.eta_flag = j.value("eta_flag", p.eta_flag);
  p.r0 = j.value("R0", p.r0);
  p.r1 = j.value("R1", p.r1);
  if (j.contains("competition")) p.competition = competition_from_json(j.at("competition"));
  return p;
}

std::string sim_report_csv(const SimReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "grid_value,mean_utility,std_error,detection_rate\n";
  for (const auto& p : report.points) {
    out << p.grid_value << ',' << p.mean_utility << ',' << p.std_error << ',' << p.detection_rate
        << '\n';
  }
  return out.str();
}

json sim_report_summary(const SimReport& report) {
  json points = json::array();
  for (const auto& p : report.points) {
    json pt = {{"grid_value", p.grid_value},       {"trials", p.trials},
               {"mean_utility", p.mean_utility},   {"std_error", p.std_error},
               {"detection_rate", p.detection_rate}, {"mean_alpha_prime", p.mean_alpha_prime},
               {"sd_alpha_prime", p.sd_alpha_prime}};
    points.push_back(std::move(pt));
  }
  json j = {{"schema", "pol.simulation/1"}, {"experiment", report.experiment}, {"points", points}};
  if (!report.points.empty()) {
    const auto& best = report.points[find_optimal(report)];
    j["optimal"] = {{"grid_value", best.grid_value}, {"mean_utility", best.mean_utility}};
  }
  return j;
}

json analysis_report(const IncentiveParams& p, double v_plus, double v_zero) {
  p.validate();
  IrReport ir = check_ir(p);
  VisReport vis = vis_check(p.alpha, p.stages, p.eta_flag, p.r1, p.total_cost);
  DilemmaThreshold dilemma = dilemma_epsilon_threshold(v_plus, v_zero, p.total_cost, p.stages);

  json report;
  report["schema"] = "pol.analysis/1";
  report["params"] = params_to_json(p);
  report["ir"] = {{"holds", ir.holds},
                  {"honest_utility", ir.honest_utility},
                  {"threshold_R", ir.threshold_feasible ? json(ir.threshold_reward) : json(nullptr)},
                  {"asymptotic_R", ir.asymptotic_reward}};
  report["bis"] = {{"min_alpha", min_alpha_bis(p)}};
  report["penalty"] = {{"gamma", p.penalty_ratio},
                       {"min_alpha", p.penalty_ratio > 0.0
                                         ? json(min_alpha_penalty(p, p.penalty_ratio))
                                         : json(nullptr)}};
  report["vis"] = {{"holds", vis.holds}, {"min_R1", vis.min_r1}, {"eta_lower", vis.eta_lower}};
  report["dilemma"] = {
      {"v_plus", v_plus},
      {"v_zero", v_zero},
      {"epsilon_threshold", dilemma.always_lazy ? json("always-lazy") : json(dilemma.epsilon)}};
  return report;
}

SimReport run_simulation_config(const json& cfg, std::optional<std::size_t> threads,
                                std::optional<std::size_t> trials) {
  auto experiment = cfg.at("experiment").get<std::string>();
  IncentiveParams params = params_from_json(cfg.value("params", json::object()));
  auto grid = cfg.at("grid").get<std::vector<std::size_t>>();

  SimOptions opt;
  opt.trials = cfg.value("trials", opt.trials);
  opt.threads = cfg.value("threads", opt.threads);
  if (cfg.contains("master_seed")) {
    const auto& s = cfg.at("master_seed");
    opt.master_seed = s.is_number() ? Seed::from_u64(s.get<std::uint64_t>())
                                    : Seed::parse(s.get<std::string>());
  }
  opt.allow_exceed_alpha = cfg.value("allow_exceed_alpha", false);
  opt.dishonest_stage_cost = cfg.value("dishonest_stage_cost", 0.0);
  if (threads) opt.threads = *threads;
  if (trials) opt.trials = *trials;

  if (experiment == "prover") return simulate_prover_utility(params, grid, opt);
  if (experiment == "verifier-constant") return simulate_verifier_constant(params, grid, opt);
  if (experiment == "verifier-greedy") return simulate_verifier_greedy(params, grid, opt);
  throw std::invalid_argument("unknown experiment '" + experiment + "'");
}

std::vector<std::uint8_t> encode_checkpoints(const CheckpointStore& store) {
  std::vector<std::uint8_t> out;
  append_le64(out, store.checkpoints.size());
  for (const auto& w : store.checkpoints) {
    auto bytes = serialize_weights(w);
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  return out;
}

CheckpointStore decode_checkpoints(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw std::invalid_argument("checkpoint file too short");
  std::uint64_t count = read_le64(bytes.first(8));
  auto body = bytes.subspan(8);
  if (count == 0 || body.size() % count != 0 || (body.size() / count) % 8 != 0) {
    throw std::invalid_argument("checkpoint file: body is not " + std::to_string(count) +
                                " equal-length weight records");
  }
  std::size_t record = body.size() / count;
  CheckpointStore store;
  for (std::uint64_t i = 0; i < count; ++i) {
    store.checkpoints.push_back(deserialize_weights(body.subspan(i * record, record)));
  }
  return store;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace pol
