#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pol/certificate.hpp"
#include "pol/incentives.hpp"
#include "pol/simulation.hpp"
#include "pol/verification.hpp"

namespace pol {

using nlohmann::json;

/// Schema identifiers of every file format, printed by `pol --version`.
json schema_versions();

json dataset_to_json(const Dataset& data);
Dataset dataset_from_json(const json& j);

json hyper_to_json(const Hyper& hyper);
Hyper hyper_from_json(const json& j);

json problem_to_json(const Problem& problem);
Problem problem_from_json(const json& j);

json digests_to_json(const std::vector<Digest>& digests);
std::vector<Digest> digests_from_json(const json& j);

/// {T, c: [hex], H: hex | null}. Basic certificates carry H = null.
struct CertificateFile {
  std::vector<Digest> digests;
  std::optional<Digest> commitment;

  BasicCertificate basic() const { return {digests}; }
  FullCertificate full() const;
};
json certificate_to_json(const BasicCertificate& cert);
json certificate_to_json(const FullCertificate& cert);
CertificateFile certificate_from_json(const json& j);

json flag_plan_to_json(const FlagPlan& plan);
FlagPlan flag_plan_from_json(const json& j);

json verdict_to_json(const Verdict& verdict);

json competition_to_json(const Competition& comp);
Competition competition_from_json(const json& j);
json params_to_json(const IncentiveParams& params);
/// Missing keys keep the values already in `base`.
IncentiveParams params_from_json(const json& j, IncentiveParams base = {});

/// CSV with columns grid_value,mean_utility,std_error,detection_rate.
std::string sim_report_csv(const SimReport& report);
json sim_report_summary(const SimReport& report);

/// {ir, bis, penalty, vis, dilemma} report of the analyze command.
json analysis_report(const IncentiveParams& params, double v_plus, double v_zero);

/// Runs {experiment, params, grid, trials, master_seed, ...}. Overrides win
/// over config values when set.
SimReport run_simulation_config(const json& config, std::optional<std::size_t> threads = {},
                                std::optional<std::size_t> trials = {});

/// 8-byte LE record count, then each checkpoint in canonical weight bytes.
std::vector<std::uint8_t> encode_checkpoints(const CheckpointStore& store);
CheckpointStore decode_checkpoints(std::span<const std::uint8_t> bytes);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace pol
