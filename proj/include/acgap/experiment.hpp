#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "acgap/dp_agent.hpp"
#include "acgap/envs.hpp"
#include "acgap/mdp.hpp"
#include "acgap/sample_agent.hpp"
#include "acgap/verify.hpp"

namespace acgap {

inline constexpr const char* kVersion = "0.1.0";

// Invalid configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnvSpec {
  enum class Type { FourRoom, Random, File };
  Type type = Type::FourRoom;
  FourRoomSpec fourroom = FourRoomSpec::standard();
  int n_states = 4;  // Random
  int n_actions = 3;
  double gamma = 0.9;
  double reward_scale = 1.0;
  std::uint64_t mdp_seed = 0;
  std::string path;  // File

  TabularMdp build() const;
  nlohmann::json to_json() const;
  static EnvSpec from_json(const nlohmann::json& j);
};

struct AgentSpec {
  std::string name;
  bool is_dp = false;
  DpAgentConfig dp;
  SampleAgentConfig sample;

  nlohmann::json to_json() const;
};

struct ExperimentConfig {
  enum class Mode { Dp, Sample, Verify };
  Mode mode = Mode::Sample;
  EnvSpec env;
  std::vector<AgentSpec> agents;
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "results";
  int jobs = 1;
  InstanceFamily verify_family;  // Mode::Verify only

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;  // fully resolved (defaults filled in)

  void validate() const;
};

struct ExperimentOutputs {
  std::vector<std::filesystem::path> trace_files;
  std::vector<std::filesystem::path> aggregate_files;
  std::filesystem::path manifest;
  bool verify_passed = true;  // meaningful for Mode::Verify
};

// Runs every (agent, seed) pair (in parallel up to config.jobs), writes one
// trace CSV per pair, one aggregate CSV per agent, and a manifest JSON with
// the fully resolved configuration. Reruns with identical config and seeds
// produce byte-identical files.
ExperimentOutputs run_experiment(const ExperimentConfig& config);

struct SummaryRow {
  std::string agent;
  double final_mean = 0.0;
  double final_std = 0.0;
  double reference = 0.0;            // threshold_frac * (jstar or own final mean)
  double steps_to_threshold = -1.0;  // -1 when the threshold is never reached
};

// Group per-seed trace files by agent (pattern <agent>_seed_<n>.csv), then
// report final mean +- std of the exact objective and the first step count
// at which the seed-mean curve reaches threshold_frac of the reference
// (jstar when given, otherwise each agent's own final mean).
std::vector<SummaryRow> summarize(const std::vector<std::filesystem::path>& trace_files,
                                  double threshold_frac, std::optional<double> jstar);

std::string format_summary(const std::vector<SummaryRow>& rows);

}  // namespace acgap
