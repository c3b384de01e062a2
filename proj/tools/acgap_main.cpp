#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "acgap/experiment.hpp"
#include "acgap/gradients.hpp"
#include "acgap/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;

std::vector<std::filesystem::path> expand_trace_paths(const std::vector<std::string>& inputs) {
  std::vector<std::filesystem::path> files;
  for (const auto& input : inputs) {
    const std::filesystem::path path(input);
    if (std::filesystem::is_directory(path)) {
      for (const auto& entry : std::filesystem::directory_iterator(path)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.find("_seed_") != std::string::npos &&
            entry.path().extension() == ".csv")
          files.push_back(entry.path());
      }
    } else {
      files.push_back(path);
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact tabular laboratory for actor-critic vs policy-gradient updates"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "Run a DP or sample-based experiment from a config file");
  std::string config_path;
  std::string out_override;
  std::vector<std::uint64_t> seed_override;
  int jobs_override = 0;
  run->add_option("--config", config_path, "Experiment config JSON")->required();
  run->add_option("--out", out_override, "Output directory (overrides config)");
  run->add_option("--seeds", seed_override, "Seeds (overrides config)")->delimiter(',');
  run->add_option("--jobs", jobs_override, "Parallel (agent, seed) workers");

  // --- verify ---
  auto* verify = app.add_subcommand("verify", "Run the identity/oracle certification suite");
  int instances = 100;
  std::uint64_t base_seed = 20240001ULL;
  std::string report_path;
  std::vector<int> states{2, 3, 4, 6};
  std::vector<int> actions{2, 3};
  std::vector<double> gammas{0.5, 0.9, 0.99};
  verify->add_option("--instances", instances, "Number of seeded instances");
  verify->add_option("--base-seed", base_seed, "Base seed for the instance family");
  verify->add_option("--out", report_path, "Write the JSON report here");
  verify->add_option("--states", states, "State-space sizes to cycle")->delimiter(',');
  verify->add_option("--actions", actions, "Action-space sizes to cycle")->delimiter(',');
  verify->add_option("--gammas", gammas, "Discount factors to cycle")->delimiter(',');
  std::string gradient_report_path;
  int gradient_report_instance = 0;
  verify->add_option("--dump-gradient-report", gradient_report_path,
                     "Write the gradient report of one family instance as JSON");
  verify->add_option("--dump-instance", gradient_report_instance,
                     "Instance index for --dump-gradient-report");

  // --- summarize ---
  auto* summarize_cmd = app.add_subcommand("summarize", "Summarize trace CSVs");
  std::vector<std::string> trace_inputs;
  double threshold_frac = 0.9;
  double jstar = -1.0;
  bool jstar_fourroom = false;
  summarize_cmd->add_option("--traces", trace_inputs, "Trace files or a directory")->required();
  summarize_cmd->add_option("--threshold-frac", threshold_frac,
                            "Fraction of the reference objective");
  summarize_cmd->add_option("--jstar", jstar, "Reference objective (defaults to own final mean)");
  summarize_cmd->add_flag("--jstar-fourroom", jstar_fourroom,
                          "Use the optimal objective of the standard four-room task");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::ifstream in(config_path);
      if (!in) throw acgap::ConfigError("cannot open config: " + config_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw acgap::ConfigError(std::string("config parse error: ") + e.what());
      }
      acgap::ExperimentConfig config = acgap::ExperimentConfig::from_json(j);
      if (!out_override.empty()) config.out_dir = out_override;
      if (!seed_override.empty()) config.seeds = seed_override;
      if (jobs_override > 0) config.jobs = jobs_override;
      const acgap::ExperimentOutputs outputs = acgap::run_experiment(config);
      std::cout << "wrote " << outputs.trace_files.size() << " trace file(s), "
                << outputs.aggregate_files.size() << " aggregate file(s), manifest "
                << outputs.manifest.string() << "\n";
      if (config.mode == acgap::ExperimentConfig::Mode::Verify && !outputs.verify_passed)
        return kExitVerifyFailure;
      return kExitOk;
    }

    if (*verify) {
      acgap::InstanceFamily family;
      family.instances = instances;
      family.base_seed = base_seed;
      family.state_sizes = states;
      family.action_sizes = actions;
      family.gammas = gammas;
      const acgap::VerificationReport report = acgap::verify_all(family, acgap::Tolerances{});
      report.print(std::cout);
      if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << report.to_json().dump(2) << '\n';
      }
      if (!gradient_report_path.empty()) {
        const acgap::VerifyInstance in =
            acgap::make_instance(family, gradient_report_instance);
        std::ofstream out(gradient_report_path);
        out << acgap::gradient_report_to_json(
                   acgap::compute_gradient_report(in.mdp, in.policy, in.critic))
                   .dump(2)
            << '\n';
      }
      return report.all_pass() ? kExitOk : kExitVerifyFailure;
    }

    if (*summarize_cmd) {
      std::optional<double> reference;
      if (jstar_fourroom)
        reference = acgap::optimal_objective(acgap::fourroom_mdp(acgap::FourRoomSpec::standard()));
      else if (jstar >= 0.0)
        reference = jstar;
      const auto rows =
          acgap::summarize(expand_trace_paths(trace_inputs), threshold_frac, reference);
      std::cout << acgap::format_summary(rows);
      return kExitOk;
    }
  } catch (const acgap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}
