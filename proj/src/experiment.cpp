#include "acgap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace acgap {

namespace {

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "sgd") return OptimizerKind::Sgd;
  throw ConfigError("unknown optimizer: " + name);
}

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::Adam ? "adam" : "sgd";
}

SampleAgentConfig sample_config_from_json(const nlohmann::json& j) {
  SampleAgentConfig c;
  c.algorithm = sample_algorithm_from_string(j.value("algorithm", std::string("res_ac")));
  c.episodes = j.value("episodes", c.episodes);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.episode_length = j.value("episode_length", c.episode_length);
  c.actor_lr = j.value("actor_lr", c.actor_lr);
  c.critic_lr = j.value("critic_lr", c.critic_lr);
  c.res_critic_lr = j.value("res_critic_lr", c.res_critic_lr);
  c.eta = j.value("eta", c.eta);
  if (j.contains("clip_c") && !j.at("clip_c").is_null()) c.clip_c = j.at("clip_c").get<double>();
  c.critic_steps = j.value("critic_steps", c.critic_steps);
  c.res_critic_steps = j.value("res_critic_steps", c.res_critic_steps);
  c.optimizer = optimizer_from_string(j.value("optimizer", std::string("adam")));
  c.logit_init_scale = j.value("logit_init_scale", c.logit_init_scale);
  c.value_init_scale = j.value("value_init_scale", c.value_init_scale);
  return c;
}

nlohmann::json sample_config_to_json(const SampleAgentConfig& c) {
  nlohmann::json j;
  j["algorithm"] = to_string(c.algorithm);
  j["episodes"] = c.episodes;
  j["batch_size"] = c.batch_size;
  j["episode_length"] = c.episode_length;
  j["actor_lr"] = c.actor_lr;
  j["critic_lr"] = c.critic_lr;
  j["res_critic_lr"] = c.res_critic_lr;
  j["eta"] = c.eta;
  j["clip_c"] = c.clip_c ? nlohmann::json(*c.clip_c) : nlohmann::json(nullptr);
  j["critic_steps"] = c.critic_steps;
  j["res_critic_steps"] = c.res_critic_steps;
  j["optimizer"] = to_string(c.optimizer);
  j["logit_init_scale"] = c.logit_init_scale;
  j["value_init_scale"] = c.value_init_scale;
  return j;
}

DpAgentConfig dp_config_from_json(const nlohmann::json& j) {
  DpAgentConfig c;
  c.actor_rule = actor_rule_from_string(j.value("actor_rule", std::string("pg")));
  c.critic_rule = critic_rule_from_string(j.value("critic_rule", std::string("exact")));
  c.res_critic_rule = critic_rule_from_string(j.value("res_critic_rule", std::string("td")));
  c.actor_lr = j.value("actor_lr", c.actor_lr);
  c.critic_lr = j.value("critic_lr", c.critic_lr);
  c.res_critic_lr = j.value("res_critic_lr", c.res_critic_lr);
  c.iterations = j.value("iterations", c.iterations);
  c.eta = j.value("eta", c.eta);
  c.critic_steps = j.value("critic_steps", c.critic_steps);
  c.res_critic_steps = j.value("res_critic_steps", c.res_critic_steps);
  c.optimizer = optimizer_from_string(j.value("optimizer", std::string("adam")));
  c.logit_init_scale = j.value("logit_init_scale", c.logit_init_scale);
  c.value_init_scale = j.value("value_init_scale", c.value_init_scale);
  return c;
}

nlohmann::json dp_config_to_json(const DpAgentConfig& c) {
  nlohmann::json j;
  j["actor_rule"] = to_string(c.actor_rule);
  j["critic_rule"] = to_string(c.critic_rule);
  j["res_critic_rule"] = to_string(c.res_critic_rule);
  j["actor_lr"] = c.actor_lr;
  j["critic_lr"] = c.critic_lr;
  j["res_critic_lr"] = c.res_critic_lr;
  j["iterations"] = c.iterations;
  j["eta"] = c.eta;
  j["critic_steps"] = c.critic_steps;
  j["res_critic_steps"] = c.res_critic_steps;
  j["optimizer"] = to_string(c.optimizer);
  j["logit_init_scale"] = c.logit_init_scale;
  j["value_init_scale"] = c.value_init_scale;
  return j;
}

}  // namespace

TabularMdp EnvSpec::build() const {
  switch (type) {
    case Type::FourRoom: return fourroom_mdp(fourroom);
    case Type::Random: return random_mdp(n_states, n_actions, mdp_seed, reward_scale, gamma);
    case Type::File: return load_mdp(path);
  }
  throw ConfigError("unknown env type");
}

nlohmann::json EnvSpec::to_json() const {
  nlohmann::json j;
  switch (type) {
    case Type::FourRoom:
      j["type"] = "fourroom";
      j["spec"] = fourroom_spec_to_json(fourroom);
      break;
    case Type::Random:
      j["type"] = "random";
      j["n_states"] = n_states;
      j["n_actions"] = n_actions;
      j["gamma"] = gamma;
      j["reward_scale"] = reward_scale;
      j["seed"] = mdp_seed;
      break;
    case Type::File:
      j["type"] = "file";
      j["path"] = path;
      break;
  }
  return j;
}

EnvSpec EnvSpec::from_json(const nlohmann::json& j) {
  EnvSpec spec;
  const std::string type = j.value("type", std::string("fourroom"));
  if (type == "fourroom") {
    spec.type = Type::FourRoom;
    if (j.contains("spec")) spec.fourroom = fourroom_spec_from_json(j.at("spec"));
  } else if (type == "random") {
    spec.type = Type::Random;
    spec.n_states = j.value("n_states", spec.n_states);
    spec.n_actions = j.value("n_actions", spec.n_actions);
    spec.gamma = j.value("gamma", spec.gamma);
    spec.reward_scale = j.value("reward_scale", spec.reward_scale);
    spec.mdp_seed = j.value("seed", spec.mdp_seed);
  } else if (type == "file") {
    spec.type = Type::File;
    if (!j.contains("path")) throw ConfigError("env type 'file' requires a path");
    spec.path = j.at("path").get<std::string>();
  } else {
    throw ConfigError("unknown env type: " + type);
  }
  return spec;
}

nlohmann::json AgentSpec::to_json() const {
  nlohmann::json j = is_dp ? dp_config_to_json(dp) : sample_config_to_json(sample);
  j["name"] = name;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  const std::string mode = j.value("mode", std::string("sample"));
  if (mode == "dp")
    config.mode = Mode::Dp;
  else if (mode == "sample")
    config.mode = Mode::Sample;
  else if (mode == "verify")
    config.mode = Mode::Verify;
  else
    throw ConfigError("unknown mode: " + mode);

  if (j.contains("env")) config.env = EnvSpec::from_json(j.at("env"));
  if (j.contains("seeds")) config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  config.out_dir = j.value("out_dir", config.out_dir);
  config.jobs = j.value("jobs", config.jobs);

  if (config.mode == Mode::Verify) {
    if (j.contains("verify")) {
      const auto& v = j.at("verify");
      config.verify_family.instances = v.value("instances", config.verify_family.instances);
      config.verify_family.base_seed = v.value("base_seed", config.verify_family.base_seed);
    }
    return config;
  }

  if (!j.contains("agents") || !j.at("agents").is_array() || j.at("agents").empty())
    throw ConfigError("config requires a nonempty 'agents' array");
  for (const auto& a : j.at("agents")) {
    AgentSpec spec;
    spec.is_dp = config.mode == Mode::Dp;
    try {
      if (spec.is_dp) {
        spec.dp = dp_config_from_json(a);
        spec.name = a.value("name", to_string(spec.dp.actor_rule));
        spec.dp.validate();
      } else {
        spec.sample = sample_config_from_json(a);
        spec.name = a.value("name", to_string(spec.sample.algorithm));
        spec.sample.validate();
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid agent config: ") + e.what());
    }
    config.agents.push_back(std::move(spec));
  }
  config.validate();
  return config;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["mode"] = mode == Mode::Dp ? "dp" : (mode == Mode::Sample ? "sample" : "verify");
  j["env"] = env.to_json();
  j["seeds"] = seeds;
  j["out_dir"] = out_dir;
  j["jobs"] = jobs;
  if (mode == Mode::Verify) {
    j["verify"] = {{"instances", verify_family.instances},
                   {"base_seed", verify_family.base_seed}};
  } else {
    j["agents"] = nlohmann::json::array();
    for (const auto& a : agents) j["agents"].push_back(a.to_json());
  }
  return j;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  std::set<std::string> names;
  for (const auto& a : agents)
    if (!names.insert(a.name).second)
      throw ConfigError("duplicate agent name: " + a.name);
}

ExperimentOutputs run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);

  ExperimentOutputs outputs;

  if (config.mode == ExperimentConfig::Mode::Verify) {
    const VerificationReport report = verify_all(config.verify_family, Tolerances{});
    std::ofstream text(out_dir / "verify_report.txt");
    report.print(text);
    std::ofstream json_out(out_dir / "verify_report.json");
    json_out << report.to_json().dump(2) << '\n';
    outputs.trace_files = {out_dir / "verify_report.txt", out_dir / "verify_report.json"};
    outputs.verify_passed = report.all_pass();
  } else {
    const TabularMdp env = config.env.build();
    if (config.env.type == EnvSpec::Type::Random) {
      // keep the generated model alongside the traces so the run can be
      // reproduced from files alone
      save_mdp(env, out_dir / "env_mdp.json");
    }
    struct Task {
      const AgentSpec* agent;
      std::uint64_t seed;
      TrainingTrace trace;
    };
    std::vector<Task> tasks;
    for (const auto& agent : config.agents)
      for (std::uint64_t seed : config.seeds) tasks.push_back({&agent, seed, {}});

    std::atomic<std::size_t> next{0};
    const int workers =
        std::min<int>(config.jobs, static_cast<int>(tasks.size()));
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        Task& task = tasks[i];
        task.trace = task.agent->is_dp ? run_dp(env, task.agent->dp, task.seed)
                                       : run_sample_agent(env, task.agent->sample, task.seed);
      }
    };
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    std::map<std::string, std::vector<TrainingTrace>> by_agent;
    for (const Task& task : tasks) {
      std::ostringstream name;
      name << task.agent->name << "_seed_" << task.seed << ".csv";
      const auto path = out_dir / name.str();
      task.trace.write_csv(path);
      outputs.trace_files.push_back(path);
      by_agent[task.agent->name].push_back(task.trace);
    }
    const std::string index_column =
        config.mode == ExperimentConfig::Mode::Dp ? "iteration" : "episode";
    for (const auto& agent : config.agents) {
      const auto path = out_dir / (agent.name + "_aggregate.csv");
      aggregate_traces(by_agent.at(agent.name), index_column).write_csv(path);
      outputs.aggregate_files.push_back(path);
    }
  }

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = config.to_json();
  std::vector<std::string> files;
  for (const auto& p : outputs.trace_files) files.push_back(p.filename().string());
  for (const auto& p : outputs.aggregate_files) files.push_back(p.filename().string());
  manifest["files"] = files;
  outputs.manifest = out_dir / "manifest.json";
  std::ofstream manifest_out(outputs.manifest);
  manifest_out << manifest.dump(2) << '\n';
  return outputs;
}

std::vector<SummaryRow> summarize(const std::vector<std::filesystem::path>& trace_files,
                                  double threshold_frac, std::optional<double> jstar) {
  if (trace_files.empty()) throw ConfigError("summarize: no trace files");
  std::map<std::string, std::vector<TrainingTrace>> by_agent;
  for (const auto& path : trace_files) {
    const std::string stem = path.stem().string();
    const auto pos = stem.rfind("_seed_");
    const std::string agent = pos == std::string::npos ? stem : stem.substr(0, pos);
    by_agent[agent].push_back(TrainingTrace::read_csv(path));
  }

  std::vector<SummaryRow> rows;
  for (auto& [agent, traces] : by_agent) {
    const TrainingTrace& first = traces.front();
    const bool sample_schema = first.column_index("exact_j") >= 0;
    const std::string j_col = sample_schema ? "exact_j" : "j";
    const std::string step_col = first.column_index("env_steps") >= 0 ? "env_steps" : "iteration";
    const std::string index_col = sample_schema ? "episode" : "iteration";
    if (first.column_index(j_col) < 0 || first.column_index(step_col) < 0)
      throw ConfigError("summarize: trace schema mismatch for agent " + agent);
    const TrainingTrace agg = aggregate_traces(traces, index_col);
    const auto mean_j = agg.column("mean_" + j_col);
    const auto std_j = agg.column("std_" + j_col);
    const auto steps = first.column(step_col);

    SummaryRow row;
    row.agent = agent;
    row.final_mean = mean_j.back();
    row.final_std = std_j.back();
    row.reference = threshold_frac * jstar.value_or(row.final_mean);
    row.steps_to_threshold = -1.0;
    for (std::size_t i = 0; i < mean_j.size(); ++i) {
      if (mean_j[i] >= row.reference) {
        row.steps_to_threshold = steps[i];
        break;
      }
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(),
            [](const SummaryRow& a, const SummaryRow& b) { return a.final_mean > b.final_mean; });
  return rows;
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "agent                final_mean    final_std     threshold     steps_to_threshold\n";
  for (const auto& row : rows) {
    out << row.agent;
    for (std::size_t pad = row.agent.size(); pad < 21; ++pad) out << ' ';
    std::ostringstream nums;
    nums.precision(6);
    nums << row.final_mean << "  " << row.final_std << "  " << row.reference << "  ";
    out << nums.str();
    if (row.steps_to_threshold < 0)
      out << "never";
    else
      out << row.steps_to_threshold;
    out << "\n";
  }
  // flag exact ties in final performance
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    if (rows[i].final_mean == rows[i + 1].final_mean)
      out << "note: ordering tie between " << rows[i].agent << " and " << rows[i + 1].agent
          << "\n";
  return out.str();
}

}  // namespace acgap
