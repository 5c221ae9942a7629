#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "plnav/eval/evaluate.hpp"
#include "plnav/io.hpp"
#include "plnav/log.hpp"
#include "plnav/train/trainer.hpp"

using namespace plnav;
using nlohmann::json;

namespace {

AppConfig load_config_or_default(const std::string& path) {
  if (path.empty()) {
    AppConfig cfg;
    cfg.finalize();
    return cfg;
  }
  return load_app_config(path);
}

nn::PolicyConfig arch_config(const AppConfig& cfg, const std::string& arch) {
  nn::PolicyConfig p = cfg.policy;
  if (arch == "cnn") {
    p.use_lstm = false;
    p.use_feg = true;
  } else if (arch == "lstm") {
    p.use_lstm = true;
    p.use_feg = false;
  } else if (arch == "lstm_feg") {
    p.use_lstm = true;
    p.use_feg = true;
  } else {
    throw std::invalid_argument("unknown architecture: " + arch);
  }
  return p;
}

nn::PolicyNetwork load_policy(const std::string& path, const AppConfig& cfg) {
  train::LoadedCheckpoint peek = train::peek_checkpoint(path);
  nn::PolicyNetwork policy(peek.policy_config, 0);
  AppConfig expect = cfg;
  expect.policy = peek.policy_config;
  train::load_checkpoint(path, policy, config_compat_hash_hex(expect));
  return policy;
}

json metrics_to_json(const eval::Metrics& m) {
  json j = {{"n_trials", m.n_trials},
            {"n_success", m.n_success},
            {"n_collision", m.n_collision},
            {"n_timeout", m.n_timeout},
            {"success_rate", m.success_rate}};
  if (m.average_time.has_value()) {
    j["average_time"] = *m.average_time;
  } else {
    j["average_time"] = nullptr;
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int cmd_train(const std::string& config_path, const std::string& stage,
              const std::string& resume, const std::string& out_dir,
              double stop_success) {
  AppConfig cfg = load_config_or_default(config_path);
  std::filesystem::create_directories(out_dir);
  nn::PolicyNetwork policy(cfg.policy, mix_seed(cfg.trainer.seed, 1));

  train::TrainOptions options;
  options.checkpoint_path = out_dir + "/policy.ckpt.json";
  options.log_path = out_dir + "/train_log.jsonl";
  options.resume_path = resume;
  options.stop_at_success_rate = stop_success;
  if (!stage.empty()) {
    const auto& stages = cfg.trainer.curriculum_stages;
    auto it = std::find(stages.begin(), stages.end(), stage);
    if (it == stages.end()) throw std::invalid_argument("unknown stage id: " + stage);
    options.start_stage = static_cast<int>(it - stages.begin());
  }
  options.on_update = [](const train::TrainStats& stats, int64_t episodes, int stage_i) {
    std::ostringstream os;
    os << "update done: episodes=" << episodes << " stage=" << stage_i
       << " reward=" << stats.mean_episode_reward
       << " success=" << stats.success_rate << " kl=" << stats.kl;
    log_info(os.str());
  };

  train::TrainResult result = train_policy(policy, cfg, options);
  std::cout << "trained " << result.updates << " updates over " << result.episodes
            << " episodes; final stage " << result.final_stage << "\n"
            << "checkpoint: " << options.checkpoint_path << "\n";
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& ckpt,
             const std::string& scenario, int n_trials, uint64_t seed,
             const std::string& sensing, const std::string& out_dir,
             bool trajectories) {
  AppConfig cfg = load_config_or_default(config_path);
  nn::PolicyNetwork policy = load_policy(ckpt, cfg);

  eval::EvalOptions options;
  options.sensing = sensing.empty() ? cfg.sensing.variant
                                    : sensing_variant_from_string(sensing);
  options.record_trajectories = trajectories;
  const int trials = n_trials > 0 ? n_trials : cfg.eval.n_trials;
  eval::EvalRun run = eval::run_eval(policy, cfg, make_scenario(cfg, scenario), trials,
                                     seed != 0 ? seed : cfg.eval.seed, options);

  json out = metrics_to_json(run.metrics);
  out["scenario"] = scenario;
  out["sensing"] = to_string(options.sensing);
  std::cout << out.dump(2) << "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir + "/metrics.json", out.dump(2));
    json trial_log = json::array();
    for (const auto& t : run.trials) {
      trial_log.push_back({{"seed", t.seed},
                           {"outcome", static_cast<int>(t.outcome)},
                           {"steps", t.steps},
                           {"sim_time", t.sim_time}});
    }
    write_text(out_dir + "/trials.json", trial_log.dump(2));
    if (trajectories) {
      eval::export_trajectories(run.trajectories, run.sample_world,
                                out_dir + "/trajectories");
    }
  }
  return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& ckpt,
               const std::vector<std::string>& scenarios, int n_trials, uint64_t seed,
               const std::string& out_dir) {
  AppConfig cfg = load_config_or_default(config_path);
  nn::PolicyNetwork policy = load_policy(ckpt, cfg);

  std::vector<eval::AblationSpec> specs;
  for (SensingVariant v :
       {SensingVariant::ideal_laser_bottom, SensingVariant::ideal_laser_top,
        SensingVariant::depth_1d_slice, SensingVariant::depth_minpool,
        SensingVariant::depth_1d_semantic, SensingVariant::depth_minpool_semantic,
        SensingVariant::depth_minpool_semantic_noise}) {
    eval::AblationSpec spec;
    spec.architecture = policy.config().architecture();
    spec.fov = cfg.camera.horizontal_fov;
    spec.sensing = v;
    spec.augmentation = v == SensingVariant::depth_minpool_semantic_noise;
    specs.push_back(spec);
  }
  eval::AblationTable table =
      eval::run_ablation(policy, cfg, specs, scenarios, n_trials, seed);
  std::cout << table.to_text();
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir + "/ablation.csv", table.to_csv());
    write_text(out_dir + "/ablation.txt", table.to_text());
  }
  return 0;
}

int cmd_limit_sweep(const std::string& config_path, const std::string& ckpt,
                    std::vector<double> occupancies, std::vector<double> distances,
                    int n_trials, uint64_t seed, const std::string& out_path) {
  AppConfig cfg = load_config_or_default(config_path);
  nn::PolicyNetwork policy = load_policy(ckpt, cfg);
  if (occupancies.empty()) occupancies = {0.0, 0.2, 0.4, 0.6, 0.8, 0.95};
  if (distances.empty()) distances = {1.0, 2.0, 3.0};
  auto grid = eval::run_limitation_sweep(policy, cfg, occupancies, distances, n_trials,
                                         seed);
  const std::string csv = eval::limitation_to_csv(grid);
  std::cout << csv;
  if (!out_path.empty()) write_text(out_path, csv);
  return 0;
}

int cmd_render_slice(const std::string& config_path, const std::string& scenario,
                     uint64_t seed, int agent, const std::string& out_dir) {
  AppConfig cfg = load_config_or_default(config_path);
  WorldState world = spawn_scenario(make_scenario(cfg, scenario), seed);
  if (agent < 0 || agent >= static_cast<int>(world.agents.size())) {
    throw std::invalid_argument("agent index out of range");
  }
  std::filesystem::create_directories(out_dir);
  RenderResult r = render_scene(world, agent, cfg.camera);
  MaskedDepth masked = apply_semantic_mask(r.depth, r.mask);
  PseudoLaser laser = slice_min_pool(masked);

  write_pgm(out_dir + "/depth.pgm", r.depth);
  write_pgm(out_dir + "/mask.pgm", r.mask);
  write_grid_csv(out_dir + "/depth.csv", r.depth.height, r.depth.width, r.depth.values);
  {
    std::vector<double> mask_values(r.mask.values.begin(), r.mask.values.end());
    write_grid_csv(out_dir + "/mask.csv", r.mask.height, r.mask.width, mask_values);
  }
  write_grid_csv(out_dir + "/masked_depth.csv", masked.height, masked.width,
                 masked.values);
  write_laser_csv(out_dir + "/pseudo_laser.csv", laser);
  write_text(out_dir + "/scene.json", scene_to_json(world));
  std::cout << "wrote depth/mask/pseudo-laser dumps to " << out_dir << "\n";
  return 0;
}

int cmd_augment(const std::string& config_path, const std::string& in_path,
                const std::string& out_path, uint64_t seed) {
  AppConfig cfg = load_config_or_default(config_path);
  PseudoLaser laser = read_laser_csv(in_path, cfg.camera.max_range);
  PseudoLaser noisy = augment_noise(laser, cfg.noise, seed);
  write_laser_csv(out_path, noisy);
  std::cout << "augmented " << laser.d_laser() << " ranges -> " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-laser navigation stack"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file");

  // train
  auto* train = app.add_subcommand("train", "train a policy with the PPO curriculum");
  std::string stage, resume, train_out = "runs/latest";
  double stop_success = 0.0;
  train->add_option("--stage", stage, "curriculum stage id to start from");
  train->add_option("--resume", resume, "checkpoint to resume from");
  train->add_option("--out", train_out, "output directory");
  train->add_option("--stop-at-success", stop_success,
                    "stop once the rolling success rate reaches this value");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a scenario");
  std::string ckpt, scenario = "test_crossing", sensing, eval_out;
  int n_trials = 0;
  uint64_t seed = 0;
  bool trajectories = false;
  eval_cmd->add_option("--checkpoint", ckpt, "policy checkpoint")->required();
  eval_cmd->add_option("--scenario", scenario, "scenario id");
  eval_cmd->add_option("--trials", n_trials, "number of seeded trials");
  eval_cmd->add_option("--seed", seed, "base seed");
  eval_cmd->add_option("--sensing", sensing, "sensing variant override");
  eval_cmd->add_option("--out", eval_out, "output directory for metrics/trials");
  eval_cmd->add_flag("--trajectories", trajectories, "record and export trajectories");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "run the sensing-variant ablation table");
  std::string ablate_ckpt, ablate_out;
  std::vector<std::string> ablate_scenarios = {"single_obstacle:table",
                                               "single_obstacle:fire_hydrant"};
  int ablate_trials = 50;
  uint64_t ablate_seed = 9000;
  ablate->add_option("--checkpoint", ablate_ckpt, "policy checkpoint")->required();
  ablate->add_option("--scenarios", ablate_scenarios, "scenario ids");
  ablate->add_option("--trials", ablate_trials, "trials per cell");
  ablate->add_option("--seed", ablate_seed, "base seed");
  ablate->add_option("--out", ablate_out, "output directory");

  // limit-sweep
  auto* limit = app.add_subcommand("limit-sweep",
                                   "success-rate grid over wall occupancy x distance");
  std::string limit_ckpt, limit_out;
  std::vector<double> occupancies, distances;
  int limit_trials = 20;
  uint64_t limit_seed = 4000;
  limit->add_option("--checkpoint", limit_ckpt, "policy checkpoint")->required();
  limit->add_option("--occupancies", occupancies, "FOV fractions, e.g. 0 0.4 0.8");
  limit->add_option("--distances", distances, "start distances in meters");
  limit->add_option("--trials", limit_trials, "trials per cell");
  limit->add_option("--seed", limit_seed, "base seed");
  limit->add_option("--out", limit_out, "CSV output path");

  // render-slice
  auto* render = app.add_subcommand(
      "render-slice", "one-shot depth/mask/pseudo-laser dump for a scene and pose");
  std::string render_scenario = "single_obstacle:table", render_out = "render_out";
  uint64_t render_seed = 1;
  int render_agent = 0;
  render->add_option("--scenario", render_scenario, "scenario id or file:<path>");
  render->add_option("--seed", render_seed, "spawn seed");
  render->add_option("--agent", render_agent, "agent index for the camera");
  render->add_option("--out", render_out, "output directory");

  // augment
  auto* augment = app.add_subcommand("augment", "apply sensor-noise augmentation to a laser CSV");
  std::string aug_in, aug_out = "laser_noisy.csv";
  uint64_t aug_seed = 1;
  augment->add_option("--in", aug_in, "input laser CSV")->required();
  augment->add_option("--out", aug_out, "output laser CSV");
  augment->add_option("--seed", aug_seed, "noise seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      return cmd_train(config_path, stage, resume, train_out, stop_success);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(config_path, ckpt, scenario, n_trials, seed, sensing, eval_out,
                      trajectories);
    }
    if (ablate->parsed()) {
      return cmd_ablate(config_path, ablate_ckpt, ablate_scenarios, ablate_trials,
                        ablate_seed, ablate_out);
    }
    if (limit->parsed()) {
      return cmd_limit_sweep(config_path, limit_ckpt, occupancies, distances,
                             limit_trials, limit_seed, limit_out);
    }
    if (render->parsed()) {
      return cmd_render_slice(config_path, render_scenario, render_seed, render_agent,
                              render_out);
    }
    if (augment->parsed()) {
      return cmd_augment(config_path, aug_in, aug_out, aug_seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
