#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plnav/env.hpp"
#include "plnav/nn/policy.hpp"

namespace plnav {

struct TrainerConfig {
  int batch_size = 1024;
  int max_episode_steps = 150;
  int64_t total_episodes = 30000;
  double gamma = 0.99;
  double learning_rate = 5e-5;
  double gae_lambda = 0.95;
  int lstm_unroll = 20;
  double kl_penalty_coeff = 15e-4;
  double clip_ratio = 0.2;  // 0 disables clipping
  int epochs_per_batch = 4;
  double entropy_coeff = 0.001;
  double value_coeff = 0.5;
  int minibatch_size = 128;  // transitions per gradient step
  double max_grad_norm = 0.25;  // 0 disables clipping
  int num_envs = 4;
  uint64_t seed = 1;
  // Listed in the experiment configuration for completeness; PPO has no
  // target network, so this is parsed, logged and never used.
  double target_network_update_ratio = 0.01;
  std::vector<std::string> curriculum_stages = {"stage1_open", "stage2_crossing",
                                                "stage3_corridor"};
  double promote_success_threshold = 0.9;
  int promote_window = 200;
  int checkpoint_every_updates = 50;
  int agents_per_env = 0;  // 0 = scenario default
  bool augment = true;     // training-time observation noise

  void validate() const;
};

struct EvalConfig {
  int n_trials = 100;
  uint64_t seed = 9000;
};

/// Everything the CLI reads from one JSON file. Defaults match the
/// experiment settings; any subset of keys may be overridden.
struct AppConfig {
  TrainerConfig trainer;
  RewardConfig reward;
  NoiseParams noise;
  CameraModel camera;
  SensingConfig sensing;
  nn::PolicyConfig policy;
  EvalConfig eval;
  double agent_radius = 0.3;
  double camera_height = 0.3;

  /// Keeps policy.d_laser consistent with the camera width.
  void finalize();
};

AppConfig load_app_config(const std::string& path);
AppConfig app_config_from_json_text(const std::string& text);
std::string app_config_to_json(const AppConfig& cfg);

/// Hash over the architecture-relevant configuration (camera geometry and
/// policy sizes); checkpoints refuse to load under a different hash.
uint64_t config_compat_hash(const AppConfig& cfg);
std::string config_compat_hash_hex(const AppConfig& cfg);

EnvConfig make_env_config(const AppConfig& cfg, bool augment);
ScenarioSpec make_scenario(const AppConfig& cfg, const std::string& id);

}  // namespace plnav
