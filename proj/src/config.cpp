#include "plnav/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "plnav/log.hpp"

namespace plnav {

using nlohmann::json;

void TrainerConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("trainer: gamma in (0,1)");
  if (batch_size < 1 || max_episode_steps < 1 || lstm_unroll < 1 ||
      epochs_per_batch < 1 || minibatch_size < 1 || num_envs < 1) {
    throw std::invalid_argument("trainer: counts must be positive");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("trainer: learning_rate > 0");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw std::invalid_argument("trainer: gae_lambda in [0,1]");
  }
  if (kl_penalty_coeff < 0.0 || clip_ratio < 0.0 || entropy_coeff < 0.0 ||
      value_coeff < 0.0 || max_grad_norm < 0.0) {
    throw std::invalid_argument("trainer: coefficients must be >= 0");
  }
  if (!(promote_success_threshold > 0.0 && promote_success_threshold <= 1.0) ||
      promote_window < 1) {
    throw std::invalid_argument("trainer: bad promotion rule");
  }
}

void AppConfig::finalize() {
  policy.d_laser = camera.width;
  trainer.validate();
  camera.validate();
  noise.validate();
  policy.validate();
}

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_trainer(const json& j, TrainerConfig& t) {
  maybe(j, "batch_size", t.batch_size);
  maybe(j, "max_episode_steps", t.max_episode_steps);
  maybe(j, "total_episodes", t.total_episodes);
  maybe(j, "gamma", t.gamma);
  maybe(j, "learning_rate", t.learning_rate);
  maybe(j, "gae_lambda", t.gae_lambda);
  maybe(j, "lstm_unroll", t.lstm_unroll);
  maybe(j, "kl_penalty_coeff", t.kl_penalty_coeff);
  maybe(j, "clip_ratio", t.clip_ratio);
  maybe(j, "epochs_per_batch", t.epochs_per_batch);
  maybe(j, "entropy_coeff", t.entropy_coeff);
  maybe(j, "value_coeff", t.value_coeff);
  maybe(j, "minibatch_size", t.minibatch_size);
  maybe(j, "max_grad_norm", t.max_grad_norm);
  maybe(j, "num_envs", t.num_envs);
  maybe(j, "seed", t.seed);
  maybe(j, "curriculum_stages", t.curriculum_stages);
  maybe(j, "promote_success_threshold", t.promote_success_threshold);
  maybe(j, "promote_window", t.promote_window);
  maybe(j, "checkpoint_every_updates", t.checkpoint_every_updates);
  maybe(j, "agents_per_env", t.agents_per_env);
  maybe(j, "augment", t.augment);
  if (j.contains("target_network_update_ratio")) {
    t.target_network_update_ratio = j.at("target_network_update_ratio").get<double>();
    log_info("config: target_network_update_ratio is parsed for fidelity but unused");
  }
}

json trainer_to_json(const TrainerConfig& t) {
  return json{{"batch_size", t.batch_size},
              {"max_episode_steps", t.max_episode_steps},
              {"total_episodes", t.total_episodes},
              {"gamma", t.gamma},
              {"learning_rate", t.learning_rate},
              {"gae_lambda", t.gae_lambda},
              {"lstm_unroll", t.lstm_unroll},
              {"kl_penalty_coeff", t.kl_penalty_coeff},
              {"clip_ratio", t.clip_ratio},
              {"epochs_per_batch", t.epochs_per_batch},
              {"entropy_coeff", t.entropy_coeff},
              {"value_coeff", t.value_coeff},
              {"minibatch_size", t.minibatch_size},
              {"max_grad_norm", t.max_grad_norm},
              {"num_envs", t.num_envs},
              {"seed", t.seed},
              {"target_network_update_ratio", t.target_network_update_ratio},
              {"curriculum_stages", t.curriculum_stages},
              {"promote_success_threshold", t.promote_success_threshold},
              {"promote_window", t.promote_window},
              {"checkpoint_every_updates", t.checkpoint_every_updates},
              {"agents_per_env", t.agents_per_env},
              {"augment", t.augment}};
}

}  // namespace

AppConfig app_config_from_json_text(const std::string& text) {
  AppConfig cfg;
  const json j = json::parse(text);
  if (j.contains("trainer")) parse_trainer(j.at("trainer"), cfg.trainer);
  if (j.contains("reward")) {
    const json& r = j.at("reward");
    maybe(r, "r_arrival", cfg.reward.r_arrival);
    maybe(r, "omega_g", cfg.reward.omega_g);
    maybe(r, "r_collision", cfg.reward.r_collision);
    maybe(r, "omega_w", cfg.reward.omega_w);
    maybe(r, "goal_radius", cfg.reward.goal_radius);
    maybe(r, "w_penalty_threshold", cfg.reward.w_penalty_threshold);
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    maybe(n, "junction_threshold", cfg.noise.junction_threshold);
    maybe(n, "neighborhood_halfwidth", cfg.noise.neighborhood_halfwidth);
    maybe(n, "gaussian_scale", cfg.noise.gaussian_scale);
    maybe(n, "enabled", cfg.noise.enabled);
  }
  if (j.contains("camera")) {
    const json& c = j.at("camera");
    maybe(c, "horizontal_fov", cfg.camera.horizontal_fov);
    maybe(c, "vertical_fov", cfg.camera.vertical_fov);
    maybe(c, "height", cfg.camera.height);
    maybe(c, "width", cfg.camera.width);
    maybe(c, "max_range", cfg.camera.max_range);
  }
  if (j.contains("sensing")) {
    const json& s = j.at("sensing");
    if (s.contains("variant")) {
      cfg.sensing.variant = sensing_variant_from_string(s.at("variant").get<std::string>());
    }
    maybe(s, "bottom_laser_height", cfg.sensing.bottom_laser_height);
    maybe(s, "top_laser_height", cfg.sensing.top_laser_height);
    maybe(s, "slice_row_frac", cfg.sensing.slice_row_frac);
  }
  if (j.contains("policy")) {
    const json& p = j.at("policy");
    maybe(p, "hidden", cfg.policy.hidden);
    maybe(p, "feg_channels", cfg.policy.feg_channels);
    maybe(p, "trunk_channels", cfg.policy.trunk_channels);
    maybe(p, "trunk_dense", cfg.policy.trunk_dense);
    maybe(p, "log_std_init", cfg.policy.log_std_init);
    maybe(p, "use_feg", cfg.policy.use_feg);
    maybe(p, "use_lstm", cfg.policy.use_lstm);
  }
  if (j.contains("eval")) {
    const json& e = j.at("eval");
    maybe(e, "n_trials", cfg.eval.n_trials);
    maybe(e, "seed", cfg.eval.seed);
  }
  maybe(j, "agent_radius", cfg.agent_radius);
  maybe(j, "camera_height", cfg.camera_height);
  cfg.finalize();
  return cfg;
}

AppConfig load_app_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return app_config_from_json_text(ss.str());
}

std::string app_config_to_json(const AppConfig& cfg) {
  json j;
  j["trainer"] = trainer_to_json(cfg.trainer);
  j["reward"] = {{"r_arrival", cfg.reward.r_arrival},
                 {"omega_g", cfg.reward.omega_g},
                 {"r_collision", cfg.reward.r_collision},
                 {"omega_w", cfg.reward.omega_w},
                 {"goal_radius", cfg.reward.goal_radius},
                 {"w_penalty_threshold", cfg.reward.w_penalty_threshold}};
  j["noise"] = {{"junction_threshold", cfg.noise.junction_threshold},
                {"neighborhood_halfwidth", cfg.noise.neighborhood_halfwidth},
                {"gaussian_scale", cfg.noise.gaussian_scale},
                {"enabled", cfg.noise.enabled}};
  j["camera"] = {{"horizontal_fov", cfg.camera.horizontal_fov},
                 {"vertical_fov", cfg.camera.vertical_fov},
                 {"height", cfg.camera.height},
                 {"width", cfg.camera.width},
                 {"max_range", cfg.camera.max_range}};
  j["sensing"] = {{"variant", to_string(cfg.sensing.variant)},
                  {"bottom_laser_height", cfg.sensing.bottom_laser_height},
                  {"top_laser_height", cfg.sensing.top_laser_height},
                  {"slice_row_frac", cfg.sensing.slice_row_frac}};
  j["policy"] = {{"hidden", cfg.policy.hidden},
                 {"feg_channels", cfg.policy.feg_channels},
                 {"trunk_channels", cfg.policy.trunk_channels},
                 {"trunk_dense", cfg.policy.trunk_dense},
                 {"log_std_init", cfg.policy.log_std_init},
                 {"use_feg", cfg.policy.use_feg},
                 {"use_lstm", cfg.policy.use_lstm}};
  j["eval"] = {{"n_trials", cfg.eval.n_trials}, {"seed", cfg.eval.seed}};
  j["agent_radius"] = cfg.agent_radius;
  j["camera_height"] = cfg.camera_height;
  return j.dump(2);
}

uint64_t config_compat_hash(const AppConfig& cfg) {
  json j = {{"camera",
             {{"horizontal_fov", cfg.camera.horizontal_fov},
              {"vertical_fov", cfg.camera.vertical_fov},
              {"height", cfg.camera.height},
              {"width", cfg.camera.width},
              {"max_range", cfg.camera.max_range}}},
            {"policy",
             {{"d_laser", cfg.policy.d_laser},
              {"hidden", cfg.policy.hidden},
              {"feg_channels", cfg.policy.feg_channels},
              {"trunk_channels", cfg.policy.trunk_channels},
              {"trunk_dense", cfg.policy.trunk_dense},
              {"use_feg", cfg.policy.use_feg},
              {"use_lstm", cfg.policy.use_lstm}}}};
  const std::string s = j.dump();
  uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_compat_hash_hex(const AppConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_compat_hash(cfg)));
  return buf;
}

EnvConfig make_env_config(const AppConfig& cfg, bool augment) {
  EnvConfig env;
  env.camera = cfg.camera;
  env.reward = cfg.reward;
  env.noise = cfg.noise;
  env.sensing = cfg.sensing;
  env.augment = augment && cfg.noise.enabled;
  env.max_episode_steps = cfg.trainer.max_episode_steps;
  return env;
}

ScenarioSpec make_scenario(const AppConfig& cfg, const std::string& id) {
  ScenarioSpec spec = ScenarioSpec::parse(id);
  spec.agent_radius = cfg.agent_radius;
  spec.camera_height = cfg.camera_height;
  spec.n_agents = cfg.trainer.agents_per_env;
  return spec;
}

}  // namespace plnav
