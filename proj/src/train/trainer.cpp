#include "plnav/train/trainer.hpp"

#include <fstream>

#include <json.hpp>

#include "plnav/log.hpp"

namespace plnav::train {

TrainResult train_policy(PolicyNetwork& policy, const AppConfig& cfg,
                         const TrainOptions& options) {
  const TrainerConfig& tc = cfg.trainer;
  TrainResult result;
  AdamState adam;
  int stage = options.start_stage;

  if (!options.resume_path.empty()) {
    LoadedCheckpoint loaded =
        load_checkpoint(options.resume_path, policy, config_compat_hash_hex(cfg));
    adam = loaded.adam;
    result.updates = loaded.meta.updates;
    result.episodes = loaded.meta.episodes;
    stage = std::max(stage, loaded.meta.stage);
    log_info("resumed from " + options.resume_path + " at update " +
             std::to_string(result.updates));
  }

  const int n_stages = static_cast<int>(tc.curriculum_stages.size());
  if (stage >= n_stages) throw std::invalid_argument("train: start stage out of range");

  RolloutCollector collector(cfg, make_scenario(cfg, tc.curriculum_stages[stage]),
                             tc.seed);
  std::ofstream log_file;
  if (!options.log_path.empty()) {
    log_file.open(options.log_path, std::ios::app);
  }

  log_info("training " + policy.config().architecture() + " policy, " +
           std::to_string(policy.param_count()) + " parameters");

  while (result.episodes < tc.total_episodes) {
    RolloutBuffer buffer = collector.collect(policy);
    compute_advantages(buffer, tc.gamma, tc.gae_lambda);
    TrainStats stats = ppo_update(policy, buffer, tc, adam,
                                  mix_seed(tc.seed, 7000 + result.updates));
    result.updates += 1;
    result.episodes = collector.episodes_completed();
    for (size_t i = 0; i < buffer.episode_rewards.size(); ++i) {
      result.episode_rewards.push_back(buffer.episode_rewards[i]);
      result.episode_success.push_back(buffer.episode_success[i]);
    }
    if (stats.aborted_non_finite) {
      log_warn("update " + std::to_string(result.updates) +
               " aborted on non-finite loss; parameters restored");
    }

    if (log_file.is_open()) {
      nlohmann::json line = {{"update", result.updates},
                             {"episodes", result.episodes},
                             {"stage", stage},
                             {"mean_episode_reward", stats.mean_episode_reward},
                             {"success_rate", stats.success_rate},
                             {"policy_loss", stats.policy_loss},
                             {"value_loss", stats.value_loss},
                             {"kl", stats.kl},
                             {"entropy", stats.entropy},
                             {"transitions", stats.transitions},
                             {"wall_clock_sec", stats.wall_clock_sec},
                             {"aborted", stats.aborted_non_finite}};
      log_file << line.dump() << "\n";
      log_file.flush();
    }
    if (options.on_update) options.on_update(stats, result.episodes, stage);

    // Rolling success over the promotion window, for promotion and stopping.
    const auto& history = collector.success_history();
    double rolling = 0.0;
    if (static_cast<int>(history.size()) >= tc.promote_window) {
      int succ = 0;
      for (size_t i = history.size() - tc.promote_window; i < history.size(); ++i) {
        succ += history[i] ? 1 : 0;
      }
      rolling = static_cast<double>(succ) / tc.promote_window;
    }

    if (options.stop_at_success_rate > 0.0 && stage == n_stages - 1 &&
        rolling >= options.stop_at_success_rate) {
      result.reached_success_target = true;
    }

    const int next_stage = curriculum_advance(history, stage, n_stages,
                                              tc.promote_success_threshold,
                                              tc.promote_window);
    if (next_stage != stage) {
      log_info("curriculum: advancing to stage " +
               tc.curriculum_stages[next_stage] + " after " +
               std::to_string(result.episodes) + " episodes");
      stage = next_stage;
      collector.set_scenario(make_scenario(cfg, tc.curriculum_stages[stage]));
    }

    const bool checkpoint_now =
        !options.checkpoint_path.empty() &&
        (result.updates % tc.checkpoint_every_updates == 0 ||
         result.reached_success_target || result.episodes >= tc.total_episodes);
    if (checkpoint_now) {
      CheckpointMeta meta;
      meta.updates = result.updates;
      meta.episodes = result.episodes;
      meta.stage = stage;
      save_checkpoint(options.checkpoint_path, policy, cfg, adam, meta);
    }
    if (result.reached_success_target) break;
  }

  result.final_stage = stage;
  if (!options.checkpoint_path.empty()) {
    CheckpointMeta meta;
    meta.updates = result.updates;
    meta.episodes = result.episodes;
    meta.stage = stage;
    save_checkpoint(options.checkpoint_path, policy, cfg, adam, meta);
  }
  return result;
}

}  // namespace plnav::train
