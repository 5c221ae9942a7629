#pragma once

#include <functional>
#include <string>

#include "plnav/train/checkpoint.hpp"

namespace plnav::train {

struct TrainResult {
  int64_t updates = 0;
  int64_t episodes = 0;
  int final_stage = 0;
  std::vector<double> episode_rewards;  // in completion order
  std::vector<bool> episode_success;
  bool reached_success_target = false;
};

struct TrainOptions {
  std::string checkpoint_path;       // empty: no checkpointing
  std::string log_path;              // JSON lines, one per update; empty: none
  std::string resume_path;           // empty: fresh start
  int start_stage = 0;
  /// Stop as soon as the rolling success rate over trainer.promote_window
  /// episodes reaches this value in the last curriculum stage (<= 0: never).
  double stop_at_success_rate = 0.0;
  std::function<void(const TrainStats&, int64_t episodes, int stage)> on_update;
};

/// Multi-stage curriculum training loop: collect, estimate advantages,
/// update, promote stages on the rolling success rule, checkpoint.
TrainResult train_policy(PolicyNetwork& policy, const AppConfig& cfg,
                         const TrainOptions& options);

}  // namespace plnav::train
