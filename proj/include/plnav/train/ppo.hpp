#pragma once

#include <optional>

#include "plnav/train/rollout.hpp"

namespace plnav::train {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step = 0;
};

/// Applies one Adam step from the accumulated Param gradients, with optional
/// global-norm gradient clipping (max_norm <= 0 disables).
void adam_step(nn::ParamStore& params, AdamState& state, double lr, double max_norm);

struct TrainStats {
  double mean_episode_reward = 0.0;
  double success_rate = 0.0;
  int episodes = 0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double kl = 0.0;       // KL(old || new) after the update
  double entropy = 0.0;  // pre-squash Gaussian entropy
  double wall_clock_sec = 0.0;
  int transitions = 0;
  bool aborted_non_finite = false;
};

/// PPO update over truncated-BPTT chunks: clipped surrogate plus a
/// KL(old||new) penalty, value MSE and an entropy bonus. A non-finite loss
/// or gradient aborts the update and restores the previous parameters.
TrainStats ppo_update(PolicyNetwork& policy, RolloutBuffer& buffer,
                      const TrainerConfig& cfg, AdamState& adam, uint64_t shuffle_seed);

/// Mean KL(old || new) over the buffer under the current parameters.
double mean_kl(const PolicyNetwork& policy, const RolloutBuffer& buffer);

/// Rolling-window curriculum rule: advance to the next stage index when the
/// success rate over the last `window` episodes reaches the threshold.
/// Never regresses; returns the (possibly unchanged) stage index.
int curriculum_advance(const std::vector<bool>& success_history, int stage,
                       int n_stages, double threshold, int window);

}  // namespace plnav::train
