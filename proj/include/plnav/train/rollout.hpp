#pragma once

#include <memory>
#include <vector>

#include "plnav/config.hpp"
#include "plnav/env.hpp"
#include "plnav/nn/policy.hpp"

namespace plnav::train {

using nn::HiddenState;
using nn::PolicyNetwork;
using nn::Tensor;

struct Transition {
  Tensor feg_in;   // [15, L], post-augmentation
  Tensor laser3;   // [3, L]
  std::array<double, 2> goal{};
  std::array<double, 2> vel{};
  std::array<double, 2> u{};       // pre-squash sample
  std::array<double, 2> action{};  // squashed (v, w_norm)
  std::array<double, 2> old_mean_pre{};
  std::array<double, 2> old_log_std{};
  double log_prob = 0.0;        // with squash Jacobian
  double log_prob_gauss = 0.0;  // pre-squash density (ratio base)
  double value = 0.0;
  double reward = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
};

/// Contiguous slice of one agent's episode, in step order. terminal marks a
/// real episode end (arrived / collided / timeout); a segment cut by the end
/// of collection instead bootstraps from bootstrap_value.
struct Segment {
  std::vector<Transition> steps;
  bool terminal = false;
  double bootstrap_value = 0.0;
  std::vector<HiddenState> hidden_at_chunk;  // hidden at each chunk boundary
};

/// Truncated-BPTT window: `len` consecutive steps of one segment starting at
/// `start`, with the recurrent state captured at the window start. Chunks
/// never span episode boundaries.
struct Chunk {
  int segment = 0;
  int start = 0;
  int len = 0;
  int ordinal = 0;  // index into Segment::hidden_at_chunk
};

struct RolloutBuffer {
  std::vector<Segment> segments;
  std::vector<Chunk> chunks;
  int total_transitions = 0;
  std::vector<double> episode_rewards;  // episodes completed during collection
  std::vector<bool> episode_success;
};

/// GAE(gamma, lambda) over each segment, then returns = advantage + value and
/// batch-wide advantage normalization (zero mean, unit variance).
void compute_advantages(RolloutBuffer& buffer, double gamma, double lambda);

/// Steps a fleet of environments under the current policy until at least
/// batch_size transitions are stored. Hidden states persist across batches
/// within an episode; environments reset themselves with fresh seeds drawn
/// from the collector stream. Observations are stored post-augmentation.
class RolloutCollector {
 public:
  RolloutCollector(const AppConfig& cfg, const ScenarioSpec& scenario, uint64_t seed);

  RolloutBuffer collect(const PolicyNetwork& policy);

  /// Switches every environment to a new scenario (curriculum stage change);
  /// in-flight episodes restart.
  void set_scenario(const ScenarioSpec& scenario);

  int64_t episodes_completed() const { return episodes_completed_; }
  /// Success flags of recently finished episodes, most recent last.
  const std::vector<bool>& success_history() const { return success_history_; }

 private:
  struct AgentStream {
    HiddenState hidden;
    Observation obs;
    bool live = false;
  };
  struct EnvSlot {
    std::unique_ptr<NavEnv> env;
    std::vector<AgentStream> agents;
    std::vector<double> episode_reward;
  };

  void reset_env(int slot);

  AppConfig cfg_;
  ScenarioSpec scenario_;
  std::vector<EnvSlot> envs_;
  Rng rng_;          // environment seeds
  Rng sample_rng_;   // action sampling
  int64_t episodes_completed_ = 0;
  std::vector<bool> success_history_;
};

}  // namespace plnav::train
