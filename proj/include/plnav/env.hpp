#pragma once

#include <array>
#include <deque>
#include <optional>
#include <vector>

#include "plnav/scenario.hpp"
#include "plnav/sensing.hpp"

namespace plnav {

/// One sensing frame: the pseudo-laser plus the goal in the agent's local
/// polar frame (distance, bearing) and the previously executed action
/// (v, normalized w).
struct ObsFrame {
  std::vector<double> laser;
  std::array<double, 2> goal{};      // (distance m, bearing rad)
  std::array<double, 2> velocity{};  // (v, w_norm)
};

/// Three stacked frames, oldest first; at episode start the missing history
/// is filled by replicating the current frame.
struct Observation {
  std::array<ObsFrame, 3> frames;

  int d_laser() const { return static_cast<int>(frames[0].laser.size()); }
  const ObsFrame& current() const { return frames[2]; }
};

/// Builds the stacked observation from a history of frames (most recent
/// last). Throws std::invalid_argument on an empty history.
Observation assemble_observation(const std::deque<ObsFrame>& history);

/// Goal position expressed in the agent frame as (distance, bearing).
std::array<double, 2> goal_in_local_frame(const AgentState& agent);

struct RewardConfig {
  double r_arrival = 15.0;
  double omega_g = 2.5;
  double r_collision = -15.0;
  double omega_w = -0.1;
  double goal_radius = 0.1;          // meters
  double w_penalty_threshold = 0.7;  // on the normalized angular velocity
};

struct RewardBreakdown {
  double r_goal = 0.0;
  double r_collision = 0.0;
  double r_rotational = 0.0;
  double total = 0.0;
};

/// Dense navigation reward: arrival bonus or potential-shaped progress,
/// collision penalty, and a penalty on large normalized angular velocities.
/// The angular term reads the executed action's normalized rate from
/// curr.angular_vel.
RewardBreakdown compute_reward(const AgentState& prev, const AgentState& curr,
                               const CollisionReport& events, const RewardConfig& cfg);

enum class AgentStatus { running, arrived, collided, timeout };

struct EnvConfig {
  CameraModel camera;
  RewardConfig reward;
  NoiseParams noise;
  SensingConfig sensing;
  bool augment = false;  // training-time noise on observations
  int max_episode_steps = 150;
};

struct AgentStepResult {
  int agent = 0;
  Observation obs;
  RewardBreakdown reward;
  AgentStatus status = AgentStatus::running;
};

/// POMDP wrapper around the simulator: owns the world, per-agent observation
/// histories and episode lifecycle. Agents that arrive or collide freeze in
/// place and disappear from subsequent step() results.
class NavEnv {
 public:
  NavEnv(EnvConfig cfg, uint64_t noise_seed);

  /// Spawns the scenario and returns the initial observation of every agent.
  std::vector<AgentStepResult> reset(const ScenarioSpec& spec, uint64_t seed);

  /// Advances every live agent by one control step. Exactly one action per
  /// live agent, keyed by agent index; throws std::invalid_argument when an
  /// action addresses a finished agent or the episode is over.
  std::vector<AgentStepResult> step(const std::vector<std::pair<int, Action>>& actions);

  const WorldState& world() const { return world_; }
  int step_count() const { return step_count_; }
  bool episode_done() const;
  std::vector<int> live_agents() const;
  AgentStatus status(int agent) const { return status_.at(agent); }
  const EnvConfig& config() const { return cfg_; }

 private:
  ObsFrame sense_frame(int agent, const std::array<double, 2>& velocity);

  EnvConfig cfg_;
  WorldState world_;
  std::vector<AgentStatus> status_;
  std::vector<std::deque<ObsFrame>> history_;
  int step_count_ = 0;
  Rng noise_rng_;
  bool has_episode_ = false;
};

}  // namespace plnav
