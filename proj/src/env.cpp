#include "plnav/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plnav {

Observation assemble_observation(const std::deque<ObsFrame>& history) {
  if (history.empty()) {
    throw std::invalid_argument("assemble_observation: empty history");
  }
  Observation obs;
  const int n = static_cast<int>(history.size());
  for (int k = 0; k < 3; ++k) {
    // Slot k holds the frame 2-k steps in the past; missing history
    // replicates the oldest available frame.
    const int idx = std::max(0, n - 3 + k);
    obs.frames[k] = history[idx];
  }
  return obs;
}

std::array<double, 2> goal_in_local_frame(const AgentState& agent) {
  const Vec2 rel = agent.goal - agent.position;
  const double dist = rel.norm();
  const double bearing = wrap_angle(std::atan2(rel.y, rel.x) - agent.heading);
  return {dist, bearing};
}

RewardBreakdown compute_reward(const AgentState& prev, const AgentState& curr,
                               const CollisionReport& events, const RewardConfig& cfg) {
  RewardBreakdown r;
  const double d_prev = (prev.position - prev.goal).norm();
  const double d_curr = (curr.position - curr.goal).norm();
  if (d_curr < cfg.goal_radius) {
    r.r_goal = cfg.r_arrival;
  } else {
    r.r_goal = cfg.omega_g * (d_prev - d_curr);
  }
  r.r_collision = events.collided ? cfg.r_collision : 0.0;
  const double w_norm = curr.angular_vel / kMaxAngularSpeed;
  if (std::abs(w_norm) > cfg.w_penalty_threshold) {
    r.r_rotational = cfg.omega_w * std::abs(w_norm);
  }
  r.total = r.r_goal + r.r_collision + r.r_rotational;
  return r;
}

NavEnv::NavEnv(EnvConfig cfg, uint64_t noise_seed)
    : cfg_(std::move(cfg)), noise_rng_(noise_seed) {
  cfg_.camera.validate();
  cfg_.noise.validate();
}

ObsFrame NavEnv::sense_frame(int agent, const std::array<double, 2>& velocity) {
  PseudoLaser laser = sense_pseudo_laser(world_, agent, cfg_.camera, cfg_.sensing);
  if (cfg_.augment) {
    laser = augment_noise(laser, cfg_.noise, noise_rng_.next_u64());
  }
  ObsFrame frame;
  frame.laser = std::move(laser.ranges);
  frame.goal = goal_in_local_frame(world_.agents[agent]);
  frame.velocity = velocity;
  return frame;
}

std::vector<AgentStepResult> NavEnv::reset(const ScenarioSpec& spec, uint64_t seed) {
  world_ = spawn_scenario(spec, seed);
  const int n = static_cast<int>(world_.agents.size());
  status_.assign(n, AgentStatus::running);
  history_.assign(n, {});
  step_count_ = 0;
  has_episode_ = true;

  std::vector<AgentStepResult> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    history_[i].push_back(sense_frame(i, {0.0, 0.0}));
    AgentStepResult r;
    r.agent = i;
    r.obs = assemble_observation(history_[i]);
    r.status = AgentStatus::running;
    out.push_back(std::move(r));
  }
  return out;
}

bool NavEnv::episode_done() const {
  if (!has_episode_) return true;
  for (AgentStatus s : status_) {
    if (s == AgentStatus::running) return false;
  }
  return true;
}

std::vector<int> NavEnv::live_agents() const {
  std::vector<int> live;
  for (int i = 0; i < static_cast<int>(status_.size()); ++i) {
    if (status_[i] == AgentStatus::running) live.push_back(i);
  }
  return live;
}

std::vector<AgentStepResult> NavEnv::step(
    const std::vector<std::pair<int, Action>>& actions) {
  if (!has_episode_ || episode_done()) {
    throw std::invalid_argument("NavEnv::step: episode is finished");
  }
  const std::vector<int> live = live_agents();
  if (actions.size() != live.size()) {
    throw std::invalid_argument("NavEnv::step: need exactly one action per live agent");
  }
  std::vector<Action> chosen(status_.size());
  std::vector<bool> seen(status_.size(), false);
  for (const auto& [agent, action] : actions) {
    if (agent < 0 || agent >= static_cast<int>(status_.size()) ||
        status_[agent] != AgentStatus::running || seen[agent]) {
      throw std::invalid_argument("NavEnv::step: action for a non-live agent");
    }
    seen[agent] = true;
    chosen[agent] = action;
  }

  // All live agents move on the same tick from the previous world snapshot.
  const std::vector<AgentState> prev = world_.agents;
  for (int agent : live) {
    world_.agents[agent] = step_kinematics(prev[agent], chosen[agent], world_.dt);
  }
  world_.time += world_.dt;
  ++step_count_;

  std::vector<AgentStepResult> out;
  out.reserve(live.size());
  for (int agent : live) {
    const CollisionReport report = check_collision(world_, agent);
    const RewardBreakdown reward =
        compute_reward(prev[agent], world_.agents[agent], report, cfg_.reward);

    AgentStatus next_status = AgentStatus::running;
    const double goal_dist =
        (world_.agents[agent].position - world_.agents[agent].goal).norm();
    if (report.collided) {
      next_status = AgentStatus::collided;
    } else if (goal_dist < cfg_.reward.goal_radius) {
      next_status = AgentStatus::arrived;
    } else if (step_count_ >= cfg_.max_episode_steps) {
      next_status = AgentStatus::timeout;
    }
    status_[agent] = next_status;

    ObsFrame frame = sense_frame(
        agent, {world_.agents[agent].linear_vel,
                world_.agents[agent].angular_vel / kMaxAngularSpeed});
    history_[agent].push_back(std::move(frame));
    while (history_[agent].size() > 3) history_[agent].pop_front();

    AgentStepResult r;
    r.agent = agent;
    r.obs = assemble_observation(history_[agent]);
    r.reward = reward;
    r.status = next_status;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace plnav
