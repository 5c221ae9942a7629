#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plnav/config.hpp"
#include "plnav/nn/policy.hpp"

namespace plnav::eval {

using nn::PolicyNetwork;

struct Metrics {
  int n_trials = 0;
  int n_success = 0;
  int n_collision = 0;
  int n_timeout = 0;
  double success_rate = 0.0;
  /// Mean simulated seconds of successful trials; absent with no successes.
  std::optional<double> average_time;
};

struct TrialRecord {
  uint64_t seed = 0;
  AgentStatus outcome = AgentStatus::running;
  int steps = 0;
  double sim_time = 0.0;
};

struct StepRecord {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double v = 0.0;
  double w = 0.0;  // normalized
  RewardBreakdown reward;
  bool done = false;
};

struct EpisodeLog {
  int trial = 0;
  int agent = 0;
  std::vector<StepRecord> steps;  // first row is the spawn state at t=0
};

struct EvalOptions {
  SensingVariant sensing = SensingVariant::depth_minpool_semantic;
  bool record_trajectories = false;
  int max_episode_steps = 0;  // 0: use config value
};

struct EvalRun {
  Metrics metrics;
  std::vector<TrialRecord> trials;
  std::vector<EpisodeLog> trajectories;  // when recorded
  WorldState sample_world;               // first trial's spawned world
};

/// n_trials seeded episodes of the deterministic (distribution-mean) policy
/// with augmentation disabled. The trial outcome is agent 0's terminal
/// status; other agents act as moving obstacles under the shared policy.
EvalRun run_eval(const PolicyNetwork& policy, const AppConfig& cfg,
                 const ScenarioSpec& scenario, int n_trials, uint64_t seed,
                 const EvalOptions& options = {});

struct AblationSpec {
  std::string architecture = "lstm_feg";  // cnn / lstm / lstm_feg
  double fov = kPi / 2.0;
  SensingVariant sensing = SensingVariant::depth_minpool_semantic;
  bool augmentation = true;  // training-time property, recorded in the table

  std::string label() const;
};

struct AblationRow {
  AblationSpec spec;
  std::string scenario;
  Metrics metrics;
};

struct AblationTable {
  std::vector<AblationRow> rows;

  std::string to_csv() const;
  std::string to_text() const;
};

/// Cross product of specs x scenarios, evaluated against one shared
/// checkpoint whose sensing pipeline is swapped per spec.
AblationTable run_ablation(const PolicyNetwork& policy, const AppConfig& cfg,
                           const std::vector<AblationSpec>& specs,
                           const std::vector<std::string>& scenarios, int n_trials,
                           uint64_t seed);

struct LimitationCell {
  double occupancy = 0.0;      // fraction of the horizontal FOV
  double distance = 0.0;       // meters from start to wall
  double distance_norm = 0.0;  // distance / max_range
  double success_rate = 0.0;
};

/// Success-rate grid over (angular occupancy, start distance) for the
/// wall-in-front scenario family. Wall widths are derived from the
/// occupancy at spawn distance: width = 2 d tan(occupancy * hfov / 2).
std::vector<LimitationCell> run_limitation_sweep(
    const PolicyNetwork& policy, const AppConfig& cfg,
    const std::vector<double>& occupancies, const std::vector<double>& distances,
    int n_trials, uint64_t seed);

std::string limitation_to_csv(const std::vector<LimitationCell>& grid);

/// One CSV per agent per episode plus a scene-geometry JSON for overlay
/// plotting. Returns the written paths.
std::vector<std::string> export_trajectories(const std::vector<EpisodeLog>& logs,
                                             const WorldState& world,
                                             const std::string& dir);

/// Repo-internal helper for scripted-policy tests: runs one episode with a
/// fixed action callback instead of the network.
TrialRecord run_scripted_episode(const AppConfig& cfg, const ScenarioSpec& scenario,
                                 uint64_t seed,
                                 const std::function<Action(const Observation&)>& policy,
                                 EpisodeLog* log = nullptr);

}  // namespace plnav::eval
