#pragma once

#include <array>
#include <optional>
#include <string>

#include "plnav/env.hpp"
#include "plnav/nn/layers.hpp"

namespace plnav::nn {

struct PolicyConfig {
  int d_laser = 96;        // must be a multiple of 4 (two stride-2 stages)
  int hidden = 256;        // LSTM feature width
  int feg_channels = 32;
  int trunk_channels = 32;
  int trunk_dense = 128;
  double log_std_init = -0.5;
  bool use_feg = true;   // false: unit mask (plain LSTM model)
  bool use_lstm = true;  // false: dense layer instead (plain CNN model)

  void validate() const;
  std::string architecture() const;  // "cnn", "lstm" or "lstm_feg"
};

/// Diagonal Gaussian over the pre-squash action pair; the environment sees
/// (sigmoid(u0), tanh(u1)) so v lands in (0,1) and w in (-1,1).
struct ActionDistribution {
  std::array<double, 2> mean_pre{};
  std::array<double, 2> log_std{};

  Action mean_action() const;
};

struct HiddenState {
  VectorXd h;
  VectorXd c;

  static HiddenState zeros(int hidden);
};

/// Squashed sample with its log density (including the squash Jacobian
/// correction). The pre-squash draw is returned through u_out for replay.
Action sample_action(const ActionDistribution& dist, Rng& rng, double* log_prob,
                     std::array<double, 2>* u_out);

/// Log density of the squashed sample identified by its pre-squash value.
double log_prob_of(const ActionDistribution& dist, const std::array<double, 2>& u);

/// Same, without the squash Jacobian terms (they cancel in likelihood
/// ratios of a shared sample).
double gaussian_log_prob(const ActionDistribution& dist, const std::array<double, 2>& u);

double squash_linear(double u);   // sigmoid -> (0,1)
double squash_angular(double u);  // tanh -> (-1,1)

/// The d_laser x 5 x 3 network input: per timestep, channels
/// [laser, goal distance, goal bearing, v, w] with the scalars tiled across
/// bearings. Stored as [15, L] with channel index (timestep * 5 + channel),
/// timesteps oldest first.
Tensor build_feg_input(const Observation& obs);

/// The three laser frames alone, [3, L], oldest first.
Tensor laser_frames(const Observation& obs);

/// FEG + CNN trunk + LSTM actor-critic with two heads on a shared feature.
class PolicyNetwork {
 public:
  PolicyNetwork(PolicyConfig cfg, uint64_t init_seed);

  struct GraphOut {
    Graph::Id mask = -1;      // [B,3,L] (only when use_feg)
    Graph::Id weighted = -1;  // [B,3,L]
    Graph::Id mean_pre;       // [B,2]
    Graph::Id log_std;        // [B,2]
    Graph::Id value;          // [B,1]
    Graph::Id h;              // [B,hidden]
    Graph::Id c;              // [B,hidden]
  };

  /// Batched differentiable forward pass; every input is a graph node.
  GraphOut forward(Graph& g, Graph::Id feg_in, Graph::Id laser3, Graph::Id goal,
                   Graph::Id vel, Graph::Id h, Graph::Id c) const;

  /// Trunk-only forward from an externally weighted laser (the FEG output).
  GraphOut trunk_forward(Graph& g, Graph::Id weighted, Graph::Id goal, Graph::Id vel,
                         Graph::Id h, Graph::Id c) const;

  struct EvalOut {
    ActionDistribution dist;
    double value = 0.0;
    HiddenState hidden;
    Tensor feg_mask;  // [3, L]; all ones when use_feg is off
  };

  /// Single-observation forward. Throws on non-finite activations after
  /// writing a parameter dump next to the working directory.
  EvalOut act(const Observation& obs, const HiddenState& hidden) const;

  /// Spec-shaped FEG evaluation: input [15, L] -> (mask [3, L], weighted [3, L]).
  std::pair<Tensor, Tensor> feg_forward(const Tensor& feg_in) const;

  /// Trunk evaluation from a weighted laser frame stack [3, L].
  EvalOut policy_forward(const Tensor& weighted, const std::array<double, 2>& goal,
                         const std::array<double, 2>& velocity,
                         const HiddenState& hidden) const;

  const PolicyConfig& config() const { return cfg_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  int64_t param_count() const { return params_.total_size(); }

 private:
  PolicyConfig cfg_;
  ParamStore params_;

  Conv1dLayer feg_conv1_, feg_conv2_;
  Deconv1dLayer feg_deconv1_, feg_deconv2_;
  Conv1dLayer trunk_conv1_, trunk_conv2_;
  DenseLayer trunk_dense_, merge_dense_, recurrent_dense_;
  LstmCell lstm_;
  DenseLayer actor_head_, critic_head_;
  Param* log_std_ = nullptr;
};

}  // namespace plnav::nn
