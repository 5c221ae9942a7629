#include "plnav/nn/policy.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace plnav::nn {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double softplus(double x) {
  return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
}

/// log |d sigmoid(u)/du| = log s + log(1-s), evaluated stably.
double log_jac_sigmoid(double u) { return -softplus(u) - softplus(-u); }

/// log |d tanh(u)/du| = log(1 - tanh(u)^2), evaluated stably.
double log_jac_tanh(double u) {
  return 2.0 * (std::log(2.0) - u - softplus(-2.0 * u));
}

}  // namespace

void PolicyConfig::validate() const {
  if (d_laser < 8 || d_laser % 4 != 0) {
    throw std::invalid_argument("policy: d_laser must be >= 8 and divisible by 4");
  }
  if (hidden < 1) throw std::invalid_argument("policy: hidden must be >= 1");
}

std::string PolicyConfig::architecture() const {
  if (!use_lstm) return "cnn";
  return use_feg ? "lstm_feg" : "lstm";
}

Action ActionDistribution::mean_action() const {
  return {squash_linear(mean_pre[0]), squash_angular(mean_pre[1])};
}

HiddenState HiddenState::zeros(int hidden) {
  HiddenState s;
  s.h = VectorXd::Zero(hidden);
  s.c = VectorXd::Zero(hidden);
  return s;
}

double squash_linear(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double squash_angular(double u) { return std::tanh(u); }

Action sample_action(const ActionDistribution& dist, Rng& rng, double* log_prob,
                     std::array<double, 2>* u_out) {
  std::array<double, 2> u;
  for (int i = 0; i < 2; ++i) {
    u[i] = dist.mean_pre[i] + std::exp(dist.log_std[i]) * rng.gaussian();
  }
  if (u_out != nullptr) *u_out = u;
  if (log_prob != nullptr) *log_prob = log_prob_of(dist, u);
  return {squash_linear(u[0]), squash_angular(u[1])};
}

double gaussian_log_prob(const ActionDistribution& dist, const std::array<double, 2>& u) {
  double lp = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double z = (u[i] - dist.mean_pre[i]) * std::exp(-dist.log_std[i]);
    lp += -0.5 * z * z - dist.log_std[i] - 0.5 * kLogTwoPi;
  }
  return lp;
}

double log_prob_of(const ActionDistribution& dist, const std::array<double, 2>& u) {
  return gaussian_log_prob(dist, u) - log_jac_sigmoid(u[0]) - log_jac_tanh(u[1]);
}

Tensor build_feg_input(const Observation& obs) {
  const int L = obs.d_laser();
  Tensor t = Tensor::zeros({15, L});
  for (int k = 0; k < 3; ++k) {
    const ObsFrame& f = obs.frames[k];
    for (int j = 0; j < L; ++j) {
      t.data[(k * 5 + 0) * L + j] = f.laser[j];
      t.data[(k * 5 + 1) * L + j] = f.goal[0];
      t.data[(k * 5 + 2) * L + j] = f.goal[1];
      t.data[(k * 5 + 3) * L + j] = f.velocity[0];
      t.data[(k * 5 + 4) * L + j] = f.velocity[1];
    }
  }
  return t;
}

Tensor laser_frames(const Observation& obs) {
  const int L = obs.d_laser();
  Tensor t = Tensor::zeros({3, L});
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < L; ++j) t.data[k * L + j] = obs.frames[k].laser[j];
  }
  return t;
}

PolicyNetwork::PolicyNetwork(PolicyConfig cfg, uint64_t init_seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(init_seed);
  const int fc = cfg_.feg_channels;
  const int tc = cfg_.trunk_channels;
  feg_conv1_ = Conv1dLayer::create(params_, "feg.conv1", 15, fc, 5, 2, 2, rng);
  feg_conv2_ = Conv1dLayer::create(params_, "feg.conv2", fc, fc, 3, 2, 1, rng);
  feg_deconv1_ = Deconv1dLayer::create(params_, "feg.deconv1", fc, fc, 3, 2, 1, 1, rng);
  feg_deconv2_ = Deconv1dLayer::create(params_, "feg.deconv2", fc, 3, 5, 2, 2, 1, rng);
  trunk_conv1_ = Conv1dLayer::create(params_, "trunk.conv1", 3, tc, 5, 2, 2, rng);
  trunk_conv2_ = Conv1dLayer::create(params_, "trunk.conv2", tc, tc, 5, 2, 2, rng);
  trunk_dense_ =
      DenseLayer::create(params_, "trunk.dense", tc * (cfg_.d_laser / 4),
                         cfg_.trunk_dense, rng);
  merge_dense_ =
      DenseLayer::create(params_, "merge.dense", cfg_.trunk_dense + 4, cfg_.hidden, rng);
  lstm_ = LstmCell::create(params_, "lstm", cfg_.hidden, cfg_.hidden, rng);
  recurrent_dense_ =
      DenseLayer::create(params_, "recurrent.dense", cfg_.hidden, cfg_.hidden, rng);
  actor_head_ = DenseLayer::create(params_, "actor.head", cfg_.hidden, 2, rng);
  critic_head_ = DenseLayer::create(params_, "critic.head", cfg_.hidden, 1, rng);
  log_std_ = &params_.create("actor.log_std", {2});
  log_std_->value.data.setConstant(cfg_.log_std_init);
}

PolicyNetwork::GraphOut PolicyNetwork::trunk_forward(Graph& g, Graph::Id weighted,
                                                     Graph::Id goal, Graph::Id vel,
                                                     Graph::Id h, Graph::Id c) const {
  const int B = g.value(weighted).dim(0);
  const int L = cfg_.d_laser;

  Graph::Id t1 = g.relu(trunk_conv1_.forward(g, weighted));
  Graph::Id t2 = g.relu(trunk_conv2_.forward(g, t1));
  Graph::Id flat = g.reshape(t2, {B, cfg_.trunk_channels * (L / 4)});
  Graph::Id feat = g.relu(trunk_dense_.forward(g, flat));
  Graph::Id merged = g.concat_cols(feat, g.concat_cols(goal, vel));
  Graph::Id feature = g.relu(merge_dense_.forward(g, merged));

  GraphOut out;
  out.weighted = weighted;
  if (cfg_.use_lstm) {
    auto [h_next, c_next] = lstm_.forward(g, feature, h, c);
    out.h = h_next;
    out.c = c_next;
  } else {
    Graph::Id d = g.relu(recurrent_dense_.forward(g, feature));
    out.h = d;
    out.c = c;  // carried through untouched
  }
  out.mean_pre = actor_head_.forward(g, out.h);
  out.log_std = g.broadcast_row(g.param(*log_std_), B);
  out.value = critic_head_.forward(g, out.h);
  return out;
}

PolicyNetwork::GraphOut PolicyNetwork::forward(Graph& g, Graph::Id feg_in,
                                               Graph::Id laser3, Graph::Id goal,
                                               Graph::Id vel, Graph::Id h,
                                               Graph::Id c) const {
  Graph::Id weighted = laser3;
  Graph::Id mask = -1;
  if (cfg_.use_feg) {
    Graph::Id f1 = g.relu(feg_conv1_.forward(g, feg_in));
    Graph::Id f2 = g.relu(feg_conv2_.forward(g, f1));
    Graph::Id f3 = g.relu(feg_deconv1_.forward(g, f2));
    mask = g.sigmoid(feg_deconv2_.forward(g, f3));
    weighted = g.mul(mask, laser3);
  }
  GraphOut out = trunk_forward(g, weighted, goal, vel, h, c);
  out.mask = mask;
  return out;
}

namespace {

Tensor with_batch_dim(const Tensor& t) {
  std::vector<int> shape = t.shape;
  shape.insert(shape.begin(), 1);
  return Tensor::from(std::move(shape), t.data);
}

Tensor row_tensor(const std::array<double, 2>& v) {
  Tensor t = Tensor::zeros({1, 2});
  t.data[0] = v[0];
  t.data[1] = v[1];
  return t;
}

}  // namespace

PolicyNetwork::EvalOut PolicyNetwork::act(const Observation& obs,
                                          const HiddenState& hidden) const {
  if (obs.d_laser() != cfg_.d_laser) {
    throw std::invalid_argument("act: observation laser length mismatch");
  }
  Graph g;
  Graph::Id feg_in = g.constant(with_batch_dim(build_feg_input(obs)));
  Graph::Id laser3 = g.constant(with_batch_dim(laser_frames(obs)));
  Graph::Id goal = g.constant(row_tensor(obs.current().goal));
  Graph::Id vel = g.constant(row_tensor(obs.current().velocity));
  Graph::Id h = g.constant(Tensor::from({1, cfg_.hidden}, hidden.h));
  Graph::Id c = g.constant(Tensor::from({1, cfg_.hidden}, hidden.c));

  GraphOut ids = forward(g, feg_in, laser3, goal, vel, h, c);

  EvalOut out;
  out.dist.mean_pre = {g.value(ids.mean_pre).data[0], g.value(ids.mean_pre).data[1]};
  out.dist.log_std = {g.value(ids.log_std).data[0], g.value(ids.log_std).data[1]};
  out.value = g.value(ids.value).data[0];
  out.hidden.h = g.value(ids.h).data;
  out.hidden.c = g.value(ids.c).data;
  if (ids.mask >= 0) {
    out.feg_mask = Tensor::from({3, cfg_.d_laser}, g.value(ids.mask).data);
  } else {
    out.feg_mask = Tensor::zeros({3, cfg_.d_laser});
    out.feg_mask.data.setOnes();
  }

  const bool finite = std::isfinite(out.dist.mean_pre[0]) &&
                      std::isfinite(out.dist.mean_pre[1]) &&
                      std::isfinite(out.value) && out.hidden.h.allFinite() &&
                      out.hidden.c.allFinite();
  if (!finite) {
    std::ofstream dump("plnav_param_dump.txt");
    for (const Param* p : params_.all()) {
      dump << p->name << " norm=" << p->value.data.norm()
           << " max=" << p->value.data.cwiseAbs().maxCoeff() << "\n";
    }
    throw std::runtime_error(
        "policy forward produced non-finite activations; parameter summary "
        "written to plnav_param_dump.txt");
  }
  return out;
}

std::pair<Tensor, Tensor> PolicyNetwork::feg_forward(const Tensor& feg_in) const {
  if (feg_in.shape != std::vector<int>{15, cfg_.d_laser}) {
    throw std::invalid_argument("feg_forward: expected [15, d_laser] input");
  }
  if (!cfg_.use_feg) {
    throw std::logic_error("feg_forward: this architecture has no FEG module");
  }
  // The laser frames are channel 0 of each timestep block.
  Tensor laser3 = Tensor::zeros({3, cfg_.d_laser});
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < cfg_.d_laser; ++j) {
      laser3.data[k * cfg_.d_laser + j] = feg_in.data[(k * 5) * cfg_.d_laser + j];
    }
  }
  Graph g;
  Graph::Id in = g.constant(with_batch_dim(feg_in));
  Graph::Id f1 = g.relu(feg_conv1_.forward(g, in));
  Graph::Id f2 = g.relu(feg_conv2_.forward(g, f1));
  Graph::Id f3 = g.relu(feg_deconv1_.forward(g, f2));
  Graph::Id mask = g.sigmoid(feg_deconv2_.forward(g, f3));

  Tensor mask_t = Tensor::from({3, cfg_.d_laser}, g.value(mask).data);
  Tensor weighted = Tensor::from(
      {3, cfg_.d_laser}, (mask_t.data.array() * laser3.data.array()).matrix());
  return {std::move(mask_t), std::move(weighted)};
}

PolicyNetwork::EvalOut PolicyNetwork::policy_forward(
    const Tensor& weighted, const std::array<double, 2>& goal,
    const std::array<double, 2>& velocity, const HiddenState& hidden) const {
  if (weighted.shape != std::vector<int>{3, cfg_.d_laser}) {
    throw std::invalid_argument("policy_forward: expected [3, d_laser] input");
  }
  if (hidden.h.size() != cfg_.hidden || hidden.c.size() != cfg_.hidden) {
    throw std::invalid_argument("policy_forward: hidden state dimension mismatch");
  }
  Graph g;
  Graph::Id w = g.constant(with_batch_dim(weighted));
  Graph::Id goal_id = g.constant(row_tensor(goal));
  Graph::Id vel_id = g.constant(row_tensor(velocity));
  Graph::Id h = g.constant(Tensor::from({1, cfg_.hidden}, hidden.h));
  Graph::Id c = g.constant(Tensor::from({1, cfg_.hidden}, hidden.c));
  GraphOut ids = trunk_forward(g, w, goal_id, vel_id, h, c);

  EvalOut out;
  out.dist.mean_pre = {g.value(ids.mean_pre).data[0], g.value(ids.mean_pre).data[1]};
  out.dist.log_std = {g.value(ids.log_std).data[0], g.value(ids.log_std).data[1]};
  out.value = g.value(ids.value).data[0];
  out.hidden.h = g.value(ids.h).data;
  out.hidden.c = g.value(ids.c).data;
  out.feg_mask = Tensor::zeros({3, cfg_.d_laser});
  out.feg_mask.data.setOnes();
  return out;
}

}  // namespace plnav::nn
