#include "plnav/train/ppo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace plnav::train {

using nn::Graph;
using nn::Param;

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

/// Batched view of a set of chunks, padded to the longest one; padding rows
/// carry zero inputs and zero loss weight.
struct ChunkBatch {
  int B = 0;
  int T = 0;
  std::vector<Tensor> feg_in;  // per t: [B,15,L]
  std::vector<Tensor> laser3;  // per t: [B,3,L]
  std::vector<Tensor> goal;    // per t: [B,2]
  std::vector<Tensor> vel;     // per t: [B,2]
  std::vector<Tensor> valid;   // per t: [B,1], 1 for real steps
  Tensor h0, c0;               // [B,H]
  std::vector<std::vector<const Transition*>> steps;  // [T][B], nullptr = pad
  int n_valid = 0;
};

ChunkBatch build_chunk_batch(const RolloutBuffer& buffer, const std::vector<int>& idx,
                             int d_laser, int hidden) {
  ChunkBatch batch;
  batch.B = static_cast<int>(idx.size());
  batch.T = 0;
  for (int i : idx) batch.T = std::max(batch.T, buffer.chunks[i].len);

  batch.h0 = Tensor::zeros({batch.B, hidden});
  batch.c0 = Tensor::zeros({batch.B, hidden});
  batch.steps.assign(batch.T, std::vector<const Transition*>(batch.B, nullptr));
  for (int t = 0; t < batch.T; ++t) {
    batch.feg_in.push_back(Tensor::zeros({batch.B, 15, d_laser}));
    batch.laser3.push_back(Tensor::zeros({batch.B, 3, d_laser}));
    batch.goal.push_back(Tensor::zeros({batch.B, 2}));
    batch.vel.push_back(Tensor::zeros({batch.B, 2}));
    batch.valid.push_back(Tensor::zeros({batch.B, 1}));
  }

  for (int b = 0; b < batch.B; ++b) {
    const Chunk& chunk = buffer.chunks[idx[b]];
    const Segment& seg = buffer.segments[chunk.segment];
    const HiddenState& h = seg.hidden_at_chunk.at(chunk.ordinal);
    batch.h0.mat().row(b) = h.h.transpose();
    batch.c0.mat().row(b) = h.c.transpose();
    for (int t = 0; t < chunk.len; ++t) {
      const Transition& tr = seg.steps[chunk.start + t];
      batch.steps[t][b] = &tr;
      const int nf = 15 * d_laser;
      batch.feg_in[t].data.segment(static_cast<Eigen::Index>(b) * nf, nf) = tr.feg_in.data;
      const int nl = 3 * d_laser;
      batch.laser3[t].data.segment(static_cast<Eigen::Index>(b) * nl, nl) = tr.laser3.data;
      batch.goal[t].data[2 * b] = tr.goal[0];
      batch.goal[t].data[2 * b + 1] = tr.goal[1];
      batch.vel[t].data[2 * b] = tr.vel[0];
      batch.vel[t].data[2 * b + 1] = tr.vel[1];
      batch.valid[t].data[b] = 1.0;
      batch.n_valid += 1;
    }
  }
  return batch;
}

/// Per-row sum of a [B,2] node -> [B,1].
Graph::Id row_sum2(Graph& g, Graph::Id x) {
  Tensor ones = Tensor::zeros({2, 1});
  ones.data.setOnes();
  return g.matmul(x, g.constant(std::move(ones)));
}

struct StepLossNodes {
  Graph::Id policy_term;  // [B,1] masked later
  Graph::Id value_term;   // [B,1]
  Graph::Id kl;           // [B,1]
  Graph::Id entropy;      // [B,1]
};

/// Loss pieces for one timestep of a batched unroll.
StepLossNodes step_loss(Graph& g, const PolicyNetwork::GraphOut& out,
                        const std::vector<const Transition*>& steps,
                        const TrainerConfig& cfg) {
  const int B = static_cast<int>(steps.size());
  Tensor u = Tensor::zeros({B, 2});
  Tensor old_logp = Tensor::zeros({B, 1});
  Tensor old_mean = Tensor::zeros({B, 2});
  Tensor old_log_std = Tensor::zeros({B, 2});
  Tensor adv = Tensor::zeros({B, 1});
  Tensor ret = Tensor::zeros({B, 1});
  for (int b = 0; b < B; ++b) {
    const Transition* tr = steps[b];
    if (tr == nullptr) continue;
    u.data[2 * b] = tr->u[0];
    u.data[2 * b + 1] = tr->u[1];
    old_logp.data[b] = tr->log_prob_gauss;
    old_mean.data[2 * b] = tr->old_mean_pre[0];
    old_mean.data[2 * b + 1] = tr->old_mean_pre[1];
    old_log_std.data[2 * b] = tr->old_log_std[0];
    old_log_std.data[2 * b + 1] = tr->old_log_std[1];
    adv.data[b] = tr->advantage;
    ret.data[b] = tr->ret;
  }

  Graph::Id u_c = g.constant(std::move(u));
  Graph::Id adv_c = g.constant(std::move(adv));

  // New pre-squash log density of the stored sample.
  Graph::Id diff = g.sub(u_c, out.mean_pre);
  Graph::Id inv_std = g.exp_(g.scale(out.log_std, -1.0));
  Graph::Id z2 = g.square(g.mul(diff, inv_std));
  Graph::Id lp_terms =
      g.add_scalar(g.sub(g.scale(z2, -0.5), out.log_std), -0.5 * kLogTwoPi);
  Graph::Id logp_new = row_sum2(g, lp_terms);

  Graph::Id ratio = g.exp_(g.sub(logp_new, g.constant(std::move(old_logp))));
  Graph::Id surr1 = g.mul(ratio, adv_c);
  Graph::Id surr;
  if (cfg.clip_ratio > 0.0) {
    Graph::Id clipped = g.clamp(ratio, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio);
    surr = g.minimum(surr1, g.mul(clipped, adv_c));
  } else {
    surr = surr1;
  }

  // KL(old || new) for diagonal Gaussians, closed form.
  Graph::Id old_mean_c = g.constant(std::move(old_mean));
  Tensor old_var = Tensor::zeros({B, 2});
  for (int b = 0; b < B; ++b) {
    old_var.data[2 * b] = std::exp(2.0 * old_log_std.data[2 * b]);
    old_var.data[2 * b + 1] = std::exp(2.0 * old_log_std.data[2 * b + 1]);
  }
  Graph::Id term_log = g.sub(out.log_std, g.constant(std::move(old_log_std)));
  Graph::Id mean_gap2 = g.square(g.sub(old_mean_c, out.mean_pre));
  Graph::Id inv_var_new = g.exp_(g.scale(out.log_std, -2.0));
  Graph::Id term_ratio =
      g.scale(g.mul(g.add(g.constant(std::move(old_var)), mean_gap2), inv_var_new), 0.5);
  Graph::Id kl_terms = g.add_scalar(g.add(term_log, term_ratio), -0.5);
  Graph::Id kl = row_sum2(g, kl_terms);

  // Pre-squash Gaussian entropy.
  Graph::Id ent_terms = g.add_scalar(out.log_std, 0.5 * (kLogTwoPi + 1.0));
  Graph::Id entropy = row_sum2(g, ent_terms);

  StepLossNodes nodes;
  nodes.policy_term = g.add(g.scale(surr, -1.0),
                            g.sub(g.scale(kl, cfg.kl_penalty_coeff),
                                  g.scale(entropy, cfg.entropy_coeff)));
  nodes.value_term = g.square(g.sub(out.value, g.constant(std::move(ret))));
  nodes.kl = kl;
  nodes.entropy = entropy;
  return nodes;
}

struct Snapshot {
  std::vector<Tensor> values, m, v;
  int64_t adam_step = 0;
};

Snapshot snapshot_params(nn::ParamStore& params, const AdamState& adam) {
  Snapshot s;
  for (Param* p : params.all()) {
    s.values.push_back(p->value);
    s.m.push_back(p->adam_m);
    s.v.push_back(p->adam_v);
  }
  s.adam_step = adam.step;
  return s;
}

void restore_params(nn::ParamStore& params, AdamState& adam, const Snapshot& s) {
  auto all = params.all();
  for (size_t i = 0; i < all.size(); ++i) {
    all[i]->value = s.values[i];
    all[i]->adam_m = s.m[i];
    all[i]->adam_v = s.v[i];
  }
  adam.step = s.adam_step;
}

}  // namespace

void adam_step(nn::ParamStore& params, AdamState& state, double lr, double max_norm) {
  if (max_norm > 0.0) {
    double norm2 = 0.0;
    for (Param* p : params.all()) norm2 += p->grad.data.squaredNorm();
    const double norm = std::sqrt(norm2);
    if (norm > max_norm) {
      const double scale = max_norm / norm;
      for (Param* p : params.all()) p->grad.data *= scale;
    }
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (Param* p : params.all()) {
    p->adam_m.data = state.beta1 * p->adam_m.data + (1.0 - state.beta1) * p->grad.data;
    p->adam_v.data = state.beta2 * p->adam_v.data.array().matrix() +
                     (1.0 - state.beta2) * p->grad.data.array().square().matrix();
    p->value.data.array() -=
        lr * (p->adam_m.data.array() / bc1) /
        ((p->adam_v.data.array() / bc2).sqrt() + state.eps);
  }
}

TrainStats ppo_update(PolicyNetwork& policy, RolloutBuffer& buffer,
                      const TrainerConfig& cfg, AdamState& adam, uint64_t shuffle_seed) {
  const auto start = std::chrono::steady_clock::now();
  TrainStats stats;
  stats.transitions = buffer.total_transitions;
  stats.episodes = static_cast<int>(buffer.episode_rewards.size());
  if (stats.episodes > 0) {
    stats.mean_episode_reward =
        std::accumulate(buffer.episode_rewards.begin(), buffer.episode_rewards.end(), 0.0) /
        stats.episodes;
    int succ = 0;
    for (bool s : buffer.episode_success) succ += s ? 1 : 0;
    stats.success_rate = static_cast<double>(succ) / stats.episodes;
  }

  const Snapshot before = snapshot_params(policy.params(), adam);
  Rng shuffle_rng(shuffle_seed);
  const int L = policy.config().d_laser;
  const int H = policy.config().hidden;

  std::vector<int> order(buffer.chunks.size());
  std::iota(order.begin(), order.end(), 0);

  double policy_loss_acc = 0.0, value_loss_acc = 0.0, entropy_acc = 0.0;
  int loss_samples = 0;
  bool failed = false;

  for (int epoch = 0; epoch < cfg.epochs_per_batch && !failed; ++epoch) {
    // Fisher-Yates with the local stream.
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
      std::swap(order[i], order[shuffle_rng.uniform_int(0, i)]);
    }

    size_t cursor = 0;
    while (cursor < order.size() && !failed) {
      std::vector<int> mb;
      int mb_transitions = 0;
      while (cursor < order.size() && mb_transitions < cfg.minibatch_size) {
        mb.push_back(order[cursor]);
        mb_transitions += buffer.chunks[order[cursor]].len;
        ++cursor;
      }
      ChunkBatch batch = build_chunk_batch(buffer, mb, L, H);
      if (batch.n_valid == 0) continue;

      Graph g;
      Graph::Id h = g.constant(batch.h0);
      Graph::Id c = g.constant(batch.c0);
      Graph::Id policy_sum = -1, value_sum = -1, entropy_sum = -1;
      for (int t = 0; t < batch.T; ++t) {
        auto out = policy.forward(g, g.constant(batch.feg_in[t]),
                                  g.constant(batch.laser3[t]),
                                  g.constant(batch.goal[t]), g.constant(batch.vel[t]),
                                  h, c);
        h = out.h;
        c = out.c;
        StepLossNodes nodes = step_loss(g, out, batch.steps[t], cfg);
        Graph::Id mask = g.constant(batch.valid[t]);
        Graph::Id p_masked = g.sum(g.mul(nodes.policy_term, mask));
        Graph::Id v_masked = g.sum(g.mul(nodes.value_term, mask));
        Graph::Id e_masked = g.sum(g.mul(nodes.entropy, mask));
        policy_sum = t == 0 ? p_masked : g.add(policy_sum, p_masked);
        value_sum = t == 0 ? v_masked : g.add(value_sum, v_masked);
        entropy_sum = t == 0 ? e_masked : g.add(entropy_sum, e_masked);
      }
      const double inv_n = 1.0 / batch.n_valid;
      Graph::Id loss = g.add(g.scale(policy_sum, inv_n),
                             g.scale(value_sum, cfg.value_coeff * inv_n));

      const double loss_val = g.value(loss).data[0];
      if (!std::isfinite(loss_val)) {
        failed = true;
        break;
      }
      policy.params().zero_grads();
      g.backward(loss);
      if (!policy.params().grads_finite()) {
        failed = true;
        break;
      }
      adam_step(policy.params(), adam, cfg.learning_rate, cfg.max_grad_norm);

      policy_loss_acc += g.value(policy_sum).data[0] * inv_n;
      value_loss_acc += g.value(value_sum).data[0] * inv_n;
      entropy_acc += g.value(entropy_sum).data[0] * inv_n;
      loss_samples += 1;
    }
  }

  if (failed) {
    restore_params(policy.params(), adam, before);
    stats.aborted_non_finite = true;
  } else if (loss_samples > 0) {
    stats.policy_loss = policy_loss_acc / loss_samples;
    stats.value_loss = value_loss_acc / loss_samples;
    stats.entropy = entropy_acc / loss_samples;
    stats.kl = mean_kl(policy, buffer);
  }
  stats.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

double mean_kl(const PolicyNetwork& policy, const RolloutBuffer& buffer) {
  if (buffer.chunks.empty()) return 0.0;
  const int L = policy.config().d_laser;
  const int H = policy.config().hidden;
  // One big batch over all chunks; forward only.
  std::vector<int> idx(buffer.chunks.size());
  std::iota(idx.begin(), idx.end(), 0);
  ChunkBatch batch = build_chunk_batch(buffer, idx, L, H);
  Graph g;
  Graph::Id h = g.constant(batch.h0);
  Graph::Id c = g.constant(batch.c0);
  double kl_sum = 0.0;
  int n = 0;
  for (int t = 0; t < batch.T; ++t) {
    auto out = policy.forward(g, g.constant(batch.feg_in[t]), g.constant(batch.laser3[t]),
                              g.constant(batch.goal[t]), g.constant(batch.vel[t]), h, c);
    h = out.h;
    c = out.c;
    const Tensor& mean_new = g.value(out.mean_pre);
    const Tensor& log_std_new = g.value(out.log_std);
    for (int b = 0; b < batch.B; ++b) {
      const Transition* tr = batch.steps[t][b];
      if (tr == nullptr) continue;
      double kl = 0.0;
      for (int d = 0; d < 2; ++d) {
        const double lo = tr->old_log_std[d];
        const double ln = log_std_new.data[2 * b + d];
        const double mo = tr->old_mean_pre[d];
        const double mn = mean_new.data[2 * b + d];
        kl += (ln - lo) +
              0.5 * (std::exp(2.0 * lo) + (mo - mn) * (mo - mn)) * std::exp(-2.0 * ln) -
              0.5;
      }
      kl_sum += kl;
      n += 1;
    }
  }
  return n > 0 ? kl_sum / n : 0.0;
}

int curriculum_advance(const std::vector<bool>& success_history, int stage, int n_stages,
                       double threshold, int window) {
  if (stage >= n_stages - 1) return stage;
  if (static_cast<int>(success_history.size()) < window) return stage;
  int succ = 0;
  for (size_t i = success_history.size() - window; i < success_history.size(); ++i) {
    succ += success_history[i] ? 1 : 0;
  }
  const double rate = static_cast<double>(succ) / window;
  return rate >= threshold ? stage + 1 : stage;
}

}  // namespace plnav::train
