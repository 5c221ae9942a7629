#include "plnav/train/rollout.hpp"

#include <cmath>
#include <stdexcept>

namespace plnav::train {

void compute_advantages(RolloutBuffer& buffer, double gamma, double lambda) {
  for (Segment& seg : buffer.segments) {
    const int n = static_cast<int>(seg.steps.size());
    double next_value = seg.terminal ? 0.0 : seg.bootstrap_value;
    double gae = 0.0;
    for (int t = n - 1; t >= 0; --t) {
      Transition& tr = seg.steps[t];
      const double delta = tr.reward + gamma * next_value - tr.value;
      // Chunks within a segment share one episode, so no done-masking here;
      // terminal segments simply start from next_value = 0.
      gae = delta + gamma * lambda * gae;
      tr.advantage = gae;
      tr.ret = tr.advantage + tr.value;
      next_value = tr.value;
    }
  }
  // Batch normalization of advantages.
  double sum = 0.0;
  int count = 0;
  for (const Segment& seg : buffer.segments) {
    for (const Transition& tr : seg.steps) {
      sum += tr.advantage;
      ++count;
    }
  }
  if (count <= 1) return;
  const double mean = sum / count;
  double var = 0.0;
  for (const Segment& seg : buffer.segments) {
    for (const Transition& tr : seg.steps) {
      var += (tr.advantage - mean) * (tr.advantage - mean);
    }
  }
  const double std = std::sqrt(var / count);
  const double inv = std > 1e-12 ? 1.0 / std : 0.0;
  for (Segment& seg : buffer.segments) {
    for (Transition& tr : seg.steps) {
      tr.advantage = (tr.advantage - mean) * inv;
    }
  }
}

RolloutCollector::RolloutCollector(const AppConfig& cfg, const ScenarioSpec& scenario,
                                   uint64_t seed)
    : cfg_(cfg),
      scenario_(scenario),
      rng_(mix_seed(seed, 101)),
      sample_rng_(mix_seed(seed, 202)) {
  envs_.resize(cfg_.trainer.num_envs);
  for (int i = 0; i < cfg_.trainer.num_envs; ++i) {
    envs_[i].env = std::make_unique<NavEnv>(make_env_config(cfg_, cfg_.trainer.augment),
                                            mix_seed(seed, 1000 + i));
    reset_env(i);
  }
}

void RolloutCollector::set_scenario(const ScenarioSpec& scenario) {
  scenario_ = scenario;
  for (int i = 0; i < static_cast<int>(envs_.size()); ++i) reset_env(i);
}

void RolloutCollector::reset_env(int slot) {
  EnvSlot& s = envs_[slot];
  const auto results = s.env->reset(scenario_, rng_.next_u64());
  s.agents.assign(results.size(), {});
  s.episode_reward.assign(results.size(), 0.0);
  for (const AgentStepResult& r : results) {
    AgentStream& stream = s.agents[r.agent];
    stream.hidden = HiddenState::zeros(cfg_.policy.hidden);
    stream.obs = r.obs;
    stream.live = true;
  }
}

RolloutBuffer RolloutCollector::collect(const PolicyNetwork& policy) {
  const TrainerConfig& tc = cfg_.trainer;
  RolloutBuffer buffer;

  // Open segment per (env, agent); flushed on episode end or collection end.
  struct OpenSegment {
    Segment seg;
    int steps_in_chunk = 0;
  };
  std::vector<std::vector<OpenSegment>> open(envs_.size());
  for (size_t e = 0; e < envs_.size(); ++e) {
    open[e].resize(envs_[e].agents.size());
    for (size_t a = 0; a < envs_[e].agents.size(); ++a) {
      open[e][a].seg.hidden_at_chunk = {envs_[e].agents[a].hidden};
    }
  }

  auto flush_segment = [&](OpenSegment& os, bool terminal, double bootstrap) {
    if (os.seg.steps.empty()) return;
    os.seg.terminal = terminal;
    os.seg.bootstrap_value = bootstrap;
    const int seg_index = static_cast<int>(buffer.segments.size());
    const int n = static_cast<int>(os.seg.steps.size());
    for (int start = 0; start < n; start += tc.lstm_unroll) {
      Chunk chunk;
      chunk.segment = seg_index;
      chunk.start = start;
      chunk.len = std::min(tc.lstm_unroll, n - start);
      chunk.ordinal = start / tc.lstm_unroll;
      buffer.chunks.push_back(chunk);
    }
    buffer.total_transitions += n;
    buffer.segments.push_back(std::move(os.seg));
    os = OpenSegment{};
  };

  while (buffer.total_transitions < tc.batch_size) {
    for (size_t e = 0; e < envs_.size(); ++e) {
      EnvSlot& slot = envs_[e];

      std::vector<std::pair<int, Action>> actions;
      struct Pending {
        int agent;
        nn::PolicyNetwork::EvalOut eval;
        std::array<double, 2> u;
        Action act;
        double log_prob;
      };
      std::vector<Pending> pending;
      for (int a = 0; a < static_cast<int>(slot.agents.size()); ++a) {
        AgentStream& stream = slot.agents[a];
        if (!stream.live) continue;
        Pending p;
        p.agent = a;
        p.eval = policy.act(stream.obs, stream.hidden);
        p.act = nn::sample_action(p.eval.dist, sample_rng_, &p.log_prob, &p.u);
        actions.emplace_back(a, p.act);
        pending.push_back(std::move(p));
      }

      const auto results = slot.env->step(actions);

      for (size_t k = 0; k < results.size(); ++k) {
        const AgentStepResult& r = results[k];
        const Pending& p = pending[k];
        AgentStream& stream = slot.agents[r.agent];
        OpenSegment& os = open[e][r.agent];

        Transition tr;
        tr.feg_in = nn::build_feg_input(stream.obs);
        tr.laser3 = nn::laser_frames(stream.obs);
        tr.goal = stream.obs.current().goal;
        tr.vel = stream.obs.current().velocity;
        tr.u = p.u;
        tr.action = {p.act.v, p.act.w_norm};
        tr.old_mean_pre = p.eval.dist.mean_pre;
        tr.old_log_std = p.eval.dist.log_std;
        tr.log_prob = p.log_prob;
        tr.log_prob_gauss = nn::gaussian_log_prob(p.eval.dist, p.u);
        tr.value = p.eval.value;
        tr.reward = r.reward.total;
        os.seg.steps.push_back(std::move(tr));
        os.steps_in_chunk += 1;
        slot.episode_reward[r.agent] += r.reward.total;

        stream.obs = r.obs;
        stream.hidden = p.eval.hidden;
        if (os.steps_in_chunk == tc.lstm_unroll) {
          os.seg.hidden_at_chunk.push_back(stream.hidden);
          os.steps_in_chunk = 0;
        }

        if (r.status != AgentStatus::running) {
          stream.live = false;
          flush_segment(os, /*terminal=*/true, 0.0);
          episodes_completed_ += 1;
          buffer.episode_rewards.push_back(slot.episode_reward[r.agent]);
          buffer.episode_success.push_back(r.status == AgentStatus::arrived);
          success_history_.push_back(r.status == AgentStatus::arrived);
        }
      }

      if (slot.env->episode_done()) {
        reset_env(static_cast<int>(e));
        for (auto& os : open[e]) os = OpenSegment{};
        open[e].resize(slot.agents.size());
        for (size_t a = 0; a < slot.agents.size(); ++a) {
          open[e][a].seg.hidden_at_chunk = {slot.agents[a].hidden};
        }
      }
    }
  }

  // Cut the still-open segments and bootstrap them from the value of the
  // observation that would come next.
  for (size_t e = 0; e < envs_.size(); ++e) {
    for (int a = 0; a < static_cast<int>(open[e].size()); ++a) {
      OpenSegment& os = open[e][a];
      if (os.seg.steps.empty()) continue;
      AgentStream& stream = envs_[e].agents[a];
      const double bootstrap = policy.act(stream.obs, stream.hidden).value;
      flush_segment(os, /*terminal=*/false, bootstrap);
      // The next collection starts a fresh segment from the current hidden.
      open[e][a].seg.hidden_at_chunk = {stream.hidden};
    }
  }

  const int keep = std::max(4 * cfg_.trainer.promote_window, 1000);
  if (static_cast<int>(success_history_.size()) > 2 * keep) {
    success_history_.erase(success_history_.begin(),
                           success_history_.end() - keep);
  }
  return buffer;
}

}  // namespace plnav::train
