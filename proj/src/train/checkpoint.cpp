#include "plnav/train/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace plnav::train {

using nlohmann::json;
using nn::Param;

namespace {

json tensor_to_json(const nn::Tensor& t) {
  json j;
  j["shape"] = t.shape;
  std::vector<double> data(t.data.data(), t.data.data() + t.size());
  j["data"] = data;
  return j;
}

nn::Tensor tensor_from_json(const json& j) {
  const std::vector<int> shape = j.at("shape").get<std::vector<int>>();
  const std::vector<double> data = j.at("data").get<std::vector<double>>();
  nn::Tensor t = nn::Tensor::zeros(shape);
  if (static_cast<Eigen::Index>(data.size()) != t.size()) {
    throw std::runtime_error("checkpoint: tensor size mismatch");
  }
  for (size_t i = 0; i < data.size(); ++i) t.data[i] = data[i];
  return t;
}

json policy_config_to_json(const nn::PolicyConfig& p) {
  return json{{"d_laser", p.d_laser},
              {"hidden", p.hidden},
              {"feg_channels", p.feg_channels},
              {"trunk_channels", p.trunk_channels},
              {"trunk_dense", p.trunk_dense},
              {"log_std_init", p.log_std_init},
              {"use_feg", p.use_feg},
              {"use_lstm", p.use_lstm}};
}

nn::PolicyConfig policy_config_from_json(const json& j) {
  nn::PolicyConfig p;
  p.d_laser = j.at("d_laser").get<int>();
  p.hidden = j.at("hidden").get<int>();
  p.feg_channels = j.at("feg_channels").get<int>();
  p.trunk_channels = j.at("trunk_channels").get<int>();
  p.trunk_dense = j.at("trunk_dense").get<int>();
  p.log_std_init = j.at("log_std_init").get<double>();
  p.use_feg = j.at("use_feg").get<bool>();
  p.use_lstm = j.at("use_lstm").get<bool>();
  return p;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace

void save_checkpoint(const std::string& path, const PolicyNetwork& policy,
                     const AppConfig& cfg, const AdamState& adam,
                     const CheckpointMeta& meta) {
  json j;
  j["format_version"] = meta.format_version;
  j["config_hash"] = config_compat_hash_hex(cfg);
  j["updates"] = meta.updates;
  j["episodes"] = meta.episodes;
  j["stage"] = meta.stage;
  j["policy_config"] = policy_config_to_json(policy.config());
  j["adam"] = {{"step", adam.step},
               {"beta1", adam.beta1},
               {"beta2", adam.beta2},
               {"eps", adam.eps}};
  json params = json::object();
  json adam_m = json::object();
  json adam_v = json::object();
  for (const Param* p : policy.params().all()) {
    params[p->name] = tensor_to_json(p->value);
    adam_m[p->name] = tensor_to_json(p->adam_m);
    adam_v[p->name] = tensor_to_json(p->adam_v);
  }
  j["params"] = std::move(params);
  j["adam_m"] = std::move(adam_m);
  j["adam_v"] = std::move(adam_v);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump();
}

LoadedCheckpoint peek_checkpoint(const std::string& path) {
  const json j = read_json_file(path);
  LoadedCheckpoint loaded;
  loaded.meta.format_version = j.at("format_version").get<int>();
  if (loaded.meta.format_version != 1) {
    throw std::runtime_error("checkpoint: unsupported format version");
  }
  loaded.meta.config_hash = j.at("config_hash").get<std::string>();
  loaded.meta.updates = j.value("updates", int64_t{0});
  loaded.meta.episodes = j.value("episodes", int64_t{0});
  loaded.meta.stage = j.value("stage", 0);
  loaded.policy_config = policy_config_from_json(j.at("policy_config"));
  loaded.adam.step = j.at("adam").at("step").get<int64_t>();
  loaded.adam.beta1 = j.at("adam").at("beta1").get<double>();
  loaded.adam.beta2 = j.at("adam").at("beta2").get<double>();
  loaded.adam.eps = j.at("adam").at("eps").get<double>();
  return loaded;
}

LoadedCheckpoint load_checkpoint(const std::string& path, PolicyNetwork& policy,
                                 const std::optional<std::string>& expect_hash) {
  const json j = read_json_file(path);
  LoadedCheckpoint loaded = peek_checkpoint(path);
  if (expect_hash.has_value() && *expect_hash != loaded.meta.config_hash) {
    throw std::runtime_error(
        "checkpoint was trained under a different architecture configuration "
        "(stored hash " + loaded.meta.config_hash + ", current " + *expect_hash +
        "); refusing to load");
  }
  const json& params = j.at("params");
  const json& adam_m = j.at("adam_m");
  const json& adam_v = j.at("adam_v");
  for (Param* p : policy.params().all()) {
    if (!params.contains(p->name)) {
      throw std::runtime_error("checkpoint: missing parameter " + p->name);
    }
    nn::Tensor v = tensor_from_json(params.at(p->name));
    if (v.shape != p->value.shape) {
      throw std::runtime_error("checkpoint: shape mismatch for " + p->name);
    }
    p->value = std::move(v);
    p->adam_m = tensor_from_json(adam_m.at(p->name));
    p->adam_v = tensor_from_json(adam_v.at(p->name));
  }
  return loaded;
}

}  // namespace plnav::train
