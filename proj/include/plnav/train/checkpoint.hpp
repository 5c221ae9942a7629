#pragma once

#include <optional>
#include <string>

#include "plnav/config.hpp"
#include "plnav/train/ppo.hpp"

namespace plnav::train {

/// Versioned JSON parameter dump. Doubles are serialized with
/// shortest-round-trip formatting, so save -> load -> forward is
/// bit-identical. The file carries the architecture-compatibility hash of
/// the config it was trained under.
struct CheckpointMeta {
  int format_version = 1;
  std::string config_hash;
  int64_t updates = 0;
  int64_t episodes = 0;
  int stage = 0;
};

void save_checkpoint(const std::string& path, const PolicyNetwork& policy,
                     const AppConfig& cfg, const AdamState& adam,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
  nn::PolicyConfig policy_config;
  CheckpointMeta meta;
  AdamState adam;
};

/// Populates `policy`'s parameters in place (the network must have been
/// built with the stored PolicyConfig). Call peek_checkpoint first to build
/// it. Throws std::runtime_error when expect_hash is set and differs from
/// the stored hash.
LoadedCheckpoint load_checkpoint(const std::string& path, PolicyNetwork& policy,
                                 const std::optional<std::string>& expect_hash);

/// Reads only the stored PolicyConfig and metadata.
LoadedCheckpoint peek_checkpoint(const std::string& path);

}  // namespace plnav::train
