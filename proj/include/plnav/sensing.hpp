#pragma once

#include <string>

#include "plnav/pseudolaser.hpp"
#include "plnav/render.hpp"

namespace plnav {

/// How the per-bearing range vector is produced from the world. The default
/// pipeline is depth rendering + semantic masking + column min pooling;
/// the other variants exist for ablation runs.
enum class SensingVariant {
  ideal_laser_bottom,           // planar scan near the floor
  ideal_laser_top,              // planar scan near the camera height
  depth_1d_slice,               // single raw-depth row
  depth_minpool,                // min pooling without the semantic mask
  depth_1d_semantic,            // single masked-depth row
  depth_minpool_semantic,       // the full pipeline
  depth_minpool_semantic_noise  // same pipeline; differs only in training-time noise
};

std::string to_string(SensingVariant v);
SensingVariant sensing_variant_from_string(const std::string& s);

struct SensingConfig {
  SensingVariant variant = SensingVariant::depth_minpool_semantic;
  double bottom_laser_height = 0.03;
  double top_laser_height = 0.25;
  /// Row used by the 1-D slice variants, as a fraction of image height. The
  /// default is the first row below the horizon: the closest pinhole analog
  /// of a planar scan at camera height.
  double slice_row_frac = 0.5;
};

/// Produces the pseudo-laser for one agent under the chosen sensing variant.
/// All variants share the camera FOV and emit one entry per image column.
PseudoLaser sense_pseudo_laser(const WorldState& world, int agent_index,
                               const CameraModel& camera, const SensingConfig& cfg);

/// Full-pipeline convenience used by tests: render, mask, slice.
PseudoLaser pseudo_laser_from_camera(const WorldState& world, int agent_index,
                                     const CameraModel& camera);

}  // namespace plnav
