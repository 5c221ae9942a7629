#include "plnav/sensing.hpp"

#include <algorithm>
#include <stdexcept>

namespace plnav {

std::string to_string(SensingVariant v) {
  switch (v) {
    case SensingVariant::ideal_laser_bottom: return "ideal_laser_bottom";
    case SensingVariant::ideal_laser_top: return "ideal_laser_top";
    case SensingVariant::depth_1d_slice: return "depth_1d_slice";
    case SensingVariant::depth_minpool: return "depth_minpool";
    case SensingVariant::depth_1d_semantic: return "depth_1d_semantic";
    case SensingVariant::depth_minpool_semantic: return "depth_minpool_semantic";
    case SensingVariant::depth_minpool_semantic_noise: return "depth_minpool_semantic_noise";
  }
  return "depth_minpool_semantic";
}

SensingVariant sensing_variant_from_string(const std::string& s) {
  if (s == "ideal_laser_bottom") return SensingVariant::ideal_laser_bottom;
  if (s == "ideal_laser_top") return SensingVariant::ideal_laser_top;
  if (s == "depth_1d_slice") return SensingVariant::depth_1d_slice;
  if (s == "depth_minpool") return SensingVariant::depth_minpool;
  if (s == "depth_1d_semantic") return SensingVariant::depth_1d_semantic;
  if (s == "depth_minpool_semantic") return SensingVariant::depth_minpool_semantic;
  if (s == "depth_minpool_semantic_noise") return SensingVariant::depth_minpool_semantic_noise;
  throw std::invalid_argument("unknown sensing variant: " + s);
}

namespace {

PseudoLaser row_slice(const DepthImage& depth, const TraversabilityMask* mask, int row) {
  PseudoLaser laser;
  laser.max_range = depth.max_range;
  laser.ranges.resize(depth.width);
  for (int j = 0; j < depth.width; ++j) {
    double v = depth.at(row, j);
    if (mask != nullptr && mask->at(row, j) == 0) v = depth.max_range;  // masked-out floor
    laser.ranges[j] = v;
  }
  return laser;
}

PseudoLaser from_ranges(std::vector<double> ranges, double max_range) {
  PseudoLaser laser;
  laser.ranges = std::move(ranges);
  laser.max_range = max_range;
  return laser;
}

}  // namespace

PseudoLaser pseudo_laser_from_camera(const WorldState& world, int agent_index,
                                     const CameraModel& camera) {
  RenderResult r = render_scene(world, agent_index, camera);
  return slice_min_pool(apply_semantic_mask(r.depth, r.mask));
}

PseudoLaser sense_pseudo_laser(const WorldState& world, int agent_index,
                               const CameraModel& camera, const SensingConfig& cfg) {
  switch (cfg.variant) {
    case SensingVariant::ideal_laser_bottom:
      return from_ranges(
          ideal_planar_laser(world, agent_index, camera, cfg.bottom_laser_height),
          camera.max_range);
    case SensingVariant::ideal_laser_top:
      return from_ranges(
          ideal_planar_laser(world, agent_index, camera, cfg.top_laser_height),
          camera.max_range);
    case SensingVariant::depth_1d_slice: {
      RenderResult r = render_scene(world, agent_index, camera);
      const int row = std::clamp(static_cast<int>(cfg.slice_row_frac * camera.height),
                                 0, camera.height - 1);
      return row_slice(r.depth, nullptr, row);
    }
    case SensingVariant::depth_1d_semantic: {
      RenderResult r = render_scene(world, agent_index, camera);
      const int row = std::clamp(static_cast<int>(cfg.slice_row_frac * camera.height),
                                 0, camera.height - 1);
      return row_slice(r.depth, &r.mask, row);
    }
    case SensingVariant::depth_minpool: {
      RenderResult r = render_scene(world, agent_index, camera);
      TraversabilityMask all_ones = r.mask;
      std::fill(all_ones.values.begin(), all_ones.values.end(), uint8_t{1});
      return slice_min_pool(apply_semantic_mask(r.depth, all_ones));
    }
    case SensingVariant::depth_minpool_semantic:
    case SensingVariant::depth_minpool_semantic_noise:
      return pseudo_laser_from_camera(world, agent_index, camera);
  }
  throw std::logic_error("unreachable sensing variant");
}

}  // namespace plnav
