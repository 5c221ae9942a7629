#pragma once

#include <cstdint>
#include <vector>

#include "plnav/world.hpp"

namespace plnav {

/// Range image produced by the pinhole renderer. Values are Euclidean
/// distances along each pixel ray, clamped to (0, max_range].
struct DepthImage {
  int height = 0;
  int width = 0;
  double max_range = 6.0;
  std::vector<double> values;  // row-major

  double at(int i, int j) const { return values[static_cast<size_t>(i) * width + j]; }
  double& at(int i, int j) { return values[static_cast<size_t>(i) * width + j]; }
};

/// Binary mask over the same pixel grid: 0 = traversable surface (plain
/// floor or slope), 1 = everything else (obstacles, special floor,
/// background beyond max_range).
struct TraversabilityMask {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> values;

  uint8_t at(int i, int j) const { return values[static_cast<size_t>(i) * width + j]; }
  uint8_t& at(int i, int j) { return values[static_cast<size_t>(i) * width + j]; }
};

enum class SurfaceKind : uint8_t {
  background,     // no hit within max_range
  floor,          // plain ground plane
  slope,          // traversable inclined patch
  obstacle,       // solid / table_top / cone volume
  special_floor,  // floor-level blocking patch (water, clothes analogs)
  agent_body      // another agent's cylinder
};

struct HitRecord {
  double distance = 0.0;
  SurfaceKind kind = SurfaceKind::background;
  int index = -1;  // obstacle or agent index when applicable
};

/// Depth image, traversability mask and the per-pixel first-hit records they
/// were both derived from; one ray cast per pixel.
struct RenderResult {
  DepthImage depth;
  TraversabilityMask mask;
  std::vector<HitRecord> hits;  // row-major, same grid

  const HitRecord& hit(int i, int j) const {
    return hits[static_cast<size_t>(i) * depth.width + j];
  }
};

/// Casts one ray per pixel from the camera mounted at the agent pose
/// (position, heading, camera_height). Surfaces: the floor plane, slope
/// patches, extruded obstacle volumes (including raised table_top slabs and
/// tapered cones), zero-thickness special_floor patches, and other agents as
/// vertical cylinders. World bounds are episode fences, not geometry; they
/// are never rendered.
RenderResult render_scene(const WorldState& world, int agent_index,
                          const CameraModel& camera);

DepthImage render_depth(const WorldState& world, int agent_index,
                        const CameraModel& camera);
TraversabilityMask render_traversability(const WorldState& world, int agent_index,
                                         const CameraModel& camera);

/// Bearing (radians, positive left) of image column j; columns are
/// tan-spaced across the horizontal FOV as pinhole pixel centers are.
double column_bearing(const CameraModel& camera, int j);

/// Planar single-line scan at a fixed height, cast along the same bearings as
/// the image columns so its entries align with pseudo-laser entries. Returns
/// width distances clamped to (0, max_range]; max_range where nothing is hit.
/// Only surfaces whose height interval contains scan_height are visible;
/// cones are tested against their tapered radius at that height.
std::vector<double> ideal_planar_laser(const WorldState& world, int agent_index,
                                       const CameraModel& camera, double scan_height);

/// Height of the cylinder other agents are rendered as.
constexpr double kAgentBodyHeight = 0.5;

/// Smallest depth the renderer will emit; 0 is reserved as the masked-out
/// sentinel downstream.
constexpr double kMinDepth = 1e-3;

}  // namespace plnav
