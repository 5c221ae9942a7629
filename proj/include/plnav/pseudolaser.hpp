#pragma once

#include <utility>
#include <vector>

#include "plnav/render.hpp"
#include "plnav/rng.hpp"

namespace plnav {

/// Depth image with traversable pixels zeroed out; 0 is the masked-out
/// sentinel and never a real range.
struct MaskedDepth {
  int height = 0;
  int width = 0;
  double max_range = 6.0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<size_t>(i) * width + j]; }
};

/// One range per image column over the camera's horizontal FOV. Entries are
/// in (0, max_range]; a column with no obstacle reading reports max_range.
struct PseudoLaser {
  std::vector<double> ranges;
  double max_range = 6.0;

  int d_laser() const { return static_cast<int>(ranges.size()); }
};

struct NoiseParams {
  double junction_threshold = 0.5;  // meters
  int neighborhood_halfwidth = 4;   // entries on each side of a junction
  double gaussian_scale = 0.07;     // noise std as a fraction of the value
  bool enabled = true;

  void validate() const;
};

/// Elementwise product of depth and mask; traversable pixels become 0.
/// Throws std::invalid_argument on shape mismatch.
MaskedDepth apply_semantic_mask(const DepthImage& depth, const TraversabilityMask& mask);

/// Column-wise minimum over the nonzero entries of the lower half of the
/// masked depth map. A column whose lower half is entirely masked out
/// reports max_range. Requires an even image height.
PseudoLaser slice_min_pool(const MaskedDepth& m);

/// Indices j where |L(j+1) - L(j)| > alpha, ascending. Each junction sits
/// between entries j and j+1.
std::vector<std::pair<int, int>> detect_junctions(const PseudoLaser& laser, double alpha);

/// Occlusion-edge augmentation: entries within neighborhood_halfwidth of a
/// junction are replaced by the straight line between the values just outside
/// the (merged) window; every entry outside the windows gets zero-mean
/// Gaussian noise with std gaussian_scale * value. Output is clamped to
/// [0.01, max_range]. With params.enabled == false the input is returned
/// unchanged.
PseudoLaser augment_noise(const PseudoLaser& laser, const NoiseParams& params,
                          uint64_t rng_seed);

/// Post-noise clamp floor; keeps entries strictly positive.
constexpr double kNoiseClampFloor = 0.01;

}  // namespace plnav
