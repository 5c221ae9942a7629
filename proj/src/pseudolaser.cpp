#include "plnav/pseudolaser.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plnav {

void NoiseParams::validate() const {
  if (!(junction_threshold > 0.0)) {
    throw std::invalid_argument("noise: junction_threshold must be > 0");
  }
  if (neighborhood_halfwidth < 1) {
    throw std::invalid_argument("noise: neighborhood_halfwidth must be >= 1");
  }
  if (gaussian_scale < 0.0) {
    throw std::invalid_argument("noise: gaussian_scale must be >= 0");
  }
}

MaskedDepth apply_semantic_mask(const DepthImage& depth, const TraversabilityMask& mask) {
  if (depth.height != mask.height || depth.width != mask.width) {
    throw std::invalid_argument("apply_semantic_mask: shape mismatch");
  }
  MaskedDepth out;
  out.height = depth.height;
  out.width = depth.width;
  out.max_range = depth.max_range;
  out.values.resize(depth.values.size());
  for (size_t i = 0; i < depth.values.size(); ++i) {
    out.values[i] = mask.values[i] ? depth.values[i] : 0.0;
  }
  return out;
}

PseudoLaser slice_min_pool(const MaskedDepth& m) {
  if (m.height % 2 != 0) {
    throw std::invalid_argument("slice_min_pool: image height must be even");
  }
  PseudoLaser laser;
  laser.max_range = m.max_range;
  laser.ranges.resize(m.width);
  const int lo = m.height / 2;
  for (int j = 0; j < m.width; ++j) {
    double best = m.max_range;
    bool found = false;
    for (int i = lo; i < m.height; ++i) {
      const double v = m.at(i, j);
      if (v == 0.0) continue;
      if (!found || v < best) {
        best = v;
        found = true;
      }
    }
    laser.ranges[j] = best;
  }
  return laser;
}

std::vector<std::pair<int, int>> detect_junctions(const PseudoLaser& laser, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("detect_junctions: alpha must be > 0");
  std::vector<std::pair<int, int>> junctions;
  for (int j = 0; j + 1 < laser.d_laser(); ++j) {
    if (std::abs(laser.ranges[j + 1] - laser.ranges[j]) > alpha) {
      junctions.emplace_back(j, j + 1);
    }
  }
  return junctions;
}

PseudoLaser augment_noise(const PseudoLaser& laser, const NoiseParams& params,
                          uint64_t rng_seed) {
  params.validate();
  if (!params.enabled) return laser;

  const int n = laser.d_laser();
  PseudoLaser out = laser;
  std::vector<uint8_t> in_window(n, 0);

  const auto junctions = detect_junctions(laser, params.junction_threshold);
  const int hw = params.neighborhood_halfwidth;
  for (const auto& [j, _] : junctions) {
    const int a = std::max(0, j - hw + 1);
    const int b = std::min(n - 1, j + hw);
    for (int i = a; i <= b; ++i) in_window[i] = 1;
  }

  // Interpolate each maximal window run between the original values just
  // outside it; overlapping windows have already merged in in_window.
  int i = 0;
  while (i < n) {
    if (!in_window[i]) {
      ++i;
      continue;
    }
    int a = i;
    while (i < n && in_window[i]) ++i;
    int b = i - 1;
    const int la = std::max(a - 1, 0);
    const int rb = std::min(b + 1, n - 1);
    const double left = laser.ranges[la];
    const double right = laser.ranges[rb];
    if (rb > la) {
      for (int k = a; k <= b; ++k) {
        const double t = static_cast<double>(k - la) / static_cast<double>(rb - la);
        out.ranges[k] = left + t * (right - left);
      }
    }
  }

  Rng rng(rng_seed);
  for (int k = 0; k < n; ++k) {
    if (!in_window[k] && params.gaussian_scale > 0.0) {
      out.ranges[k] += rng.gaussian() * params.gaussian_scale * laser.ranges[k];
    }
    out.ranges[k] = std::clamp(out.ranges[k], kNoiseClampFloor, laser.max_range);
  }
  return out;
}

}  // namespace plnav
