#pragma once

#include <string>
#include <vector>

#include "plnav/pseudolaser.hpp"
#include "plnav/render.hpp"

namespace plnav {

/// ASCII PGM (P2), values scaled to [0, 255].
void write_pgm(const std::string& path, const DepthImage& depth);
void write_pgm(const std::string& path, const TraversabilityMask& mask);

void write_grid_csv(const std::string& path, int height, int width,
                    const std::vector<double>& values);

/// One range per line.
void write_laser_csv(const std::string& path, const PseudoLaser& laser);
PseudoLaser read_laser_csv(const std::string& path, double max_range);

}  // namespace plnav
