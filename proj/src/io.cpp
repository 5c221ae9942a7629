#include "plnav/io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace plnav {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace

void write_pgm(const std::string& path, const DepthImage& depth) {
  std::ofstream out = open_out(path);
  out << "P2\n" << depth.width << " " << depth.height << "\n255\n";
  for (int i = 0; i < depth.height; ++i) {
    for (int j = 0; j < depth.width; ++j) {
      const int v = static_cast<int>(255.0 * depth.at(i, j) / depth.max_range);
      out << std::clamp(v, 0, 255) << (j + 1 == depth.width ? '\n' : ' ');
    }
  }
}

void write_pgm(const std::string& path, const TraversabilityMask& mask) {
  std::ofstream out = open_out(path);
  out << "P2\n" << mask.width << " " << mask.height << "\n255\n";
  for (int i = 0; i < mask.height; ++i) {
    for (int j = 0; j < mask.width; ++j) {
      out << (mask.at(i, j) ? 255 : 0) << (j + 1 == mask.width ? '\n' : ' ');
    }
  }
}

void write_grid_csv(const std::string& path, int height, int width,
                    const std::vector<double>& values) {
  std::ofstream out = open_out(path);
  out.precision(17);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      out << values[static_cast<size_t>(i) * width + j] << (j + 1 == width ? '\n' : ',');
    }
  }
}

void write_laser_csv(const std::string& path, const PseudoLaser& laser) {
  std::ofstream out = open_out(path);
  out.precision(17);
  for (double r : laser.ranges) out << r << "\n";
}

PseudoLaser read_laser_csv(const std::string& path, double max_range) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  PseudoLaser laser;
  laser.max_range = max_range;
  double v;
  while (in >> v) laser.ranges.push_back(v);
  if (laser.ranges.empty()) throw std::runtime_error("empty laser csv: " + path);
  return laser;
}

}  // namespace plnav
