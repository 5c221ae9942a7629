#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "plnav/pseudolaser.hpp"
#include "plnav/rng.hpp"

using namespace plnav;

namespace {

DepthImage random_depth(Rng& rng, int h, int w, double max_range = 6.0) {
  DepthImage d;
  d.height = h;
  d.width = w;
  d.max_range = max_range;
  d.values.resize(static_cast<size_t>(h) * w);
  for (auto& v : d.values) v = rng.uniform(0.05, max_range);
  return d;
}

TraversabilityMask random_mask(Rng& rng, int h, int w, double p_blocked = 0.5) {
  TraversabilityMask m;
  m.height = h;
  m.width = w;
  m.values.resize(static_cast<size_t>(h) * w);
  for (auto& v : m.values) v = rng.uniform() < p_blocked ? 1 : 0;
  return m;
}

/// Brute-force column scan over nonzero lower-half entries.
std::vector<double> min_pool_oracle(const MaskedDepth& m) {
  std::vector<double> out(m.width, m.max_range);
  for (int j = 0; j < m.width; ++j) {
    double best = m.max_range;
    bool any = false;
    for (int i = m.height / 2; i < m.height; ++i) {
      const double v = m.at(i, j);
      if (v != 0.0 && (!any || v < best)) {
        best = v;
        any = true;
      }
    }
    out[j] = best;
  }
  return out;
}

PseudoLaser make_laser(std::vector<double> ranges, double max_range = 6.0) {
  PseudoLaser l;
  l.ranges = std::move(ranges);
  l.max_range = max_range;
  return l;
}

}  // namespace

TEST_CASE("semantic mask: all-ones mask is identity, all-zeros blanks") {
  Rng rng(1);
  DepthImage d = random_depth(rng, 8, 10);
  TraversabilityMask ones = random_mask(rng, 8, 10, 2.0);
  MaskedDepth md = apply_semantic_mask(d, ones);
  for (size_t i = 0; i < d.values.size(); ++i) CHECK(md.values[i] == d.values[i]);

  TraversabilityMask zeros = random_mask(rng, 8, 10, -1.0);
  md = apply_semantic_mask(d, zeros);
  for (double v : md.values) CHECK(v == 0.0);
}

TEST_CASE("semantic mask equals the elementwise product oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    DepthImage d = random_depth(rng, 6, 12);
    TraversabilityMask m = random_mask(rng, 6, 12);
    MaskedDepth md = apply_semantic_mask(d, m);
    for (size_t i = 0; i < d.values.size(); ++i) {
      CHECK(md.values[i] == d.values[i] * m.values[i]);
    }
  }
}

TEST_CASE("semantic mask rejects shape mismatch") {
  Rng rng(3);
  DepthImage d = random_depth(rng, 8, 10);
  TraversabilityMask m = random_mask(rng, 8, 12);
  CHECK_THROWS_AS(apply_semantic_mask(d, m), std::invalid_argument);
}

TEST_CASE("masking is idempotent after zero preservation") {
  Rng rng(4);
  DepthImage d = random_depth(rng, 8, 10);
  TraversabilityMask m = random_mask(rng, 8, 10);
  MaskedDepth once = apply_semantic_mask(d, m);
  DepthImage as_depth;
  as_depth.height = once.height;
  as_depth.width = once.width;
  as_depth.max_range = once.max_range;
  as_depth.values = once.values;
  MaskedDepth twice = apply_semantic_mask(as_depth, m);
  for (size_t i = 0; i < once.values.size(); ++i) {
    CHECK(twice.values[i] == once.values[i]);
  }
}

TEST_CASE("min pool: all-traversable column reports the sentinel") {
  MaskedDepth m;
  m.height = 6;
  m.width = 1;
  m.max_range = 6.0;
  m.values = {1.0, 1.0, 1.0, 0.0, 0.0, 0.0};  // lower half all zero
  PseudoLaser l = slice_min_pool(m);
  CHECK(l.ranges[0] == 6.0);
}

TEST_CASE("min pool skips zeros") {
  MaskedDepth m;
  m.height = 8;
  m.width = 1;
  m.max_range = 6.0;
  m.values = {9, 9, 9, 9, 3.2, 0.0, 1.5, 2.0};
  PseudoLaser l = slice_min_pool(m);
  CHECK(l.ranges[0] == 1.5);
}

TEST_CASE("min pool equals brute-force scan on random maps") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    DepthImage d = random_depth(rng, 8, 8);
    TraversabilityMask m = random_mask(rng, 8, 8);
    MaskedDepth md = apply_semantic_mask(d, m);
    PseudoLaser l = slice_min_pool(md);
    const auto oracle = min_pool_oracle(md);
    REQUIRE(l.d_laser() == 8);
    for (int j = 0; j < 8; ++j) CHECK(l.ranges[j] == oracle[j]);
  }
}

TEST_CASE("min pool dominance invariant") {
  Rng rng(6);
  DepthImage d = random_depth(rng, 10, 16);
  TraversabilityMask m = random_mask(rng, 10, 16);
  MaskedDepth md = apply_semantic_mask(d, m);
  PseudoLaser l = slice_min_pool(md);
  for (int j = 0; j < 16; ++j) {
    bool equals_entry = false;
    for (int i = 5; i < 10; ++i) {
      const double v = md.at(i, j);
      if (v == 0.0) continue;
      CHECK(l.ranges[j] <= v);
      if (l.ranges[j] == v) equals_entry = true;
    }
    if (!equals_entry) CHECK(l.ranges[j] == md.max_range);
  }
}

TEST_CASE("min pool requires an even height") {
  MaskedDepth m;
  m.height = 7;
  m.width = 2;
  m.values.assign(14, 1.0);
  CHECK_THROWS_AS(slice_min_pool(m), std::invalid_argument);
}

TEST_CASE("junction detection") {
  PseudoLaser l = make_laser({1.0, 1.0, 3.0});
  auto j = detect_junctions(l, 0.5);
  REQUIRE(j.size() == 1);
  CHECK(j[0].first == 1);
  CHECK(j[0].second == 2);

  PseudoLaser flat = make_laser({2.0, 2.0, 2.0, 2.0});
  CHECK(detect_junctions(flat, 0.5).empty());
}

TEST_CASE("staircase: only steps above the threshold are junctions") {
  // Steps of 0.4 and 0.6 with alpha = 0.5: only the 0.6 steps count.
  PseudoLaser l = make_laser({1.0, 1.4, 2.0, 2.4, 3.0});
  auto junctions = detect_junctions(l, 0.5);
  std::vector<std::pair<int, int>> expected = {{1, 2}, {3, 4}};
  REQUIRE(junctions.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(junctions[i] == expected[i]);
  }
}

TEST_CASE("junction detection is shift invariant") {
  Rng rng(7);
  std::vector<double> base(32);
  for (auto& v : base) v = rng.uniform(0.5, 5.0);
  auto j1 = detect_junctions(make_laser(base), 0.5);
  std::vector<double> shifted = base;
  for (auto& v : shifted) v += 0.77;
  auto j2 = detect_junctions(make_laser(shifted, 12.0), 0.5);
  CHECK(j1 == j2);
}

TEST_CASE("noise disabled or trivially zero is identity") {
  NoiseParams p;
  p.enabled = false;
  PseudoLaser l = make_laser({1.0, 2.0, 5.0, 5.0});
  PseudoLaser out = augment_noise(l, p, 99);
  CHECK(out.ranges == l.ranges);

  NoiseParams p2;
  p2.gaussian_scale = 0.0;
  PseudoLaser flat = make_laser({2.0, 2.0, 2.0, 2.0});
  out = augment_noise(flat, p2, 99);
  CHECK(out.ranges == flat.ranges);
}

TEST_CASE("single junction window is the hand-computed affine line") {
  // Junction between indices 4 and 5; halfwidth 2 -> window 3..6,
  // interpolated between L(2)=2 and L(7)=5.
  NoiseParams p;
  p.neighborhood_halfwidth = 2;
  p.gaussian_scale = 0.0;
  PseudoLaser l = make_laser({2, 2, 2, 2, 2, 5, 5, 5, 5, 5});
  PseudoLaser out = augment_noise(l, p, 1);
  CHECK(out.ranges[2] == doctest::Approx(2.0));
  CHECK(out.ranges[3] == doctest::Approx(2.6));
  CHECK(out.ranges[4] == doctest::Approx(3.2));
  CHECK(out.ranges[5] == doctest::Approx(3.8));
  CHECK(out.ranges[6] == doctest::Approx(4.4));
  CHECK(out.ranges[7] == doctest::Approx(5.0));
}

TEST_CASE("windows are affine: zero second difference inside") {
  Rng rng(8);
  NoiseParams p;
  p.gaussian_scale = 0.0;  // isolate the interpolation
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(48);
    double level = rng.uniform(1.0, 3.0);
    for (auto& x : v) {
      if (rng.uniform() < 0.1) level = rng.uniform(0.5, 5.5);
      x = level;
    }
    PseudoLaser l = make_laser(v);
    const auto junctions = detect_junctions(l, p.junction_threshold);
    if (junctions.empty()) continue;
    PseudoLaser out = augment_noise(l, p, trial);

    std::vector<bool> in_window(v.size(), false);
    for (auto [j, _] : junctions) {
      for (int k = std::max(0, j - p.neighborhood_halfwidth + 1);
           k <= std::min<int>(v.size() - 1, j + p.neighborhood_halfwidth); ++k) {
        in_window[k] = true;
      }
    }
    for (size_t k = 1; k + 1 < v.size(); ++k) {
      if (in_window[k - 1] && in_window[k] && in_window[k + 1]) {
        const double second_diff =
            out.ranges[k + 1] - 2.0 * out.ranges[k] + out.ranges[k - 1];
        CHECK(std::abs(second_diff) < 1e-12);
      }
      if (!in_window[k]) {
        CHECK(out.ranges[k] == v[k]);  // gaussian_scale 0: untouched outside
      }
    }
  }
}

TEST_CASE("overlapping windows merge into one affine span") {
  NoiseParams p;
  p.neighborhood_halfwidth = 3;
  p.gaussian_scale = 0.0;
  // Two junctions 3 apart: windows overlap and must merge.
  PseudoLaser l = make_laser({1, 1, 1, 1, 2.0, 2.0, 2.0, 3.2, 3.2, 3.2, 3.2, 3.2});
  auto junctions = detect_junctions(l, 0.5);
  REQUIRE(junctions.size() == 2);
  PseudoLaser out = augment_noise(l, p, 5);
  // Merged window spans one affine run between the outside endpoints.
  for (int k = 2; k <= 9; ++k) {
    const double second_diff = out.ranges[k + 1] - 2.0 * out.ranges[k] + out.ranges[k - 1];
    CHECK(std::abs(second_diff) < 1e-12);
  }
}

TEST_CASE("noise preserves length, positivity and the clamp") {
  Rng rng(9);
  NoiseParams p;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(24);
    for (auto& x : v) x = rng.uniform(0.02, 6.0);
    PseudoLaser l = make_laser(v);
    PseudoLaser out = augment_noise(l, p, trial * 31 + 7);
    REQUIRE(out.d_laser() == l.d_laser());
    for (double x : out.ranges) {
      CHECK(x >= kNoiseClampFloor);
      CHECK(x <= l.max_range);
    }
  }
}

TEST_CASE("inserting a non-traversable obstacle never raises any laser entry") {
  // Composed property across the renderer and the slicing pipeline.
  Rng rng(44);
  CameraModel camera;
  camera.height = 16;
  camera.width = 24;
  for (int trial = 0; trial < 15; ++trial) {
    WorldState world;
    world.bounds = {{-6, -6}, {6, 6}};
    AgentState a;
    a.heading = rng.uniform(-kPi, kPi);
    world.agents = {a};
    world.obstacles.push_back(
        make_special_floor(make_box({rng.uniform(0.5, 2.5), rng.uniform(-1, 1)},
                                    rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5))));
    world.obstacles.push_back(make_slope(
        make_box({rng.uniform(0.5, 2.5), rng.uniform(-1, 1)}, 1.2, 1.2), 0.0, 0.1,
        {0.0, 0.0}, {0.05, 0.0}));

    RenderResult before = render_scene(world, 0, camera);
    PseudoLaser l_before = slice_min_pool(apply_semantic_mask(before.depth, before.mask));

    switch (trial % 3) {
      case 0:
        world.obstacles.push_back(make_solid_circle(
            {rng.uniform(0.3, 3.0), rng.uniform(-1.5, 1.5)}, rng.uniform(0.1, 0.5),
            0.0, rng.uniform(0.2, 0.6)));
        break;
      case 1:
        world.obstacles.push_back(make_table_top(
            make_box({rng.uniform(0.3, 3.0), rng.uniform(-1.5, 1.5)}, 1.0, 0.8),
            0.15, 0.25));
        break;
      default:
        world.obstacles.push_back(make_cone({rng.uniform(0.3, 3.0),
                                             rng.uniform(-1.5, 1.5)},
                                            rng.uniform(0.1, 0.3), 0.0, 0.3));
        break;
    }
    RenderResult after = render_scene(world, 0, camera);
    PseudoLaser l_after = slice_min_pool(apply_semantic_mask(after.depth, after.mask));
    for (int j = 0; j < camera.width; ++j) {
      CHECK(l_after.ranges[j] <= l_before.ranges[j] + 1e-12);
    }
  }
}

TEST_CASE("gaussian noise std tracks 0.07 x value") {
  // Reduced-size version of the acceptance statistic: constant vector, no
  // junctions, sample std of each entry near 0.07 * 2.0 = 0.14.
  NoiseParams p;
  const int n = 8;
  const int draws = 20000;
  PseudoLaser l = make_laser(std::vector<double>(n, 2.0));
  std::vector<double> sum(n, 0.0), sq(n, 0.0);
  for (int k = 0; k < draws; ++k) {
    PseudoLaser out = augment_noise(l, p, 1000 + k);
    for (int j = 0; j < n; ++j) {
      const double d = out.ranges[j] - 2.0;
      sum[j] += d;
      sq[j] += d * d;
    }
  }
  for (int j = 0; j < n; ++j) {
    const double mean = sum[j] / draws;
    const double std = std::sqrt(sq[j] / draws - mean * mean);
    // 3-sigma band for a sample std from 20k draws is about +-0.2%.
    CHECK(std == doctest::Approx(0.14).epsilon(0.025));
    CHECK(std::abs(mean) < 0.005);
  }
}
