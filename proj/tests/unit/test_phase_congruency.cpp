#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "reference.hpp"
#include "test_support.hpp"

#include "rift/log_gabor.hpp"
#include "rift/phase_congruency.hpp"

using namespace rift;
using rift::testing::max_abs_diff;
using rift::testing::random_image;

namespace {

ConvolutionSequence sequence_of(const RasterF32& img) {
  return convolve(img, build_filter_bank(img.width(), img.height(), FilterBankParams{}));
}

PcMaps pc_of(const RasterF32& img, const PcParams& params = {}) {
  return compute_pc(sequence_of(img), params);
}

PcMaps uniform_pc(int n_orient, std::vector<double> values) {
  PcMaps pc;
  for (int o = 0; o < n_orient; ++o) {
    pc.per_orientation.emplace_back(1, 1, values[static_cast<std::size_t>(o)]);
    pc.angles.push_back(o * std::numbers::pi / n_orient);
  }
  pc.combined = RasterF64(1, 1);
  return pc;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(std::ceil(q * v.size())) - 1];
}

void check_pc_range(const PcMaps& pc) {
  for (const auto& m : pc.per_orientation) {
    for (double v : m.data()) CHECK((v >= 0.0 && v <= 1.0));
  }
  for (double v : pc.combined.data()) CHECK((v >= 0.0 && v <= 1.0));
}

}  // namespace

TEST_CASE("constant image has no phase congruency") {
  const PcMaps pc = pc_of(RasterF32(32, 32, 0.4f));
  for (const auto& m : pc.per_orientation) {
    for (double v : m.data()) CHECK(v < 1e-6);
  }
  for (double v : pc.combined.data()) CHECK(v < 1e-6);
}

TEST_CASE("phase congruency stays within [0,1]") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) check_pc_range(pc_of(random_image(48, 40, seed)));
  check_pc_range(pc_of(rift::testing::step_image(32, 32, 16)));
}

TEST_CASE("phase congruency agrees with the phase-angle transcription") {
  const PcParams params;
  for (std::uint64_t seed : {21u, 22u}) {
    const auto seq = sequence_of(random_image(16, 16, seed));
    const PcMaps fast = compute_pc(seq, params);
    const PcMaps slow = reference::phase_congruency(seq, params);
    for (int o = 0; o < 6; ++o) CHECK(max_abs_diff(fast.per_orientation[o], slow.per_orientation[o]) < 1e-8);
    CHECK(max_abs_diff(fast.combined, slow.combined) < 1e-8);
  }
  const auto step = sequence_of(rift::testing::step_image(16, 16, 8));
  CHECK(max_abs_diff(compute_pc(step, params).combined, reference::phase_congruency(step, params).combined) < 1e-8);
}

TEST_CASE("phase congruency peaks on a step edge") {
  const int n = 32;
  const PcMaps pc = pc_of(rift::testing::step_image(n, n, 16));
  const double top = quantile(pc.combined.storage(), 0.99);
  for (int y = 0; y < n; ++y) {
    CHECK(std::max(pc.combined(15, y), pc.combined(16, y)) >= top);
  }
  // Far from both edges (the FFT wraps, so column 0 is an edge too).
  for (int y = 0; y < n; ++y) CHECK(pc.combined(8, y) < top);
}

TEST_CASE("noise threshold is zero without noise and scales with contrast") {
  PcParams zero_k;
  zero_k.noise_k = 0.0;
  for (double t : estimate_noise_threshold(sequence_of(RasterF32(32, 32, 0.2f)), zero_k)) CHECK(t == 0.0);

  const RasterF32 img = random_image(64, 48, 3);
  const auto t1 = estimate_noise_threshold(sequence_of(img), PcParams{});
  const auto t2 = estimate_noise_threshold(sequence_of(rift::testing::affine_intensity(img, 2.0, 0.0)), PcParams{});
  const auto ref = reference::noise_threshold(sequence_of(img), PcParams{});
  for (std::size_t o = 0; o < t1.size(); ++o) {
    CHECK(t1[o] > 0.0);
    CHECK(t2[o] == doctest::Approx(2.0 * t1[o]).epsilon(1e-6));
    CHECK(t1[o] == doctest::Approx(ref[o]).epsilon(1e-12));
  }
}

TEST_CASE("white noise is mostly suppressed") {
  const PcMaps pc = pc_of(random_image(128, 128, 2024));
  double mean = 0.0;
  for (double v : pc.combined.data()) mean += v;
  mean /= static_cast<double>(pc.combined.size());
  CHECK(mean < 0.15);
}

TEST_CASE("phase congruency is robust to affine intensity changes") {
  const RasterF32 img = rift::testing::load_test_image("camera.png");
  const PcMaps base = pc_of(img);
  for (double a : {0.5, 2.0}) {
    for (double c : {0.0, 0.3}) {
      CHECK(max_abs_diff(pc_of(rift::testing::affine_intensity(img, a, c)).combined, base.combined) < 5e-2);
    }
  }
}

TEST_CASE("moments of zero maps are zero") {
  const MomentMaps m = compute_moments(uniform_pc(6, {0, 0, 0, 0, 0, 0}));
  CHECK(m.a[0] == 0.0);
  CHECK(m.b[0] == 0.0);
  CHECK(m.c[0] == 0.0);
  CHECK(m.min_moment[0] == 0.0);
  CHECK(m.max_moment[0] == 0.0);
}

TEST_CASE("moments of a single horizontal orientation") {
  const double p = 0.7;
  const MomentMaps m = compute_moments(uniform_pc(6, {p, 0, 0, 0, 0, 0}));
  CHECK(m.a[0] == doctest::Approx(p * p));
  CHECK(m.b[0] == doctest::Approx(0.0));
  CHECK(m.c[0] == doctest::Approx(0.0));
  CHECK(m.max_moment[0] == doctest::Approx(p * p));
  CHECK(m.min_moment[0] == doctest::Approx(0.0));
  CHECK(m.principal_axis[0] == doctest::Approx(0.0));
}

TEST_CASE("isotropic response has equal moments") {
  const double p = 0.4;
  const MomentMaps m = compute_moments(uniform_pc(6, std::vector<double>(6, p)));
  CHECK(std::abs(m.max_moment[0] - m.min_moment[0]) < 1e-10);
  CHECK(std::abs(m.max_moment[0] - 0.5 * (m.a[0] + m.c[0])) < 1e-10);
}

TEST_CASE("moment identities hold pixelwise and match the transcription") {
  const PcMaps pc = pc_of(random_image(64, 64, 17));
  const MomentMaps m = compute_moments(pc);
  const MomentMaps r = reference::moments(pc);
  for (std::size_t i = 0; i < m.a.size(); ++i) {
    CHECK(m.max_moment[i] >= m.min_moment[i]);
    CHECK(m.min_moment[i] >= 0.0);
    CHECK(std::abs(m.max_moment[i] + m.min_moment[i] - (m.a[i] + m.c[i])) < 1e-10);
  }
  CHECK(max_abs_diff(m.a, r.a) < 1e-12);
  CHECK(max_abs_diff(m.b, r.b) < 1e-12);
  CHECK(max_abs_diff(m.c, r.c) < 1e-12);
  CHECK(max_abs_diff(m.max_moment, r.max_moment) < 1e-12);
  CHECK(max_abs_diff(m.min_moment, r.min_moment) < 1e-12);
}

TEST_CASE("shifting orientation angles by pi leaves the moments unchanged") {
  PcMaps pc = pc_of(random_image(32, 32, 6));
  const MomentMaps before = compute_moments(pc);
  for (double& angle : pc.angles) angle += std::numbers::pi;
  const MomentMaps after = compute_moments(pc);
  CHECK(max_abs_diff(before.a, after.a) < 1e-12);
  CHECK(max_abs_diff(before.b, after.b) < 1e-12);
  CHECK(max_abs_diff(before.c, after.c) < 1e-12);
}

TEST_CASE("invalid PC parameters are rejected") {
  const auto seq = sequence_of(RasterF32(16, 16));
  PcParams p;
  p.epsilon = 0.0;
  CHECK_THROWS_AS(compute_pc(seq, p), std::invalid_argument);
  p = {};
  p.weight_cutoff = 1.0;
  CHECK_THROWS_AS(compute_pc(seq, p), std::invalid_argument);
  CHECK_THROWS_AS(compute_pc(ConvolutionSequence{}, PcParams{}), std::invalid_argument);
}
