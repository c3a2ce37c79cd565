#include <chrono>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "reference.hpp"
#include "test_support.hpp"

#include "rift/log_gabor.hpp"

using namespace rift;
using rift::testing::max_abs_diff;
using rift::testing::random_image;

namespace {

double grid_radius(int x, int y, int w, int h) {
  // Signed bin offsets: bins past the middle wrap to negative frequencies.
  const double fx = (x <= (w - 1) / 2 ? x : x - w) / double(w);
  const double fy = (y <= (h - 1) / 2 ? y : y - h) / double(h);
  return std::sqrt(fx * fx + fy * fy);
}

}  // namespace

TEST_CASE("default bank has 4 scales by 6 orientations") {
  const FilterBank bank = build_filter_bank(64, 64, FilterBankParams{});
  CHECK(bank.params().n_scales == 4);
  CHECK(bank.params().n_orientations == 6);
  int combined = 0;
  for (int s = 0; s < 4; ++s) {
    for (int o = 0; o < 6; ++o) {
      CHECK(bank.combined(s, o).width() == 64);
      ++combined;
    }
  }
  CHECK(combined == 24);
  CHECK_THROWS(bank.radial(4));
  CHECK_THROWS(bank.angular(6));
}

TEST_CASE("orientation angles and centre frequencies") {
  const FilterBankParams p;
  for (int o = 0; o < 6; ++o) CHECK(p.orientation_angle(o) == doctest::Approx(o * std::numbers::pi / 6));
  CHECK(p.center_frequency(0) == doctest::Approx(1.0 / 3.0));
  CHECK(p.center_frequency(2) == doctest::Approx(1.0 / (3.0 * 2.1 * 2.1)));
  CHECK(p.angular_sigma() == doctest::Approx(1.2 * std::numbers::pi / 6));
}

TEST_CASE("radial filters vanish at DC and all filters lie in [0,1]") {
  for (auto [w, h] : {std::pair{16, 16}, std::pair{33, 20}, std::pair{64, 48}}) {
    const FilterBank bank = build_filter_bank(w, h, FilterBankParams{});
    for (int s = 0; s < 4; ++s) {
      CHECK(bank.radial(s)(0, 0) == 0.0);
      for (double v : bank.radial(s).data()) CHECK((v >= 0.0 && v <= 1.0));
    }
    for (int o = 0; o < 6; ++o) {
      for (double v : bank.angular(o).data()) CHECK((v >= 0.0 && v <= 1.0));
    }
    for (double v : bank.lowpass().data()) CHECK((v >= 0.0 && v <= 1.0));
  }
}

TEST_CASE("radial peak sits on the grid point nearest the centre frequency") {
  const int n = 64;
  const FilterBank bank = build_filter_bank(n, n, FilterBankParams{});
  const double f0 = 1.0 / 3.0;
  double best_gap = 1e9;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) best_gap = std::min(best_gap, std::abs(grid_radius(x, y, n, n) - f0));
  }
  const RasterF64& r = bank.radial(0);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] > r[arg]) arg = i;
  }
  const double gap = std::abs(grid_radius(int(arg % n), int(arg / n), n, n) - f0);
  CHECK(gap == doctest::Approx(best_gap).epsilon(1e-12));
}

TEST_CASE("radial and angular shapes follow the log-Gabor formulas") {
  const FilterBankParams p;
  const int n = 32;
  const FilterBank bank = build_filter_bank(n, n, p);
  for (int y = 0; y < n; y += 3) {
    for (int x = 0; x < n; x += 5) {
      if (x == 0 && y == 0) continue;
      const double rho = grid_radius(x, y, n, n);
      for (int s = 0; s < 4; ++s) {
        const double f0 = 1.0 / (3.0 * std::pow(2.1, s));
        const double expected = std::exp(-std::pow(std::log(rho / f0), 2) /
                                         (2 * std::pow(std::log(0.55), 2)));
        CHECK(bank.radial(s)(x, y) == doctest::Approx(expected).epsilon(1e-12));
      }
      const double fx = (x <= (n - 1) / 2 ? x : x - n) / double(n);
      const double fy = (y <= (n - 1) / 2 ? y : y - n) / double(n);
      const double theta = std::atan2(fy, fx);
      for (int o = 0; o < 6; ++o) {
        double d = std::fmod(std::abs(theta - o * std::numbers::pi / 6), 2 * std::numbers::pi);
        d = std::min(d, 2 * std::numbers::pi - d);
        const double sigma = 1.2 * std::numbers::pi / 6;
        CHECK(bank.angular(o)(x, y) ==
              doctest::Approx(std::exp(-d * d / (2 * sigma * sigma))).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("invalid filter parameters are rejected") {
  auto with = [](auto edit) {
    FilterBankParams p;
    edit(p);
    return p;
  };
  CHECK_THROWS_AS(build_filter_bank(32, 32, with([](auto& p) { p.n_scales = 1; })), std::invalid_argument);
  CHECK_THROWS_AS(build_filter_bank(32, 32, with([](auto& p) { p.n_orientations = 2; })), std::invalid_argument);
  CHECK_THROWS_AS(build_filter_bank(32, 32, with([](auto& p) { p.min_wavelength = 2.0; })), std::invalid_argument);
  CHECK_THROWS_AS(build_filter_bank(32, 32, with([](auto& p) { p.sigma_on_f = 1.0; })), std::invalid_argument);
  CHECK_THROWS_AS(build_filter_bank(32, 32, with([](auto& p) { p.sigma_on_f = 0.0; })), std::invalid_argument);
  CHECK_THROWS_AS(build_filter_bank(32, 32, with([](auto& p) { p.scale_mult = 1.0; })), std::invalid_argument);
  CHECK_THROWS_AS(build_filter_bank(15, 32, FilterBankParams{}), std::invalid_argument);
}

TEST_CASE("convolving a constant image gives no response") {
  const FilterBank bank = build_filter_bank(32, 24, FilterBankParams{});
  const ConvolutionSequence seq = convolve(RasterF32(32, 24, 0.7f), bank);
  for (std::size_t c = 0; c < seq.even.size(); ++c) {
    for (std::size_t i = 0; i < seq.even[c].size(); ++i) {
      CHECK(std::abs(seq.even[c][i]) < 1e-8);
      CHECK(std::abs(seq.odd[c][i]) < 1e-8);
    }
  }
}

TEST_CASE("FFT convolution matches spatial circular convolution") {
  const FilterBank bank = build_filter_bank(16, 16, FilterBankParams{});
  for (std::uint64_t seed : {1u, 2u}) {
    const RasterF64 img = raster_cast<double>(random_image(16, 16, seed));
    const ConvolutionSequence fast = convolve(img, bank);
    for (int s = 0; s < 4; ++s) {
      for (int o = 0; o < 6; ++o) {
        const auto [even, odd] = reference::spatial_convolve(img, bank, s, o);
        CHECK(max_abs_diff(fast.E(s, o), even) < 1e-6);
        CHECK(max_abs_diff(fast.O(s, o), odd) < 1e-6);
      }
    }
  }
}

TEST_CASE("non-square FFT convolution matches spatial convolution") {
  const FilterBank bank = build_filter_bank(20, 16, FilterBankParams{});
  const RasterF64 img = raster_cast<double>(random_image(20, 16, 11));
  const ConvolutionSequence fast = convolve(img, bank);
  const auto [even, odd] = reference::spatial_convolve(img, bank, 1, 2);
  CHECK(max_abs_diff(fast.E(1, 2), even) < 1e-6);
  CHECK(max_abs_diff(fast.O(1, 2), odd) < 1e-6);
}

TEST_CASE("convolution is linear and amplitude is contrast-equivariant") {
  const FilterBank bank = build_filter_bank(32, 32, FilterBankParams{});
  const RasterF64 i = raster_cast<double>(random_image(32, 32, 4));
  const RasterF64 j = raster_cast<double>(random_image(32, 32, 5));
  RasterF64 combo(32, 32);
  RasterF64 scaled(32, 32);
  RasterF64 shifted(32, 32);
  for (std::size_t k = 0; k < i.size(); ++k) {
    combo[k] = 0.3 * i[k] - 1.7 * j[k];
    scaled[k] = 2.5 * i[k];
    shifted[k] = 2.5 * i[k] + 0.4;
  }
  const auto si = convolve(i, bank);
  const auto sj = convolve(j, bank);
  const auto sc = convolve(combo, bank);
  const auto ss = convolve(scaled, bank);
  const auto sh = convolve(shifted, bank);
  double linear_err = 0.0;
  double scale_rel = 0.0;
  double offset_rel = 0.0;
  for (std::size_t c = 0; c < si.even.size(); ++c) {
    for (std::size_t k = 0; k < i.size(); ++k) {
      linear_err = std::max(linear_err, std::abs(sc.even[c][k] - (0.3 * si.even[c][k] - 1.7 * sj.even[c][k])));
      linear_err = std::max(linear_err, std::abs(sc.odd[c][k] - (0.3 * si.odd[c][k] - 1.7 * sj.odd[c][k])));
      const double a = si.amplitude[c][k];
      if (a > 1e-6) {
        scale_rel = std::max(scale_rel, std::abs(ss.amplitude[c][k] - 2.5 * a) / (2.5 * a));
        offset_rel = std::max(offset_rel, std::abs(sh.amplitude[c][k] - 2.5 * a) / (2.5 * a));
      }
    }
  }
  CHECK(linear_err < 1e-8);
  CHECK(scale_rel < 1e-10);
  CHECK(offset_rel < 1e-8);
}

TEST_CASE("amplitudes are non-negative and sum over scales") {
  const FilterBank bank = build_filter_bank(40, 32, FilterBankParams{});
  const auto seq = convolve(random_image(40, 32, 8), bank);
  CHECK(seq.complete());
  for (int o = 0; o < 6; ++o) {
    for (std::size_t k = 0; k < seq.summed_amplitude[o].size(); ++k) {
      double sum = 0.0;
      for (int s = 0; s < 4; ++s) {
        const double a = seq.A(s, o)[k];
        CHECK(a >= 0.0);
        CHECK(a == doctest::Approx(std::hypot(seq.E(s, o)[k], seq.O(s, o)[k])).epsilon(1e-12));
        sum += a;
      }
      CHECK(seq.summed_amplitude[o][k] == sum);
    }
  }
}

TEST_CASE("convolve rejects a mismatched bank") {
  const FilterBank bank = build_filter_bank(32, 32, FilterBankParams{});
  CHECK_THROWS_AS(convolve(RasterF32(32, 31), bank), std::invalid_argument);
}

TEST_CASE("phase follows the two-argument arctangent") {
  const RasterF64 e(4, 1, std::vector<double>{1, 0, -1, 0});
  const RasterF64 o(4, 1, std::vector<double>{0, 1, -1, 0});
  const RasterF64 p = phase(e, o);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(std::numbers::pi / 2));
  CHECK(p[2] == doctest::Approx(-3 * std::numbers::pi / 4));
  CHECK(p[3] == 0.0);
  const RasterF64 neg_axis = phase(RasterF64(1, 1, std::vector<double>{-1}),
                                   RasterF64(1, 1, std::vector<double>{-0.0}));
  CHECK(neg_axis[0] == doctest::Approx(std::numbers::pi));
}
