#include "rift/describe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rift {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Circular smoothing of the orientation histogram, in bins. Doubled channel
// angles are 6 bins apart for N_o = 6; a 3-bin sigma lets neighbouring
// channels blend so the peak moves continuously with rotation.
constexpr double kHistogramSmoothing = 3.0;
// Amplitudes at or below this are FFT rounding noise; their labels carry no
// orientation.
constexpr double kAmplitudeFloor = 1e-12;

double wrap_two_pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

}  // namespace

MaxIndexMap build_mim(const ConvolutionSequence& seq, int shift) {
  if (!seq.complete()) throw std::invalid_argument("build_mim: incomplete sequence");
  const int n_orient = seq.n_orientations();
  if (shift < 0 || shift >= n_orient) {
    throw std::out_of_range("build_mim: shift " + std::to_string(shift) + " outside [0, " +
                            std::to_string(n_orient) + ")");
  }
  MaxIndexMap mim{RasterU8(seq.width, seq.height), RasterF64(seq.width, seq.height), shift,
                  n_orient};
  const auto n = static_cast<std::ptrdiff_t>(mim.index.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    int best = 0;
    double best_amp = seq.summed_amplitude[0][i];
    for (int o = 1; o < n_orient; ++o) {
      const double a = seq.summed_amplitude[o][i];
      if (a > best_amp) {
        best_amp = a;
        best = o;
      }
    }
    mim.index[i] = static_cast<std::uint8_t>(((best - shift) % n_orient + n_orient) % n_orient + 1);
    mim.max_amplitude[i] = best_amp;
  }
  return mim;
}

std::vector<MaxIndexMap> build_mim_set(const ConvolutionSequence& seq, int count) {
  if (count < 1 || count > seq.n_orientations()) {
    throw std::out_of_range("build_mim_set: variant count " + std::to_string(count) +
                            " outside [1, " + std::to_string(seq.n_orientations()) + "]");
  }
  std::vector<MaxIndexMap> set;
  set.reserve(count);
  for (int k = 0; k < count; ++k) set.push_back(build_mim(seq, k));
  return set;
}

OrientationEstimate dominant_orientation(const MaxIndexMap& mim, const Keypoint& kp,
                                         double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("dominant_orientation: radius must be > 0");
  const int n_orient = mim.n_orientations;
  const double sigma = radius / 2.0;
  const double bin_width = kTwoPi / kOrientationBins;
  const int cx = static_cast<int>(std::lround(kp.x));
  const int cy = static_cast<int>(std::lround(kp.y));
  const int r = static_cast<int>(std::ceil(radius));

  std::array<double, kOrientationBins> hist{};
  double moment_x = 0.0;
  double moment_y = 0.0;
  double moment_scale = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const double d2 = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
      if (d2 > radius * radius) continue;
      const int x = cx + dx;
      const int y = cy + dy;
      if (!mim.index.contains(x, y)) continue;
      const double amp = mim.max_amplitude(x, y);
      if (!(amp > kAmplitudeFloor)) continue;
      const double w = amp * std::exp(-d2 / (2.0 * sigma * sigma));
      const int channel = mim.channel_of(mim.index(x, y));
      const double doubled = 2.0 * channel * std::numbers::pi / n_orient;
      const int bin = static_cast<int>(std::lround(doubled / bin_width)) % kOrientationBins;
      hist[bin] += w;
      moment_x += w * dx;
      moment_y += w * dy;
      moment_scale += w * std::sqrt(d2);
    }
  }

  OrientationEstimate est;
  double total = 0.0;
  for (double h : hist) total += h;
  if (!(total > 0.0)) {
    est.degenerate = true;
    return est;
  }

  const int half = static_cast<int>(std::ceil(3.0 * kHistogramSmoothing));
  std::array<double, kOrientationBins> smooth{};
  for (int k = 0; k < kOrientationBins; ++k) {
    double acc = 0.0;
    for (int j = -half; j <= half; ++j) {
      const int b = ((k + j) % kOrientationBins + kOrientationBins) % kOrientationBins;
      acc += hist[b] * std::exp(-(j * j) / (2.0 * kHistogramSmoothing * kHistogramSmoothing));
    }
    smooth[k] = acc;
  }

  int peak = 0;
  double mean = 0.0;
  for (int k = 0; k < kOrientationBins; ++k) {
    mean += smooth[k];
    if (smooth[k] > smooth[peak]) peak = k;
  }
  mean /= kOrientationBins;
  est.peak_ratio = smooth[peak] / mean;

  const double left = smooth[(peak + kOrientationBins - 1) % kOrientationBins];
  const double right = smooth[(peak + 1) % kOrientationBins];
  const double curvature = left - 2.0 * smooth[peak] + right;
  const double offset = curvature < 0.0 ? 0.5 * (left - right) / curvature : 0.0;
  est.doubled_peak = wrap_two_pi((peak + offset) * bin_width);

  if (est.peak_ratio < kMinPeakRatio) {
    est.degenerate = true;
    return est;
  }

  double axis = est.doubled_peak / 2.0;
  const double side = moment_x * std::cos(axis) + moment_y * std::sin(axis);
  if (side < -1e-9 * moment_scale) axis += std::numbers::pi;
  est.angle = wrap_two_pi(axis);
  return est;
}

std::vector<Descriptor> describe(std::span<const MaxIndexMap> mim_set, const Keypoint& kp,
                                 int patch_size) {
  if (mim_set.empty()) throw std::invalid_argument("describe: empty MIM set");
  if (patch_size < kDescriptorGrid || patch_size % kDescriptorGrid != 0) {
    throw std::invalid_argument("describe: patch size must be a positive multiple of 6");
  }
  const MaxIndexMap& first = mim_set.front();
  const int width = first.width();
  const int height = first.height();
  const int n_orient = first.n_orientations;
  const double c = std::cos(kp.orientation);
  const double s = std::sin(kp.orientation);
  const double half = patch_size / 2.0;
  const double extent = half - 0.5;  // offset of the outermost sample centers

  // A rotated rectangle reaches its extremes at the corners.
  double min_x = kp.x, max_x = kp.x, min_y = kp.y, max_y = kp.y;
  for (double u : {-extent, extent}) {
    for (double v : {-extent, extent}) {
      const double x = kp.x + u * c - v * s;
      const double y = kp.y + u * s + v * c;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  if (std::lround(min_x) < 0 || std::lround(min_y) < 0 || std::lround(max_x) > width - 1 ||
      std::lround(max_y) > height - 1) {
    throw std::out_of_range("describe: patch around (" + std::to_string(kp.x) + ", " +
                            std::to_string(kp.y) + ") leaves the image");
  }

  struct Sample {
    std::size_t pixel;
    int cell;
    double weight;
  };
  const int cell_size = patch_size / kDescriptorGrid;
  const double sigma = patch_size / 2.0;
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(patch_size) * patch_size);
  for (int j = 0; j < patch_size; ++j) {
    const double v = j - extent;
    for (int i = 0; i < patch_size; ++i) {
      const double u = i - extent;
      const auto x = static_cast<int>(std::lround(kp.x + u * c - v * s));
      const auto y = static_cast<int>(std::lround(kp.y + u * s + v * c));
      const std::size_t pixel = first.index.index(x, y);
      if (!(first.max_amplitude[pixel] > kAmplitudeFloor)) continue;
      const int cell = (j / cell_size) * kDescriptorGrid + (i / cell_size);
      samples.push_back({pixel, cell, std::exp(-(u * u + v * v) / (2.0 * sigma * sigma))});
    }
  }

  const std::size_t dim = static_cast<std::size_t>(kDescriptorGrid) * kDescriptorGrid * n_orient;
  std::vector<Descriptor> out;
  out.reserve(mim_set.size());
  std::vector<double> hist(dim);
  for (const MaxIndexMap& mim : mim_set) {
    if (mim.width() != width || mim.height() != height || mim.n_orientations != n_orient) {
      throw std::invalid_argument("describe: MIM set members differ in shape");
    }
    std::fill(hist.begin(), hist.end(), 0.0);
    for (const Sample& smp : samples) {
      hist[static_cast<std::size_t>(smp.cell) * n_orient + (mim.index[smp.pixel] - 1)] +=
          smp.weight;
    }
    double norm2 = 0.0;
    for (double h : hist) norm2 += h * h;
    Descriptor d;
    d.keypoint = kp;
    d.shift = mim.shift;
    d.values.assign(dim, 0.0f);
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t k = 0; k < dim; ++k) d.values[k] = static_cast<float>(hist[k] * inv);
    } else {
      d.degenerate = true;
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<DescriptorSet> describe_keypoints(std::span<const MaxIndexMap> mim_set,
                                              std::span<const Keypoint> keypoints,
                                              int patch_size, double orientation_radius) {
  if (mim_set.empty()) throw std::invalid_argument("describe_keypoints: empty MIM set");
  std::vector<DescriptorSet> out(keypoints.size());
  const auto n = static_cast<std::ptrdiff_t>(keypoints.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      DescriptorSet& ds = out[static_cast<std::size_t>(k)];
      ds.keypoint = keypoints[static_cast<std::size_t>(k)];
      ds.orientation = dominant_orientation(mim_set.front(), ds.keypoint, orientation_radius);
      ds.keypoint.orientation = ds.orientation.angle;
      ds.variants = describe(mim_set, ds.keypoint, patch_size);
    } catch (...) {
#pragma omp critical(rift_describe_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace rift
