#pragma once

#include <vector>

#include "rift/raster.hpp"

namespace rift {

/// Log-Gabor bank geometry. Orientation o (0-based) is centered at
/// o·π/n_orientations; scale s (0-based) at 1 / (min_wavelength · scale_mult^s)
/// cycles per pixel.
struct FilterBankParams {
  int n_scales = 4;
  int n_orientations = 6;
  double min_wavelength = 3.0;
  double scale_mult = 2.1;
  double sigma_on_f = 0.55;
  double angular_sigma_ratio = 1.2;
  /// Butterworth lowpass applied to every filter.
  double lowpass_cutoff = 0.45;
  int lowpass_order = 15;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;

  double orientation_angle(int o) const;
  double center_frequency(int s) const;
  double angular_sigma() const;

  bool operator==(const FilterBankParams&) const = default;
};

/// Frequency-domain filters laid out on the unshifted FFT grid (DC at (0,0)).
/// The filter for channel (s, o) is radial[s] · angular[o] · lowpass.
class FilterBank {
 public:
  FilterBank(int width, int height, FilterBankParams params, std::vector<RasterF64> radial,
             std::vector<RasterF64> angular, RasterF64 lowpass);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const FilterBankParams& params() const noexcept { return params_; }

  const RasterF64& radial(int s) const { return radial_.at(s); }
  const RasterF64& angular(int o) const { return angular_.at(o); }
  const RasterF64& lowpass() const noexcept { return lowpass_; }

  /// radial(s) · angular(o) · lowpass.
  RasterF64 combined(int s, int o) const;

 private:
  int width_;
  int height_;
  FilterBankParams params_;
  std::vector<RasterF64> radial_;
  std::vector<RasterF64> angular_;
  RasterF64 lowpass_;
};

/// Even/odd responses of every (scale, orientation) channel plus amplitudes.
struct ConvolutionSequence {
  FilterBankParams params;
  int width = 0;
  int height = 0;
  std::vector<RasterF64> even;       // n_scales · n_orientations, see channel()
  std::vector<RasterF64> odd;
  std::vector<RasterF64> amplitude;  // sqrt(even² + odd²)
  std::vector<RasterF64> summed_amplitude;  // per orientation, Σ_s amplitude

  int n_scales() const noexcept { return params.n_scales; }
  int n_orientations() const noexcept { return params.n_orientations; }
  std::size_t channel(int s, int o) const noexcept {
    return static_cast<std::size_t>(o) * params.n_scales + s;
  }

  const RasterF64& E(int s, int o) const { return even.at(channel(s, o)); }
  const RasterF64& O(int s, int o) const { return odd.at(channel(s, o)); }
  const RasterF64& A(int s, int o) const { return amplitude.at(channel(s, o)); }

  bool complete() const noexcept;
};

/// Normalized frequency (cycles/pixel) of FFT bin k out of n.
double fft_frequency(int k, int n) noexcept;

/// Requires width, height ≥ 16.
FilterBank build_filter_bank(int width, int height, const FilterBankParams& params);

/// FFT convolution of img with every channel of the bank. Channels are
/// processed in parallel.
ConvolutionSequence convolve(const RasterF32& img, const FilterBank& bank);
ConvolutionSequence convolve(const RasterF64& img, const FilterBank& bank);

/// atan2(odd, even) per pixel, in (-π, π]; atan2(0, 0) = 0.
RasterF64 phase(const RasterF64& even, const RasterF64& odd);

}  // namespace rift
