#include "rift/log_gabor.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace rift {

void FilterBankParams::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("invalid filter bank parameters: " + what);
  };
  if (n_scales < 2) fail("n_scales must be >= 2");
  if (n_orientations < 3) fail("n_orientations must be >= 3");
  if (n_orientations > 255) fail("n_orientations must be <= 255");
  if (!(min_wavelength > 2.0)) fail("min_wavelength must be > 2");
  if (!(scale_mult > 1.0)) fail("scale_mult must be > 1");
  if (!(sigma_on_f > 0.0 && sigma_on_f < 1.0)) fail("sigma_on_f must lie in (0,1)");
  if (!(angular_sigma_ratio > 0.0)) fail("angular_sigma_ratio must be > 0");
  if (!(lowpass_cutoff > 0.0 && lowpass_cutoff <= 0.5)) fail("lowpass_cutoff must lie in (0,0.5]");
  if (lowpass_order < 1) fail("lowpass_order must be >= 1");
}

double FilterBankParams::orientation_angle(int o) const {
  return o * std::numbers::pi / n_orientations;
}

double FilterBankParams::center_frequency(int s) const {
  return 1.0 / (min_wavelength * std::pow(scale_mult, s));
}

double FilterBankParams::angular_sigma() const {
  return angular_sigma_ratio * std::numbers::pi / n_orientations;
}

FilterBank::FilterBank(int width, int height, FilterBankParams params,
                       std::vector<RasterF64> radial, std::vector<RasterF64> angular,
                       RasterF64 lowpass)
    : width_(width),
      height_(height),
      params_(params),
      radial_(std::move(radial)),
      angular_(std::move(angular)),
      lowpass_(std::move(lowpass)) {}

RasterF64 FilterBank::combined(int s, int o) const {
  const RasterF64& r = radial(s);
  const RasterF64& a = angular(o);
  RasterF64 out(width_, height_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = r[i] * a[i] * lowpass_[i];
  return out;
}

bool ConvolutionSequence::complete() const noexcept {
  const auto n = static_cast<std::size_t>(params.n_scales) * params.n_orientations;
  return width > 0 && height > 0 && even.size() == n && odd.size() == n &&
         amplitude.size() == n &&
         summed_amplitude.size() == static_cast<std::size_t>(params.n_orientations);
}

double fft_frequency(int k, int n) noexcept {
  const int shifted = (k <= (n - 1) / 2) ? k : k - n;
  return static_cast<double>(shifted) / n;
}

FilterBank build_filter_bank(int width, int height, const FilterBankParams& params) {
  params.validate();
  if (width < 16 || height < 16) {
    throw std::invalid_argument("filter bank requires at least 16x16, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  }

  RasterF64 radius(width, height);
  RasterF64 theta(width, height);
  for (int y = 0; y < height; ++y) {
    const double fy = fft_frequency(y, height);
    for (int x = 0; x < width; ++x) {
      const double fx = fft_frequency(x, width);
      radius(x, y) = std::hypot(fx, fy);
      theta(x, y) = std::atan2(fy, fx);
    }
  }

  RasterF64 lowpass(width, height);
  for (std::size_t i = 0; i < lowpass.size(); ++i) {
    lowpass[i] =
        1.0 / (1.0 + std::pow(radius[i] / params.lowpass_cutoff, 2.0 * params.lowpass_order));
  }

  const double log_sigma = std::log(params.sigma_on_f);
  const double radial_denom = 2.0 * log_sigma * log_sigma;
  std::vector<RasterF64> radial;
  radial.reserve(params.n_scales);
  for (int s = 0; s < params.n_scales; ++s) {
    const double f0 = params.center_frequency(s);
    RasterF64 filter(width, height);
    for (std::size_t i = 1; i < filter.size(); ++i) {
      const double l = std::log(radius[i] / f0);
      filter[i] = std::exp(-(l * l) / radial_denom);
    }
    filter[0] = 0.0;  // DC
    radial.push_back(std::move(filter));
  }

  const double sigma_theta = params.angular_sigma();
  const double angular_denom = 2.0 * sigma_theta * sigma_theta;
  std::vector<RasterF64> angular;
  angular.reserve(params.n_orientations);
  for (int o = 0; o < params.n_orientations; ++o) {
    const double angle = params.orientation_angle(o);
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    RasterF64 spread(width, height);
    for (std::size_t i = 0; i < spread.size(); ++i) {
      const double st = std::sin(theta[i]);
      const double ct = std::cos(theta[i]);
      // Wrapped angular distance in [0, π].
      const double dtheta = std::abs(std::atan2(st * ca - ct * sa, ct * ca + st * sa));
      spread[i] = std::exp(-(dtheta * dtheta) / angular_denom);
    }
    angular.push_back(std::move(spread));
  }

  return FilterBank(width, height, params, std::move(radial), std::move(angular),
                    std::move(lowpass));
}

ConvolutionSequence convolve(const RasterF32& img, const FilterBank& bank) {
  return convolve(raster_cast<double>(img), bank);
}

ConvolutionSequence convolve(const RasterF64& img, const FilterBank& bank) {
  if (img.width() != bank.width() || img.height() != bank.height()) {
    throw std::invalid_argument("convolve: image is " + std::to_string(img.width()) + "x" +
                                std::to_string(img.height()) + " but filter bank is " +
                                std::to_string(bank.width()) + "x" +
                                std::to_string(bank.height()));
  }
  const FilterBankParams& params = bank.params();
  const int width = img.width();
  const int height = img.height();
  const std::size_t n = img.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  detail::Fft2d fft(width, height);
  detail::ComplexBuffer spectrum = detail::make_complex_buffer(n);
  for (std::size_t i = 0; i < n; ++i) {
    spectrum[i][0] = img[i];
    spectrum[i][1] = 0.0;
  }
  fft.forward(spectrum.get());

  ConvolutionSequence seq;
  seq.params = params;
  seq.width = width;
  seq.height = height;
  const int n_channels = params.n_scales * params.n_orientations;
  seq.even.resize(n_channels);
  seq.odd.resize(n_channels);
  seq.amplitude.resize(n_channels);

#pragma omp parallel
  {
    detail::ComplexBuffer work = detail::make_complex_buffer(n);
#pragma omp for schedule(dynamic, 1)
    for (int c = 0; c < n_channels; ++c) {
      const int o = c / params.n_scales;
      const int s = c % params.n_scales;
      const RasterF64& radial = bank.radial(s);
      const RasterF64& angular = bank.angular(o);
      const RasterF64& lowpass = bank.lowpass();
      for (std::size_t i = 0; i < n; ++i) {
        const double g = radial[i] * angular[i] * lowpass[i];
        work[i][0] = spectrum[i][0] * g;
        work[i][1] = spectrum[i][1] * g;
      }
      fft.backward(work.get());
      RasterF64 even(width, height);
      RasterF64 odd(width, height);
      RasterF64 amp(width, height);
      for (std::size_t i = 0; i < n; ++i) {
        even[i] = work[i][0] * inv_n;
        odd[i] = work[i][1] * inv_n;
        amp[i] = std::sqrt(even[i] * even[i] + odd[i] * odd[i]);
      }
      seq.even[c] = std::move(even);
      seq.odd[c] = std::move(odd);
      seq.amplitude[c] = std::move(amp);
    }
  }

  seq.summed_amplitude.reserve(params.n_orientations);
  for (int o = 0; o < params.n_orientations; ++o) {
    RasterF64 sum(width, height);
    for (int s = 0; s < params.n_scales; ++s) {
      const RasterF64& a = seq.A(s, o);
      for (std::size_t i = 0; i < n; ++i) sum[i] += a[i];
    }
    seq.summed_amplitude.push_back(std::move(sum));
  }
  return seq;
}

RasterF64 phase(const RasterF64& even, const RasterF64& odd) {
  if (!even.same_shape(odd)) throw std::invalid_argument("phase: raster shapes differ");
  RasterF64 out(even.width(), even.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (even[i] == 0.0 && odd[i] == 0.0) continue;
    const double p = std::atan2(odd[i], even[i]);
    out[i] = (p == -std::numbers::pi) ? std::numbers::pi : p;  // atan2(-0, x<0)
  }
  return out;
}

}  // namespace rift
