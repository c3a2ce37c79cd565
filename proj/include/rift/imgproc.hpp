#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rift/geometry.hpp"
#include "rift/raster.hpp"

namespace rift {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interleaved 8-bit RGB image used for rendered outputs.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // r, g, b per pixel, row-major

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* at(int x, int y) { return &pixels[(static_cast<std::size_t>(y) * width + x) * 3]; }
  const std::uint8_t* at(int x, int y) const {
    return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
  }
};

/// Decodes PNG/JPEG/TIFF to a grayscale raster in [0,1]. Color inputs are
/// converted with luma weights 0.299 R + 0.587 G + 0.114 B.
RasterF32 load_grayscale(const std::filesystem::path& path);

/// Writes values clamped to [0,1] as an 8-bit grayscale PNG.
void save_png(const std::filesystem::path& path, const RasterF32& img);
void save_png(const std::filesystem::path& path, const RgbImage& img);

/// Inverse-mapped bilinear warp: each output pixel p samples img at t⁻¹(p).
/// Samples outside the input read as 0.
RasterF32 warp_affine(const RasterF32& img, const AffineTransform& t, int out_width,
                      int out_height);

/// (v - min) / (max - min); a constant input maps to all zeros.
template <typename T>
Raster<T> normalize_minmax(const Raster<T>& img) {
  if (img.empty()) throw std::invalid_argument("normalize_minmax: empty raster");
  const auto [lo_it, hi_it] = std::minmax_element(img.data().begin(), img.data().end());
  const T lo = *lo_it;
  const T range = *hi_it - lo;
  Raster<T> out(img.width(), img.height());
  if (!(range > T(0))) return out;
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = (img[i] - lo) / range;
  return out;
}

}  // namespace rift
