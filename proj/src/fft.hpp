#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>

namespace rift::detail {

struct FftwDeleter {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

ComplexBuffer make_complex_buffer(std::size_t n);

/// In-place 2D complex transform of a fixed size. Plans are created under a
/// global lock (the FFTW planner is not reentrant); execute() is thread-safe
/// on distinct buffers allocated with make_complex_buffer.
class Fft2d {
 public:
  Fft2d(int width, int height);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  void forward(fftw_complex* data) const;
  /// Unnormalized inverse; callers divide by width·height.
  void backward(fftw_complex* data) const;

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

 private:
  int width_;
  int height_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace rift::detail
