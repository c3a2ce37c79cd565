#include "fft.hpp"

#include <mutex>
#include <new>

namespace rift::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

ComplexBuffer make_complex_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  return ComplexBuffer(p);
}

Fft2d::Fft2d(int width, int height) : width_(width), height_(height) {
  const auto n = static_cast<std::size_t>(width) * height;
  ComplexBuffer scratch = make_complex_buffer(n);
  std::lock_guard lock(planner_mutex());
  // FFTW_ESTIMATE does not touch the buffer and yields the same plan on every
  // run, which keeps results bit-reproducible.
  forward_ = fftw_plan_dft_2d(height, width, scratch.get(), scratch.get(), FFTW_FORWARD,
                              FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_2d(height, width, scratch.get(), scratch.get(), FFTW_BACKWARD,
                               FFTW_ESTIMATE);
}

Fft2d::~Fft2d() {
  std::lock_guard lock(planner_mutex());
  if (forward_ != nullptr) fftw_destroy_plan(forward_);
  if (backward_ != nullptr) fftw_destroy_plan(backward_);
}

void Fft2d::forward(fftw_complex* data) const { fftw_execute_dft(forward_, data, data); }

void Fft2d::backward(fftw_complex* data) const { fftw_execute_dft(backward_, data, data); }

}  // namespace rift::detail
