#include "usbeam/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace usbeam {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Fft::Plans {
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  mutable std::mutex exec;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
    if (buffer) fftw_free(buffer);
  }
};

Fft::Fft(std::size_t n) : size_(n), plans_(std::make_unique<Plans>()) {
  if (n == 0) throw std::invalid_argument("FFT length must be positive");
  std::lock_guard lock(planner_mutex());
  plans_->buffer = fftw_alloc_complex(n);
  const int len = static_cast<int>(n);
  plans_->forward = fftw_plan_dft_1d(len, plans_->buffer, plans_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->inverse = fftw_plan_dft_1d(len, plans_->buffer, plans_->buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::Fft(std::size_t rows, std::size_t cols) : size_(rows * cols), plans_(std::make_unique<Plans>()) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("FFT shape must be positive");
  std::lock_guard lock(planner_mutex());
  plans_->buffer = fftw_alloc_complex(size_);
  const int r = static_cast<int>(rows);
  const int c = static_cast<int>(cols);
  plans_->forward = fftw_plan_dft_2d(r, c, plans_->buffer, plans_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->inverse = fftw_plan_dft_2d(r, c, plans_->buffer, plans_->buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(std::span<Complex> data) const {
  if (data.size() != size_) throw std::invalid_argument("FFT input size mismatch");
  std::lock_guard lock(plans_->exec);
  std::memcpy(plans_->buffer, data.data(), size_ * sizeof(Complex));
  fftw_execute(plans_->forward);
  std::memcpy(static_cast<void*>(data.data()), plans_->buffer, size_ * sizeof(Complex));
}

void Fft::inverse(std::span<Complex> data) const {
  if (data.size() != size_) throw std::invalid_argument("FFT input size mismatch");
  std::lock_guard lock(plans_->exec);
  std::memcpy(plans_->buffer, data.data(), size_ * sizeof(Complex));
  fftw_execute(plans_->inverse);
  const double scale = 1.0 / static_cast<double>(size_);
  auto* out = reinterpret_cast<const Complex*>(plans_->buffer);
  std::transform(out, out + size_, data.begin(), [scale](Complex v) { return v * scale; });
}

}  // namespace usbeam
