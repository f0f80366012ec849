#ifndef USBEAM_FFT_HPP
#define USBEAM_FFT_HPP

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace usbeam {

using Complex = std::complex<double>;

/// In-place complex FFT of fixed shape backed by FFTW. Inverse is scaled by 1/N.
/// Planning is serialized internally; execution on distinct objects is thread-safe.
class Fft {
 public:
  /// 1-D transform of length n.
  explicit Fft(std::size_t n);
  /// 2-D row-major transform of rows x cols.
  Fft(std::size_t rows, std::size_t cols);
  ~Fft();
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const { return size_; }

  void forward(std::span<Complex> data) const;
  void inverse(std::span<Complex> data) const;

 private:
  struct Plans;
  std::size_t size_ = 0;
  std::unique_ptr<Plans> plans_;
};

/// Signed frequency in cycles per sample for FFT bin `index` of a length-`n` transform.
inline double fft_frequency(std::size_t index, std::size_t n) {
  const auto i = static_cast<double>(index);
  const auto len = static_cast<double>(n);
  return (index <= (n - 1) / 2 ? i : i - len) / len;
}

}  // namespace usbeam

#endif  // USBEAM_FFT_HPP
