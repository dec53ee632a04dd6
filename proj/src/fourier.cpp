#include "smm/fourier.hpp"

#include <cmath>

#include <unsupported/Eigen/FFT>

#include "smm/errors.hpp"

namespace smm {

void fft_nd(std::vector<Complex>& data, int d, int N, bool inverse) {
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(N);
  if (data.size() != total) throw InvalidArgument("fft_nd: array size is not N^d");
  Eigen::FFT<double> fft;
  std::vector<Complex> line(N), out(N);
  // Axis a has stride N^(d-1-a) in row-major order.
  std::size_t stride = total;
  for (int a = 0; a < d; ++a) {
    stride /= static_cast<std::size_t>(N);
    const std::size_t block = stride * static_cast<std::size_t>(N);
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (int k = 0; k < N; ++k) line[k] = data[base + off + k * stride];
        if (inverse) {
          fft.inv(out, line);
        } else {
          fft.fwd(out, line);
        }
        for (int k = 0; k < N; ++k) data[base + off + k * stride] = out[k];
      }
    }
  }
}

std::vector<Complex> shift_interpolate(const std::vector<Complex>& values, int d, int N,
                                       const std::vector<double>& shift) {
  if (static_cast<int>(shift.size()) != d) throw InvalidArgument("shift dimension mismatch");
  std::vector<Complex> c = values;
  fft_nd(c, d, N, false);
  std::vector<long> idx(d, 0);
  for (std::size_t flat = 0; flat < c.size(); ++flat) {
    std::size_t rem = flat;
    long double ph = 0.0L;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<long>(rem % N);
      rem /= N;
      ph += static_cast<long double>(signed_frequency(idx[a], N)) * static_cast<long double>(shift[a]);
    }
    ph -= std::floor(ph);
    c[flat] *= std::polar(1.0, kTwoPi * static_cast<double>(ph));
  }
  fft_nd(c, d, N, true);
  return c;
}

}  // namespace smm
