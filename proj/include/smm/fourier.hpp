#pragma once

#include <vector>

#include "smm/numerics.hpp"

namespace smm {

/// In-place d-dimensional DFT on an N^d row-major array.
/// Forward: sum_k a_k e^{-2 pi i k.n / N}. Inverse includes the 1/N^d factor.
void fft_nd(std::vector<Complex>& data, int d, int N, bool inverse);

/// Values of the trigonometric interpolant of grid samples at y + shift.
std::vector<Complex> shift_interpolate(const std::vector<Complex>& values, int d, int N,
                                       const std::vector<double>& shift);

/// Symmetric frequency for index k of an N-point transform, in [-N/2, N/2).
inline long signed_frequency(long k, long N) { return k < N / 2 ? k : k - N; }

}  // namespace smm
