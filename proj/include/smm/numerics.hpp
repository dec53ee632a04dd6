#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace smm {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Fractional part in [0, 1).
inline double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

/// Distance to the nearest integer, ||x||_{R/Z}.
inline double dist_to_int(double x) {
  const double f = frac(x);
  return std::min(f, 1.0 - f);
}

/// Neumaier compensated accumulator.
template <typename T>
class CompensatedSum {
 public:
  void add(T value) {
    const T t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      comp_ += (sum_ - t) + value;
    } else {
      comp_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t count = 0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Golden-section minimisation of a unimodal function on [a, b].
double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol, int max_iter = 200);

/// Bisection for a sign change of f on [a, b]; f(a) and f(b) must differ in sign.
double bisect_root(const std::function<double(double)>& f, double a, double b, double tol,
                   int max_iter = 200);

/// Thread count for data-parallel loops: SMM_THREADS if set, else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) over worker_count() threads. Results must be written to
/// per-index slots so the outcome is independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace smm
