#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "smm/model.hpp"
#include "smm/numerics.hpp"

namespace smm {

inline constexpr double kEpsBranch = 1e-8;

/// Default trapezoid grid per axis: valid for dist(z, [-c_d, c_d]) >= 0.1.
int default_grid_size(int d);

/// sqrt(w^2 - 4) as sqrt(w - 2) * sqrt(w + 2) with principal roots; ~ w at infinity.
Complex branch_sqrt(Complex w);

/// w(y) = z - sum_j 2 cos 2 pi y_j.
Complex fiber_w(std::span<const double> y, Complex z);

/// -1 / sqrt(w^2 - 4). Throws BranchPoint within kEpsBranch of w = +-2.
Complex fiber_gamma(Complex w);
/// Root of X + 1/X = w with |X| < 1.
Complex fiber_root(Complex w);

/// One-dimensional free resolvent kernel -r^|x| / sqrt(w^2 - 4).
Complex g1d(long x, Complex w);
/// Dirichlet half-line kernel at x = -1, by images.
Complex g1d_half(long x1, long x2, Complex w);

Complex gamma0_hat(std::span<const double> y, Complex z);
Complex gamma0_hat_plus(std::span<const double> y, Complex z);
/// Surface symbol of the chosen geometry.
Complex gamma_symbol(std::span<const double> y, Complex z, Geometry g);
/// (lambda G + i) / (lambda G - i) with G the surface symbol.
Complex c_symbol(std::span<const double> y, Complex z, double lambda,
                 Geometry g = Geometry::FullSpace);

/// Function on the torus T^d sampled at y = i/N, row-major in (i_1, ..., i_d).
class SymbolGrid {
 public:
  SymbolGrid(int d, int N);
  /// Samples f at every node; evaluation is data-parallel.
  static SymbolGrid sample(int d, int N, const std::function<Complex(std::span<const double>)>& f);

  int d() const { return d_; }
  int N() const { return n_; }
  std::size_t size() const { return values_.size(); }
  std::vector<double> node(std::size_t flat) const;
  Complex& operator[](std::size_t i) { return values_[i]; }
  Complex operator[](std::size_t i) const { return values_[i]; }
  std::vector<Complex>& values() { return values_; }
  const std::vector<Complex>& values() const { return values_; }

  double max_abs() const;

  void write_csv(std::ostream& os) const;
  /// 16-byte header: "SMGR", u32 d, u32 N, u32 reserved (0); then row-major (re, im) doubles.
  void write_binary(std::ostream& os) const;
  static SymbolGrid read_binary(std::istream& is);

 private:
  int d_;
  int n_;
  std::vector<Complex> values_;
};

/// Position-space convolution kernel K(n) = N^{-d} sum_y f(y) e^{2 pi i n.y}, on n mod N.
class LatticeKernel {
 public:
  LatticeKernel(int d, int N, std::vector<Complex> values) : d_(d), n_(N), values_(std::move(values)) {}
  int d() const { return d_; }
  int N() const { return n_; }
  Complex at(const IVec& n) const;
  const std::vector<Complex>& values() const { return values_; }

 private:
  int d_;
  int n_;
  std::vector<Complex> values_;
};

LatticeKernel kernel_from_symbol(const SymbolGrid& grid);

SymbolGrid gamma_grid(int d, Complex z, int N, Geometry g);

LatticeKernel g0_full_kernel(int d, long x, Complex z, int N);
LatticeKernel g0_half_kernel(int d, long x1, long x2, Complex z, int N);
LatticeKernel gamma0_kernel(int d, Complex z, int N, Geometry g = Geometry::FullSpace);
/// Convolution inverse of Gamma_0, from 1 / symbol on the grid.
LatticeKernel gamma0_inverse_kernel(int d, Complex z, int N, Geometry g = Geometry::FullSpace);

Complex g0_full(const IVec& n, long x, Complex z, int N);
Complex g0_half(const IVec& n, long x1, long x2, Complex z, int N);
Complex gamma0_position(const IVec& n, Complex z, int N, Geometry g = Geometry::FullSpace);

/// Least-squares fit of log|K| against |n|_1 + |x_offset| over sites with |n|_1 <= radius.
/// The decay rate is -slope.
LinearFit kernel_decay_fit(const LatticeKernel& k, long radius, long x_offset = 0);

}  // namespace smm
