#include "smm/green.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "smm/errors.hpp"
#include "smm/fourier.hpp"

namespace smm {

int default_grid_size(int d) { return d == 1 ? 2048 : 256; }

Complex branch_sqrt(Complex w) { return std::sqrt(w - 2.0) * std::sqrt(w + 2.0); }

Complex fiber_w(std::span<const double> y, Complex z) {
  Complex w = z;
  for (double yj : y) w -= 2.0 * std::cos(kTwoPi * yj);
  return w;
}

namespace {
void check_branch(Complex w) {
  if (std::abs(w - 2.0) < kEpsBranch || std::abs(w + 2.0) < kEpsBranch) {
    throw BranchPoint("spectral parameter touches the free band at a fiber (w = +-2)");
  }
  if (w.imag() == 0.0 && std::fabs(w.real()) <= 2.0) {
    throw BranchPoint("real spectral parameter inside the fiber band [-2, 2]");
  }
}
}  // namespace

Complex fiber_gamma(Complex w) {
  check_branch(w);
  return -1.0 / branch_sqrt(w);
}

Complex fiber_root(Complex w) {
  check_branch(w);
  return 2.0 / (w + branch_sqrt(w));
}

Complex g1d(long x, Complex w) {
  check_branch(w);
  const Complex s = branch_sqrt(w);
  const Complex r = 2.0 / (w + s);
  return -std::pow(r, static_cast<int>(std::labs(x))) / s;
}

Complex g1d_half(long x1, long x2, Complex w) { return g1d(x1 - x2, w) - g1d(x1 + x2 + 2, w); }

Complex gamma0_hat(std::span<const double> y, Complex z) { return fiber_gamma(fiber_w(y, z)); }

Complex gamma0_hat_plus(std::span<const double> y, Complex z) { return -fiber_root(fiber_w(y, z)); }

Complex gamma_symbol(std::span<const double> y, Complex z, Geometry g) {
  return g == Geometry::FullSpace ? gamma0_hat(y, z) : gamma0_hat_plus(y, z);
}

Complex c_symbol(std::span<const double> y, Complex z, double lambda, Geometry g) {
  const Complex lg = lambda * gamma_symbol(y, z, g);
  const Complex i(0.0, 1.0);
  return (lg + i) / (lg - i);
}

SymbolGrid::SymbolGrid(int d, int N) : d_(d), n_(N) {
  if (d < 1) throw InvalidArgument("SymbolGrid: d must be >= 1");
  if (N < 4 || N % 2 != 0) throw InvalidArgument("SymbolGrid: N must be even and >= 4");
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(N);
  values_.assign(total, Complex(0.0, 0.0));
}

std::vector<double> SymbolGrid::node(std::size_t flat) const {
  std::vector<double> y(d_);
  for (int a = d_ - 1; a >= 0; --a) {
    y[a] = static_cast<double>(flat % n_) / n_;
    flat /= n_;
  }
  return y;
}

SymbolGrid SymbolGrid::sample(int d, int N, const std::function<Complex(std::span<const double>)>& f) {
  SymbolGrid g(d, N);
  parallel_for(g.size(), [&](std::size_t i) {
    const auto y = g.node(i);
    const Complex v = f(y);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw SolverFailure("non-finite symbol value on the grid");
    }
    g.values_[i] = v;
  });
  return g;
}

double SymbolGrid::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

void SymbolGrid::write_csv(std::ostream& os) const {
  for (int a = 0; a < d_; ++a) os << "y" << (a + 1) << ",";
  os << "re,im\n";
  char buf[64];
  for (std::size_t i = 0; i < values_.size(); ++i) {
    for (double y : node(i)) {
      std::snprintf(buf, sizeof buf, "%.12e,", y);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.12e,%.12e\n", values_[i].real(), values_[i].imag());
    os << buf;
  }
}

void SymbolGrid::write_binary(std::ostream& os) const {
  const char magic[4] = {'S', 'M', 'G', 'R'};
  const std::uint32_t header[3] = {static_cast<std::uint32_t>(d_), static_cast<std::uint32_t>(n_), 0u};
  os.write(magic, 4);
  os.write(reinterpret_cast<const char*>(header), sizeof header);
  for (const auto& v : values_) {
    const double re = v.real(), im = v.imag();
    os.write(reinterpret_cast<const char*>(&re), sizeof re);
    os.write(reinterpret_cast<const char*>(&im), sizeof im);
  }
}

SymbolGrid SymbolGrid::read_binary(std::istream& is) {
  char magic[4];
  std::uint32_t header[3];
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(header), sizeof header);
  if (!is || std::memcmp(magic, "SMGR", 4) != 0) throw InvalidArgument("not an SMGR grid file");
  SymbolGrid g(static_cast<int>(header[0]), static_cast<int>(header[1]));
  for (auto& v : g.values_) {
    double re = 0.0, im = 0.0;
    is.read(reinterpret_cast<char*>(&re), sizeof re);
    is.read(reinterpret_cast<char*>(&im), sizeof im);
    v = Complex(re, im);
  }
  if (!is) throw InvalidArgument("truncated SMGR grid file");
  return g;
}

Complex LatticeKernel::at(const IVec& n) const {
  if (static_cast<int>(n.size()) != d_) throw InvalidArgument("kernel index dimension mismatch");
  std::size_t flat = 0;
  for (int a = 0; a < d_; ++a) {
    long m = n[a] % n_;
    if (m < 0) m += n_;
    flat = flat * n_ + static_cast<std::size_t>(m);
  }
  return values_[flat];
}

LatticeKernel kernel_from_symbol(const SymbolGrid& grid) {
  std::vector<Complex> v = grid.values();
  fft_nd(v, grid.d(), grid.N(), true);
  return LatticeKernel(grid.d(), grid.N(), std::move(v));
}

SymbolGrid gamma_grid(int d, Complex z, int N, Geometry g) {
  return SymbolGrid::sample(d, N, [&](std::span<const double> y) { return gamma_symbol(y, z, g); });
}

LatticeKernel g0_full_kernel(int d, long x, Complex z, int N) {
  return kernel_from_symbol(
      SymbolGrid::sample(d, N, [&](std::span<const double> y) { return g1d(x, fiber_w(y, z)); }));
}

LatticeKernel g0_half_kernel(int d, long x1, long x2, Complex z, int N) {
  if (x1 < 0 || x2 < 0) throw InvalidArgument("half-space kernel needs x1, x2 >= 0");
  return kernel_from_symbol(SymbolGrid::sample(
      d, N, [&](std::span<const double> y) { return g1d_half(x1, x2, fiber_w(y, z)); }));
}

LatticeKernel gamma0_kernel(int d, Complex z, int N, Geometry g) {
  return kernel_from_symbol(gamma_grid(d, z, N, g));
}

LatticeKernel gamma0_inverse_kernel(int d, Complex z, int N, Geometry g) {
  SymbolGrid grid = gamma_grid(d, z, N, g);
  for (auto& v : grid.values()) v = 1.0 / v;
  return kernel_from_symbol(grid);
}

Complex g0_full(const IVec& n, long x, Complex z, int N) {
  return g0_full_kernel(static_cast<int>(n.size()), x, z, N).at(n);
}

Complex g0_half(const IVec& n, long x1, long x2, Complex z, int N) {
  return g0_half_kernel(static_cast<int>(n.size()), x1, x2, z, N).at(n);
}

Complex gamma0_position(const IVec& n, Complex z, int N, Geometry g) {
  return gamma0_kernel(static_cast<int>(n.size()), z, N, g).at(n);
}

LinearFit kernel_decay_fit(const LatticeKernel& k, long radius, long x_offset) {
  std::vector<double> xs, ys;
  for (const auto& n : l1_ball_sites(k.d(), radius)) {
    const double mag = std::abs(k.at(n));
    if (mag <= 0.0) continue;
    long norm = std::labs(x_offset);
    for (long v : n) norm += std::labs(v);
    xs.push_back(static_cast<double>(norm));
    ys.push_back(std::log(mag));
  }
  return linear_fit(xs, ys);
}

}  // namespace smm
