#include "smm/reduction.hpp"

#include <cmath>
#include <cstdint>
#include <ostream>

#include "smm/errors.hpp"
#include "smm/fourier.hpp"

namespace smm {

namespace {

long cube_index(const IVec& n, long W) {
  long flat = 0;
  for (long v : n) {
    if (v < -W || v > W) return -1;
    flat = flat * (2 * W + 1) + (v + W);
  }
  return flat;
}

IVec diff(const IVec& a, const IVec& b) {
  IVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

int grid_or_default(int N, int d) { return N > 0 ? N : default_grid_size(d); }

// e^{2 pi i (alpha.n + theta)}
Complex phase_factor(const ModelParams& p, const IVec& n) { return std::polar(1.0, kTwoPi * p.phase(n)); }

Eigen::VectorXcd convolve(const LatticeKernel& k, const std::vector<IVec>& out_sites, const SurfaceField& f) {
  const auto in_sites = f.sites();
  Eigen::VectorXcd out(static_cast<Eigen::Index>(out_sites.size()));
  parallel_for(out_sites.size(), [&](std::size_t i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < in_sites.size(); ++j) {
      const Complex fj = f.values(static_cast<Eigen::Index>(j));
      if (fj != 0.0) acc += k.at(diff(out_sites[i], in_sites[j])) * fj;
    }
    out(static_cast<Eigen::Index>(i)) = acc;
  });
  return out;
}

}  // namespace

SurfaceField::SurfaceField(int d_, long W_) : d(d_), W(W_) {
  long m = 1;
  for (int i = 0; i < d; ++i) m *= (2 * W + 1);
  values = Eigen::VectorXcd::Zero(m);
}

long SurfaceField::index(const IVec& n) const { return cube_index(n, W); }

Complex SurfaceField::at(const IVec& n) const {
  const long i = index(n);
  return i < 0 ? Complex(0.0) : values(i);
}

LatticeField::LatticeField(int d_, long Ln_, long x_min_, long x_max_)
    : d(d_), Ln(Ln_), x_min(x_min_), x_max(x_max_) {
  long m = 1;
  for (int i = 0; i < d; ++i) m *= (2 * Ln + 1);
  values.assign(static_cast<std::size_t>(m * (x_max - x_min + 1)), Complex(0.0));
}

long LatticeField::index(const IVec& n, long x) const {
  if (x < x_min || x > x_max) return -1;
  const long ni = cube_index(n, Ln);
  if (ni < 0) return -1;
  return ni * (x_max - x_min + 1) + (x - x_min);
}

Complex LatticeField::at(const IVec& n, long x) const {
  const long i = index(n, x);
  return i < 0 ? Complex(0.0) : values[static_cast<std::size_t>(i)];
}

double LatticeField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

ReductionContext::ReductionContext(const ModelParams& params, Complex z, long W, int N)
    : params_(params),
      z_(z),
      delta_(std::polar(1.0, kTwoPi * params.theta())),
      W_(W),
      gamma_grid_(smm::gamma_grid(params.d(), z, grid_or_default(N, params.d()), params.geometry())) {
  if (W < 0) throw InvalidArgument("window radius W must be >= 0");
}

Eigen::MatrixXcd gamma0_matrix(const LatticeKernel& k, const std::vector<IVec>& sites) {
  const auto m = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXcd G(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) G(i, j) = k.at(diff(sites[i], sites[j]));
  return G;
}

namespace {

Eigen::MatrixXcd direct_T(const ModelParams& p, const Eigen::MatrixXcd& G, const std::vector<IVec>& sites) {
  const auto m = static_cast<Eigen::Index>(sites.size());
  Eigen::VectorXcd lv(m);
  for (Eigen::Index i = 0; i < m; ++i) lv(i) = potential(p, sites[i]);
  // lambda V (I + Gamma_0 lambda V)^-1 = (I + lambda V Gamma_0)^-1 lambda V, finite where v = 0
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(m, m) + lv.asDiagonal() * G;
  Eigen::MatrixXcd rhs = lv.asDiagonal().toDenseMatrix();
  return A.partialPivLu().solve(rhs);
}

}  // namespace

Eigen::MatrixXcd build_T_direct(const ModelParams& params, Complex z, long W, int N) {
  const auto sites = cube_sites(params.d(), W);
  const auto K = gamma0_kernel(params.d(), z, grid_or_default(N, params.d()), params.geometry());
  return direct_T(params, gamma0_matrix(K, sites), sites);
}

TOperator build_T(const ReductionContext& ctx, double tail_tol) {
  const ModelParams& p = ctx.params();
  const double lambda = p.lambda();
  const Complex i(0.0, 1.0);

  SymbolGrid cgrid = ctx.gamma_grid();
  SymbolGrid rgrid = ctx.gamma_grid();
  for (std::size_t k = 0; k < cgrid.size(); ++k) {
    const Complex lg = lambda * ctx.gamma_grid()[k];
    cgrid[k] = (lg + i) / (lg - i);
    rgrid[k] = 1.0 / (lg - i);
  }

  TOperator T;
  T.c_norm = cgrid.max_abs();
  if (!(T.c_norm < 1.0)) {
    throw SeriesDiverges("measured sup |C| = " + std::to_string(T.c_norm) + " is not below 1");
  }
  T.sites = cube_sites(p.d(), ctx.W());
  const auto m = static_cast<Eigen::Index>(T.sites.size());

  const auto Ck = kernel_from_symbol(cgrid);
  const auto Rk = kernel_from_symbol(rgrid);
  const Eigen::MatrixXcd C = gamma0_matrix(Ck, T.sites);
  const Eigen::MatrixXcd R = gamma0_matrix(Rk, T.sites);
  Eigen::VectorXcd du(m);
  for (Eigen::Index k = 0; k < m; ++k) du(k) = phase_factor(p, T.sites[k]);

  Eigen::MatrixXcd acc = R;
  Eigen::MatrixXcd term = R;
  const double c = T.c_norm;
  int k = 0;
  const int max_terms = 1000000;
  while (std::pow(c, k + 1) / (1.0 - c) >= tail_tol) {
    if (++k > max_terms) throw SeriesDiverges("Neumann series did not reach the tail tolerance");
    term = C * (du.asDiagonal() * term);
    acc += term;
  }
  T.tail_terms = k;
  T.neumann = lambda * ((Eigen::VectorXcd::Ones(m) - du).asDiagonal() * acc);

  const auto G = kernel_from_symbol(ctx.gamma_grid());
  T.direct = direct_T(p, gamma0_matrix(G, T.sites), T.sites);
  return T;
}

void write_T(const TOperator& T, const ReductionContext& ctx, std::ostream& bin, nlohmann::json& sidecar) {
  const auto m = static_cast<std::uint32_t>(T.neumann.rows());
  const char magic[4] = {'S', 'M', 'G', 'R'};
  const std::uint32_t header[3] = {2u, m, 0u};
  bin.write(magic, 4);
  bin.write(reinterpret_cast<const char*>(header), sizeof header);
  for (Eigen::Index r = 0; r < T.neumann.rows(); ++r)
    for (Eigen::Index c = 0; c < T.neumann.cols(); ++c) {
      const double re = T.neumann(r, c).real(), im = T.neumann(r, c).imag();
      bin.write(reinterpret_cast<const char*>(&re), sizeof re);
      bin.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  const auto& p = ctx.params();
  sidecar = nlohmann::json{{"z", {ctx.z().real(), ctx.z().imag()}},
                           {"lambda", p.lambda()},
                           {"theta", p.theta()},
                           {"alpha", p.alpha()},
                           {"W", ctx.W()},
                           {"tail_terms", T.tail_terms},
                           {"c_norm", T.c_norm},
                           {"geometry", to_string(p.geometry())}};
}

Complex q_symbol(std::span<const double> y, double E, double lambda, Geometry g) {
  const Complex lg = lambda * gamma_symbol(y, Complex(E, 0.0), g);
  const Complex i(0.0, 1.0);
  return -(1.0 - i * lg) / (1.0 + i * lg);
}

ZetaBranch zeta_branch(double E, double lambda, int N, Geometry g, int d) {
  if (std::fabs(E) <= 2.0 * (d + 1)) throw BranchPoint("zeta needs real E outside the free band");
  if (lambda == 0.0) throw InvalidArgument("lambda must be nonzero");
  const SymbolGrid q = SymbolGrid::sample(d, N, [&](std::span<const double> y) { return q_symbol(y, E, lambda, g); });

  ZetaBranch zb;
  zb.lambda = lambda;
  zb.E = E;
  zb.N = N;
  zb.experimental = d > 1;
  zb.zeta_values.resize(q.size());
  auto raw = [&](std::size_t k) { return -std::arg(q[k]) / kTwoPi; };
  auto step = [&](std::size_t from, std::size_t to) {
    double jump = raw(to) - raw(from);
    jump -= std::round(jump);
    if (std::fabs(jump) > kUnwrapLimit) {
      throw UnwrapFailure("argument of q jumps by more than 1/4 between grid nodes; refine the grid");
    }
    return jump;
  };
  for (std::size_t k = 0; k < q.size(); ++k) {
    zb.max_unimodular_defect = std::max(zb.max_unimodular_defect, std::fabs(std::abs(q[k]) - 1.0));
  }
  zb.zeta_values[0] = frac(raw(0));
  // Sweep: each node hangs off the node with its last nonzero coordinate decreased by one.
  for (std::size_t k = 1; k < q.size(); ++k) {
    std::size_t stride = 1;
    std::size_t rem = k;
    while (rem % N == 0) {
      rem /= N;
      stride *= N;
    }
    zb.zeta_values[k] = zb.zeta_values[k - stride] + step(k - stride, k);
  }
  // Winding along the first axis loop (the whole torus when d = 1).
  std::size_t axis_stride = 1;
  for (int a = 1; a < d; ++a) axis_stride *= N;
  const std::size_t last = (N - 1) * axis_stride;
  const double closed = zb.zeta_values[last] + step(last, 0);
  zb.winding = std::lround(closed - zb.zeta_values[0]);

  CompensatedSum<double> s;
  for (double v : zb.zeta_values) s.add(v);
  zb.zeta0 = s.value() / static_cast<double>(zb.zeta_values.size());
  return zb;
}

double zeta0(double E, double lambda, int N, Geometry g, int d) { return zeta_branch(E, lambda, N, g, d).zeta0; }

Zeta0Curve zeta0_curve(double E_min, double E_max, int steps, double lambda, Geometry g, int N, int d) {
  const double c = 2.0 * (d + 1);
  if (!(E_min < E_max)) throw InvalidArgument("zeta0_curve needs E_min < E_max");
  if (steps < 2) throw InvalidArgument("zeta0_curve needs at least 2 steps");
  if (!(E_min > c || E_max < -c)) throw InvalidArgument("energy interval meets the free band");
  Zeta0Curve curve;
  curve.rows.resize(steps);
  parallel_for(steps, [&](std::size_t k) {
    const double E = E_min + (E_max - E_min) * static_cast<double>(k) / (steps - 1);
    auto zb = zeta_branch(E, lambda, N, g, d);
    curve.rows[k] = {E, zb.zeta0, zb.winding};
  });
  bool up = true, down = true;
  for (int k = 1; k < steps; ++k) {
    up = up && curve.rows[k].zeta0 > curve.rows[k - 1].zeta0;
    down = down && curve.rows[k].zeta0 < curve.rows[k - 1].zeta0;
  }
  curve.monotone = up || down;
  return curve;
}

void write_zeta0_csv(const Zeta0Curve& c, std::ostream& os) {
  os << "E,zeta0,winding\n";
  char buf[96];
  for (const auto& r : c.rows) {
    std::snprintf(buf, sizeof buf, "%.12e,%.12e,%ld\n", r.E, r.zeta0, r.winding);
    os << buf;
  }
}

LatticeField transfer_phi_to_psi(const SurfaceField& phi, double E, const ModelParams& params, long Ln, long X,
                                 int N) {
  if (std::fabs(E) <= params.c_d()) throw BranchPoint("transfer needs real E outside the free band");
  if (phi.d != params.d()) throw InvalidArgument("phi dimension does not match the model");
  const bool half = params.geometry() == Geometry::HalfSpace;
  const int n_grid = grid_or_default(N, params.d());
  LatticeField psi(params.d(), Ln, half ? 0 : -X, X);
  const auto out_sites = cube_sites(params.d(), Ln);
  for (long x = psi.x_min; x <= psi.x_max; ++x) {
    const auto K = half ? g0_half_kernel(params.d(), x, 0, E, n_grid) : g0_full_kernel(params.d(), x, E, n_grid);
    const Eigen::VectorXcd col = convolve(K, out_sites, phi);
    for (std::size_t i = 0; i < out_sites.size(); ++i) {
      psi.values[static_cast<std::size_t>(psi.index(out_sites[i], x))] = col(static_cast<Eigen::Index>(i));
    }
  }
  return psi;
}

SurfaceField transfer_psi_to_phi(const SurfaceField& psi_surface, double E, const ModelParams& params, int N) {
  if (std::fabs(E) <= params.c_d()) throw BranchPoint("transfer needs real E outside the free band");
  const auto Ki = gamma0_inverse_kernel(params.d(), E, grid_or_default(N, params.d()), params.geometry());
  SurfaceField phi(psi_surface.d, psi_surface.W);
  phi.values = convolve(Ki, phi.sites(), psi_surface);
  return phi;
}

SurfaceField surface_of(const LatticeField& psi) {
  SurfaceField s(psi.d, psi.Ln);
  const auto sites = s.sites();
  for (std::size_t i = 0; i < sites.size(); ++i) s.values(static_cast<Eigen::Index>(i)) = psi.at(sites[i], 0);
  return s;
}

double eigen_residual(const LatticeField& psi, double E, const ModelParams& params, long margin) {
  const bool half = params.geometry() == Geometry::HalfSpace;
  const double scale = psi.max_abs();
  if (scale == 0.0) return 0.0;
  const long x_lo = half ? 0 : psi.x_min + margin;
  const long x_hi = psi.x_max - margin;
  double worst = 0.0;
  for (const auto& n : cube_sites(psi.d, psi.Ln - margin)) {
    const double v = potential(params, n);
    for (long x = x_lo; x <= x_hi; ++x) {
      Complex h = psi.at(n, x + 1) + psi.at(n, x - 1);  // x = -1 reads 0 in the half space
      IVec m = n;
      for (int a = 0; a < psi.d; ++a) {
        m[a] = n[a] + 1;
        h += psi.at(m, x);
        m[a] = n[a] - 1;
        h += psi.at(m, x);
        m[a] = n[a];
      }
      if (x == 0) h += v * psi.at(n, 0);
      worst = std::max(worst, std::abs(h - E * psi.at(n, x)));
    }
  }
  return worst / scale;
}

Complex cayley_multiplier(const ModelParams& params, const IVec& n) {
  const double v = tan_phase(params, n);
  if (v == 0.0) return {std::nan(""), std::nan("")};
  const Complex i(0.0, 1.0);
  const Complex vinv = 1.0 / v;
  return (1.0 + i * vinv) / (1.0 - i * vinv);
}

CayleyReport cayley_check(const SurfaceField& phi, double E, const ModelParams& params, int N, double tol) {
  CayleyReport rep;
  if (phi.values.size() == 0 || phi.values.cwiseAbs().maxCoeff() == 0.0) {
    rep.status = "zero vector";
    return rep;
  }
  rep.status = "ok";
  const int d = params.d();
  const int n_grid = grid_or_default(N, d);
  const double lambda = params.lambda();
  const Complex i(0.0, 1.0);
  const auto sites = phi.sites();

  // position form on the window
  const SymbolGrid gg = gamma_grid(d, E, n_grid, params.geometry());
  const auto K = kernel_from_symbol(gg);
  const Eigen::VectorXcd gphi = convolve(K, sites, phi);
  const Eigen::VectorXcd c = phi.values + i * lambda * gphi;
  const Eigen::VectorXcd rhs = phi.values - i * lambda * gphi;
  double worst = 0.0;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const auto idx = static_cast<Eigen::Index>(k);
    if (dist_to_int(params.phase(sites[k])) < kEpsTan) {
      ++rep.excluded_sites;
      continue;
    }
    worst = std::max(worst, std::abs(cayley_multiplier(params, sites[k]) * c(idx) - rhs(idx)));
  }
  rep.clay_residual = worst / c.cwiseAbs().maxCoeff();

  // Fourier form q(y) c^(y) = e^{-2 pi i theta} c^(y + alpha)
  std::vector<Complex> chat(gg.size(), Complex(0.0));
  for (std::size_t k = 0; k < sites.size(); ++k) {
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a) {
      long m = sites[k][a] % n_grid;
      if (m < 0) m += n_grid;
      flat = flat * n_grid + static_cast<std::size_t>(m);
    }
    chat[flat] = phi.values(static_cast<Eigen::Index>(k));
  }
  fft_nd(chat, d, n_grid, false);
  std::vector<Complex> qv(gg.size());
  for (std::size_t k = 0; k < chat.size(); ++k) {
    const Complex lg = lambda * gg[k];
    chat[k] *= (1.0 + i * lg);
    qv[k] = -(1.0 - i * lg) / (1.0 + i * lg);
  }
  const auto shifted = shift_interpolate(chat, d, n_grid, params.alpha());
  const Complex e_theta = std::polar(1.0, -kTwoPi * params.theta());
  double w2 = 0.0, cmax = 0.0;
  for (std::size_t k = 0; k < chat.size(); ++k) {
    w2 = std::max(w2, std::abs(qv[k] * chat[k] - e_theta * shifted[k]));
    cmax = std::max(cmax, std::abs(chat[k]));
  }
  rep.trf3_residual = w2 / cmax;
  rep.discrepancy = (rep.clay_residual < tol) != (rep.trf3_residual < tol);
  return rep;
}

}  // namespace smm
