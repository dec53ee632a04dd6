#include "smm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include <Eigen/SparseLU>

#include "smm/errors.hpp"
#include "smm/green.hpp"

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

long l1(const IVec& a, const IVec& b) {
  long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::labs(a[i] - b[i]);
  return s;
}

IVec diff(const IVec& a, const IVec& b) {
  IVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// phase reduced to (-1/2, 1/2], so v = tan(pi * phi)
double centred_phase(const ModelParams& p, const IVec& n) {
  double ph = p.phase(n);
  if (ph > 0.5) ph -= 1.0;
  return ph;
}

}  // namespace

long FiniteVolumeOperator::row(const IVec& n, long x) const {
  if (x < x_min || x > x_max) return -1;
  const long i = cube_index(n, L);
  if (i < 0) return -1;
  return (x - x_min) * layer_size() + i;
}

Site FiniteVolumeOperator::site(long r) const {
  const long m = layer_size();
  return {layer_sites[static_cast<std::size_t>(r % m)], x_min + r / m};
}

FiniteVolumeOperator build_finite(const ModelParams& params, long L, std::optional<double> coupling) {
  if (L < 0) throw InvalidArgument("box radius L must be >= 0");
  FiniteVolumeOperator op{params, coupling.value_or(params.lambda()), L, 0, L, cube_sites(params.d(), L), {}};
  op.x_min = params.geometry() == Geometry::FullSpace ? -L : 0;
  const long m = op.layer_size();
  const long layers = op.x_max - op.x_min + 1;
  const int d = params.d();

  std::vector<double> diag(static_cast<std::size_t>(m), 0.0);
  if (op.coupling != 0.0) {
    for (long i = 0; i < m; ++i) {
      const double v = op.coupling * tan_phase(params, op.layer_sites[i]);
      if (!(std::fabs(v) <= kMaxSurfacePotential))
        throw PhaseSingularity("|v| exceeds 1e10 at a surface site of the box");
      diag[i] = v;
    }
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m * layers * (2 * d + 3)));
  for (long x = op.x_min; x <= op.x_max; ++x) {
    for (long i = 0; i < m; ++i) {
      const IVec& n = op.layer_sites[i];
      const long r = op.row(n, x);
      if (x == 0 && diag[i] != 0.0) trip.emplace_back(r, r, diag[i]);
      for (int j = 0; j < d; ++j) {
        for (int s : {-1, 1}) {
          IVec nb = n;
          nb[j] += s;
          const long c = op.row(nb, x);
          if (c >= 0) trip.emplace_back(r, c, 1.0);
        }
      }
      for (int s : {-1, 1}) {
        const long c = op.row(n, x + s);
        if (c >= 0) trip.emplace_back(r, c, 1.0);
      }
    }
  }
  op.matrix.resize(m * layers, m * layers);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.matrix.makeCompressed();
  return op;
}

void write_triplets(const FiniteVolumeOperator& op, std::ostream& os, nlohmann::json& header) {
  long nnz = 0;
  char buf[96];
  for (int k = 0; k < op.matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.matrix, k); it; ++it) {
      if (it.row() > it.col()) continue;
      std::snprintf(buf, sizeof buf, "%ld %ld %.12e\n", static_cast<long>(it.row()), static_cast<long>(it.col()),
                    it.value());
      os << buf;
      ++nnz;
    }
  header = nlohmann::json{{"params", op.params},
                          {"lambda_used", op.coupling},
                          {"L", op.L},
                          {"x_min", op.x_min},
                          {"x_max", op.x_max},
                          {"dim", op.dim()},
                          {"entries_upper", nnz},
                          {"symmetric", true},
                          {"row_order", "x-major, then n lexicographic"},
                          {"boundary", "dirichlet"}};
}

void analyse_eigenvector(const FiniteVolumeOperator& op, EigenPair& ep) {
  const long m = op.layer_size();
  Eigen::Index imax = 0;
  ep.psi.cwiseAbs().maxCoeff(&imax);
  const Site c = op.site(imax);
  ep.center_n = c.n;
  ep.center_x = c.x;

  double surf = 0.0;
  const long r0 = (0 - op.x_min) * m;
  for (long i = 0; i < m; ++i) surf += ep.psi(r0 + i) * ep.psi(r0 + i);
  ep.surface_mass = surf / ep.psi.squaredNorm();

  // envelope max|psi| per distance from the centre, fitted in log scale down to the noise floor
  const double peak = std::fabs(ep.psi(imax));
  std::map<long, double> env_n, env_x, env;
  for (long r = 0; r < op.dim(); ++r) {
    const Site s = op.site(r);
    const double a = std::fabs(ep.psi(r));
    const long dn = l1(s.n, c.n), dx = std::labs(s.x - c.x);
    env[dn + dx] = std::max(env[dn + dx], a);
    if (s.x == c.x) env_n[dn] = std::max(env_n[dn], a);
    if (dn == 0) env_x[dx] = std::max(env_x[dx], a);
  }
  auto fit = [peak](const std::map<long, double>& e) {
    std::vector<double> xs, ys;
    for (const auto& [r, a] : e) {
      if (a <= 1e-13 * peak) break;
      xs.push_back(static_cast<double>(r));
      ys.push_back(std::log(a));
    }
    if (xs.size() < 2) return 0.0;
    return linear_fit(xs, ys).slope;
  };
  ep.decay = {fit(env_n), fit(env_x), fit(env)};
}

namespace {

void check_window(const FiniteVolumeOperator& op, double lo, double hi) {
  const double c = op.params.c_d() + kBandMargin;
  if (!(lo < hi)) throw InvalidArgument("eigen window needs lo < hi");
  if (!(lo >= c || hi <= -c)) throw InvalidArgument("eigen window must avoid [-c_d - 0.2, c_d + 0.2]");
}

// Surface Schur complement S(s) = S0 - s + B (s - Hb)^-1 B^T. The bulk Hb is a product of the
// Dirichlet cube Laplacian in n and the path [1, L] in x, so its x = 1 block is diagonal in the
// eigenbasis U of the cube Laplacian.
class SurfaceSchur {
 public:
  explicit SurfaceSchur(const FiniteVolumeOperator& op) : op_(op) {
    const long m = op.layer_size();
    const long r0 = (0 - op.x_min) * m;
    S0_ = Eigen::MatrixXd(op.matrix.block(r0, r0, m, m));
    Eigen::MatrixXd lap = S0_;
    lap.diagonal().setZero();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
    if (es.info() != Eigen::Success) throw SolverFailure("surface Laplacian eigensolver failed");
    U_ = es.eigenvectors();
    mu_ = es.eigenvalues();
    halves_ = op.params.geometry() == Geometry::FullSpace ? 2 : 1;
    const long Lx = op.L;
    sines_ = Eigen::MatrixXd(Lx, Lx);  // sines_(k, x-1) = sqrt(2/(L+1)) sin(pi (k+1) x / (L+1))
    nu_ = Eigen::VectorXd(Lx);
    for (long k = 0; k < Lx; ++k) {
      nu_(k) = 2.0 * std::cos(kPi * (k + 1) / (Lx + 1.0));
      for (long x = 1; x <= Lx; ++x)
        sines_(k, x - 1) = std::sqrt(2.0 / (Lx + 1.0)) * std::sin(kPi * (k + 1) * x / (Lx + 1.0));
    }
  }

  // (1,1) entry of (e - path)^-1 and its derivative in e
  std::pair<double, double> path_green(double e) const {
    double g = 0.0, dg = 0.0;
    for (Eigen::Index k = 0; k < nu_.size(); ++k) {
      const double w = sines_(k, 0) * sines_(k, 0);
      const double den = e - nu_(k);
      g += w / den;
      dg -= w / (den * den);
    }
    return {g, dg};
  }

  struct Eval {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    Eigen::VectorXd dg;  // halves * g'(s - mu_j)
  };

  Eval eval(double s) const {
    const auto m = mu_.size();
    Eigen::VectorXd g(m), dg(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      auto [a, b] = path_green(s - mu_(j));
      g(j) = halves_ * a;
      dg(j) = halves_ * b;
    }
    Eigen::MatrixXd S = S0_ - s * Eigen::MatrixXd::Identity(m, m) + U_ * g.asDiagonal() * U_.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw SolverFailure("Schur complement eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors(), dg};
  }

  long negatives(double s) const {
    const auto v = eval(s).values;
    return static_cast<long>((v.array() < 0.0).count());
  }

  // d mu_i / ds = -1 + sum_j dg_j (U^T u)_j^2
  double slope(const Eval& e, Eigen::Index i) const {
    const Eigen::VectorXd uh = U_.transpose() * e.vectors.col(i);
    return -1.0 + (e.dg.array() * uh.array().square()).sum();
  }

  Eigen::VectorXd lift(const Eigen::VectorXd& u, double s) const {
    const long m = op_.layer_size();
    const Eigen::VectorXd uh = U_.transpose() * u;
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(op_.dim());
    const long r0 = (0 - op_.x_min) * m;
    psi.segment(r0, m) = u;
    for (long x = 1; x <= op_.L; ++x) {
      Eigen::VectorXd h(m);
      for (long j = 0; j < m; ++j) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < nu_.size(); ++k)
          acc += sines_(k, x - 1) * sines_(k, 0) / (s - mu_(j) - nu_(k));
        h(j) = acc * uh(j);
      }
      const Eigen::VectorXd layer = U_ * h;
      psi.segment((x - op_.x_min) * m, m) = layer;
      if (halves_ == 2) psi.segment((-x - op_.x_min) * m, m) = layer;
    }
    return psi / psi.norm();
  }

 private:
  const FiniteVolumeOperator& op_;
  Eigen::MatrixXd S0_, U_, sines_;
  Eigen::VectorXd mu_, nu_;
  int halves_ = 2;
};

}  // namespace

std::vector<EigenPair> eig_window(const FiniteVolumeOperator& op, double lo, double hi, double tol) {
  check_window(op, lo, hi);
  std::vector<EigenPair> out;
  if (op.L < 1) return out;
  SurfaceSchur sc(op);
  const long c_lo = sc.negatives(lo), c_hi = sc.negatives(hi);
  // sorted Schur eigenvalue i crosses zero exactly once in (lo, hi) for c_lo <= i < c_hi
  for (long i = c_lo; i < c_hi; ++i) {
    double a = lo, b = hi, s = 0.5 * (lo + hi);
    bool done = false;
    for (int it = 0; it < 200 && !done; ++it) {
      const auto e = sc.eval(s);
      const double mu = e.values(i);
      if (mu >= 0.0) a = s; else b = s;
      const double step = -mu / sc.slope(e, i);
      double next = s + step;
      if (std::fabs(step) < tol * std::max(1.0, std::fabs(s))) {
        s = next;
        done = true;
        break;
      }
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      s = next;
      if (b - a < tol * std::max(1.0, std::fabs(s))) done = true;
    }
    if (!done) throw SolverFailure("Schur root iteration did not converge");
    const auto e = sc.eval(s);
    EigenPair ep;
    ep.E = s;
    ep.psi = sc.lift(e.vectors.col(i), s);
    analyse_eigenvector(op, ep);
    out.push_back(std::move(ep));
  }
  std::sort(out.begin(), out.end(), [](const EigenPair& x, const EigenPair& y) { return x.E < y.E; });
  return out;
}

Eigen::VectorXd all_eigenvalues(const FiniteVolumeOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(op.matrix), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverFailure("dense eigensolver failed");
  return es.eigenvalues();
}

std::vector<EigenPair> eig_window_dense(const FiniteVolumeOperator& op, double lo, double hi) {
  check_window(op, lo, hi);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(op.matrix)};
  if (es.info() != Eigen::Success) throw SolverFailure("dense eigensolver failed");
  std::vector<EigenPair> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double E = es.eigenvalues()(i);
    if (E <= lo || E >= hi) continue;
    EigenPair ep;
    ep.E = E;
    ep.psi = es.eigenvectors().col(i);
    analyse_eigenvector(op, ep);
    out.push_back(std::move(ep));
  }
  return out;
}

Prediction predict_eigenvalues(double lambda, double alpha, double theta, long k_min, long k_max, double E_lo,
                               double E_hi, double tol, Geometry g, int N, int scan_points) {
  const double c = 4.0;
  if (!(E_lo < E_hi)) throw InvalidArgument("energy window needs E_lo < E_hi");
  if (!(E_lo > c || E_hi < -c)) throw InvalidArgument("energy window meets the free band");
  if (k_min > k_max) throw InvalidArgument("empty k range");
  if (scan_points < 3) throw InvalidArgument("scan needs at least 3 points");

  Prediction pred;
  auto lifted_grid = [&](int pts) {
    std::vector<double> E(pts), z(pts);
    parallel_for(static_cast<std::size_t>(pts), [&](std::size_t i) {
      E[i] = E_lo + (E_hi - E_lo) * static_cast<double>(i) / (pts - 1);
      z[i] = zeta0(E[i], lambda, N, g, 1);
    });
    for (int i = 1; i < pts; ++i) {
      const double jump = z[i] - z[i - 1];
      z[i] = z[i - 1] + (jump - std::round(jump));
    }
    return std::pair{E, z};
  };
  auto [E, z] = lifted_grid(scan_points);
  bool up = true, down = true;
  for (std::size_t i = 1; i < z.size(); ++i) {
    up = up && z[i] > z[i - 1];
    down = down && z[i] < z[i - 1];
  }
  pred.monotone = up || down;
  if (!pred.monotone) std::tie(E, z) = lifted_grid(4 * scan_points);

  const double h = E[1] - E[0];
  auto lifted = [&](double e) {
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, (e - E_lo) / h)), E.size() - 2);
    const double t = (e - E[i]) / h;
    const double guess = (1 - t) * z[i] + t * z[i + 1];
    const double raw = zeta0(e, lambda, N, g, 1);
    return raw + std::round(guess - raw);
  };

  std::vector<std::vector<PredictedEigenvalue>> per_k(static_cast<std::size_t>(k_max - k_min + 1));
  parallel_for(per_k.size(), [&](std::size_t idx) {
    const long k = k_min + static_cast<long>(idx);
    const long double target_ld = static_cast<long double>(theta) + static_cast<long double>(k) * alpha;
    const double t = static_cast<double>(target_ld - std::floor(target_ld));
    for (std::size_t i = 0; i + 1 < E.size(); ++i) {
      const double a = std::min(z[i], z[i + 1]), b = std::max(z[i], z[i + 1]);
      for (double m = std::ceil(a - t); m + t <= b; m += 1.0) {
        const double level = t + m;
        double root;
        if (z[i] == level) root = E[i];
        else if (z[i + 1] == level) continue;  // picked up by the next interval
        else root = bisect_root([&](double e) { return lifted(e) - level; }, E[i], E[i + 1], tol);
        const double res = dist_to_int(static_cast<double>(zeta0(root, lambda, N, g, 1) - target_ld));
        per_k[idx].push_back({k, root, res, root > 0 ? Side::Above : Side::Below});
      }
    }
  });
  for (auto& v : per_k) pred.values.insert(pred.values.end(), v.begin(), v.end());
  std::sort(pred.values.begin(), pred.values.end(),
            [](const auto& x, const auto& y) { return x.E < y.E || (x.E == y.E && x.k < y.k); });
  return pred;
}

std::vector<DensityRow> spectral_density_scan(double lambda, double alpha, double theta, double E_star, long K_max,
                                              Geometry g, double E_far, int N) {
  const double c = 4.0;
  if (std::fabs(E_star) <= c) throw InvalidArgument("E_star must lie outside [-c_d, c_d]");
  if (K_max < 1) throw InvalidArgument("K_max must be >= 1");
  const double edge = c + 0.05;
  const double far = std::max(E_far, std::fabs(E_star) + 1.0);
  const double lo = E_star > 0 ? edge : -far;
  const double hi = E_star > 0 ? far : -edge;
  const auto pred = predict_eigenvalues(lambda, alpha, theta, -K_max, K_max, lo, hi, 1e-12, g, N, 800);

  std::vector<double> best(static_cast<std::size_t>(K_max + 1), std::numeric_limits<double>::infinity());
  std::vector<long> arg(best.size(), 0);
  for (const auto& p : pred.values) {
    const auto K = static_cast<std::size_t>(std::labs(p.k));
    const double dist = std::fabs(p.E - E_star);
    if (dist < best[K]) {
      best[K] = dist;
      arg[K] = p.k;
    }
  }
  std::vector<DensityRow> rows;
  double run = std::numeric_limits<double>::infinity();
  long run_k = 0;
  for (long K = 0; K <= K_max; ++K) {
    if (best[K] < run) {
      run = best[K];
      run_k = arg[K];
    }
    if (K >= 1) rows.push_back({K, run, run_k});
  }
  return rows;
}

ResolventReport resolvent_check(const ModelParams& params, long L, Complex z, long W, bool free_operator, int N) {
  if (2 * W > L) throw InvalidArgument("resolvent_check needs W <= L/2");
  if (!free_operator && !(z.imag() * params.lambda() < 0.0))
    throw InvalidArgument("resolvent_check needs Im z * lambda < 0");
  const int d = params.d();
  if (N <= 0) N = std::max(default_grid_size(d), static_cast<int>(4 * L + 8));
  const bool half = params.geometry() == Geometry::HalfSpace;

  const auto op = build_finite(params, L, free_operator ? std::optional<double>(0.0) : std::nullopt);
  Eigen::SparseMatrix<Complex> A = op.matrix.cast<Complex>();
  for (Eigen::Index i = 0; i < A.rows(); ++i) A.coeffRef(i, i) -= z;
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverFailure("sparse LU of H - z failed");

  const auto ns = cube_sites(d, W);
  std::vector<Site> inner;
  for (long x = half ? 0 : -W; x <= W; ++x)
    for (const auto& n : ns) inner.push_back({n, x});
  const auto P = static_cast<Eigen::Index>(inner.size());

  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(op.dim(), P);
  for (Eigen::Index j = 0; j < P; ++j) rhs(op.row(inner[j].n, inner[j].x), j) = 1.0;
  const Eigen::MatrixXcd cols = lu.solve(rhs);
  Eigen::MatrixXcd Gdir(P, P);
  for (Eigen::Index i = 0; i < P; ++i) Gdir.row(i) = cols.row(op.row(inner[i].n, inner[i].x));

  // free kernels by x (full) or by (x1, x2) (half)
  std::map<std::pair<long, long>, LatticeKernel> kernels;
  auto kernel = [&](long x1, long x2) -> const LatticeKernel& {
    const auto key = half ? std::pair{x1, x2} : std::pair{x1 - x2, 0L};
    auto it = kernels.find(key);
    if (it == kernels.end())
      it = kernels
               .emplace(key, half ? g0_half_kernel(d, x1, x2, z, N) : g0_full_kernel(d, x1 - x2, z, N))
               .first;
    return it->second;
  };

  const auto eta = cube_sites(d, L);
  const auto M = static_cast<Eigen::Index>(eta.size());
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(M, M);
  if (!free_operator) T = build_T_direct(params, z, L, N);

  Eigen::MatrixXcd left(P, M), right(M, P), G0(P, P);
  for (Eigen::Index i = 0; i < P; ++i) {
    const auto& k = kernel(inner[i].x, 0);
    for (Eigen::Index a = 0; a < M; ++a) left(i, a) = k.at(diff(inner[i].n, eta[a]));
  }
  for (Eigen::Index j = 0; j < P; ++j) {
    const auto& k = kernel(0, inner[j].x);
    for (Eigen::Index a = 0; a < M; ++a) right(a, j) = k.at(diff(eta[a], inner[j].n));
  }
  for (Eigen::Index i = 0; i < P; ++i)
    for (Eigen::Index j = 0; j < P; ++j) G0(i, j) = kernel(inner[i].x, inner[j].x).at(diff(inner[i].n, inner[j].n));
  const Eigen::MatrixXcd F = G0 - left * T * right;

  ResolventReport rep;
  rep.pairs = P * P;
  for (Eigen::Index i = 0; i < P; ++i)
    for (Eigen::Index j = 0; j < P; ++j) {
      const double err = std::abs(F(i, j) - Gdir(i, j));
      rep.max_abs_error = std::max(rep.max_abs_error, err);
      rep.max_rel_error = std::max(rep.max_rel_error, err / std::abs(Gdir(i, j)));
    }
  return rep;
}

double reduced_sigma_min(const ModelParams& params, double E, long W, int N, Eigen::VectorXd* phi) {
  const auto sites = cube_sites(params.d(), W);
  const auto K = gamma0_kernel(params.d(), Complex(E, 0.0), N, params.geometry());
  const auto m = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd A(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double ph = kPi * centred_phase(params, sites[i]);
    const double sn = std::sin(ph), cs = std::cos(ph);
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = sn * params.lambda() * K.at(diff(sites[i], sites[j])).real();
    A(i, i) += cs;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, phi ? Eigen::ComputeFullV : 0);
  const auto& sv = svd.singularValues();
  if (phi) *phi = svd.matrixV().col(m - 1);
  return sv(m - 1);
}

std::vector<ReducedSolution> reduced_equation_solve(const ModelParams& params, double E_lo, double E_hi, long W,
                                                    const ReduceOptions& opt) {
  const double c = params.c_d();
  if (params.lambda() == 0.0) throw InvalidArgument("reduced equation needs lambda != 0");
  if (!(E_lo < E_hi)) throw InvalidArgument("energy window needs E_lo < E_hi");
  if (!(E_lo > c || E_hi < -c)) throw InvalidArgument("energy window meets the free band");
  if (W < 1) throw InvalidArgument("window radius W must be >= 1");

  const auto sites = cube_sites(params.d(), W);
  long regularized = 0;
  for (const auto& n : sites)
    if (std::fabs(std::sin(kPi * centred_phase(params, n))) < kEpsTan) ++regularized;

  const long pts = std::max<long>(3, static_cast<long>(std::ceil((E_hi - E_lo) / opt.scan_step)) + 1);
  std::vector<double> E(pts), s(pts);
  parallel_for(static_cast<std::size_t>(pts), [&](std::size_t i) {
    E[i] = E_lo + (E_hi - E_lo) * static_cast<double>(i) / (pts - 1);
    s[i] = reduced_sigma_min(params, E[i], W, opt.N);
  });

  std::vector<ReducedSolution> out;
  for (long i = 1; i + 1 < pts; ++i) {
    if (!(s[i] < s[i - 1] && s[i] <= s[i + 1])) continue;
    const double Es = golden_section_minimize([&](double e) { return reduced_sigma_min(params, e, W, opt.N); },
                                              E[i - 1], E[i + 1], opt.refine_tol);
    Eigen::VectorXd v;
    const double smin = reduced_sigma_min(params, Es, W, opt.N, &v);
    if (!(smin < opt.accept)) continue;
    Eigen::Index imax = 0;
    const double peak = v.cwiseAbs().maxCoeff(&imax);
    const IVec& centre = sites[imax];
    double edge = 0.0;
    for (std::size_t j = 0; j < sites.size(); ++j) {
      long r = 0;
      for (long a : sites[j]) r = std::max(r, std::labs(a));
      if (r == W) edge = std::max(edge, std::fabs(v(static_cast<Eigen::Index>(j))));
    }
    if (edge > opt.edge_tol * peak) continue;
    if (!out.empty() && std::fabs(out.back().E - Es) < 1e-9) continue;
    ReducedSolution r;
    r.E = Es;
    r.sigma_min = smin;
    r.phi = SurfaceField(params.d(), W);
    r.phi.values = v.cast<Complex>();
    r.center = centre;
    r.edge_ratio = edge / peak;
    r.regularized_sites = regularized;
    out.push_back(std::move(r));
  }
  return out;
}

CoverSum cover_sum(const ContinuedFraction& cf, double beta, double rho_bar, double s, int k_max) {
  if (!(s > 0.0 && s <= 1.0)) throw InvalidArgument("cover exponent s must lie in (0, 1]");
  if (!(rho_bar > 0.0)) throw InvalidArgument("rho_bar must be positive");
  if (k_max < 1) throw InvalidArgument("k_max must be >= 1");
  const auto tm = tm_sequence(cf, 1.0, beta, 1);
  CoverSum cs;
  cs.s = s;
  cs.rho_bar = rho_bar;
  cs.expected_slope = -s * rho_bar / 2.0;
  for (std::size_t k = 0; k < tm.n_k.size() && static_cast<int>(k) < k_max; ++k) {
    const BigFloat q(tm.q_nk[k]);
    const BigFloat lp = (1 - BigFloat(s)) * log(q) + BigFloat(s) * log(BigFloat(2)) - BigFloat(s * rho_bar / 2) * q;
    cs.n_k.push_back(tm.n_k[k]);
    cs.q_nk.push_back(static_cast<double>(q));
    cs.log_per_k.push_back(static_cast<double>(lp));
  }
  cs.strictly_decreasing = cs.log_per_k.size() >= 2;
  for (std::size_t k = 1; k < cs.log_per_k.size(); ++k)
    cs.strictly_decreasing = cs.strictly_decreasing && cs.log_per_k[k] < cs.log_per_k[k - 1];
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < cs.q_nk.size(); ++k)
    if (std::isfinite(cs.q_nk[k]) && std::isfinite(cs.log_per_k[k])) {
      xs.push_back(cs.q_nk[k]);
      ys.push_back(cs.log_per_k[k]);
    }
  if (xs.size() >= 2) {
    const auto f = linear_fit(xs, ys);
    cs.fit_slope = f.slope;
    cs.fit_r2 = f.r2;
  }
  return cs;
}

MatchReport match_predictions(const std::vector<PredictedEigenvalue>& pred, const std::vector<EigenPair>& eig,
                              double tol) {
  MatchReport r;
  std::vector<bool> used(eig.size(), false);
  for (const auto& p : pred) {
    std::size_t best = eig.size();
    double bd = tol;
    for (std::size_t j = 0; j < eig.size(); ++j) {
      const double dd = std::fabs(eig[j].E - p.E);
      if (!used[j] && dd < bd) {
        bd = dd;
        best = j;
      }
    }
    if (best == eig.size()) {
      ++r.unmatched_predictions;
      continue;
    }
    used[best] = true;
    const auto& e = eig[best];
    r.rows.push_back({p.k, p.E, e.E, bd, e.decay.slope, e.surface_mass});
  }
  for (bool u : used)
    if (!u) ++r.unmatched_eigenvalues;
  std::sort(r.rows.begin(), r.rows.end(), [](const MatchRow& a, const MatchRow& b) { return a.E_predicted < b.E_predicted; });
  return r;
}

void write_eigen_report(const MatchReport& r, std::ostream& os) {
  os << "k,E_predicted,E_finite_volume,abs_error,decay_slope,surface_mass\n";
  char buf[256];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%ld,%.12e,%.12e,%.12e,%.12e,%.12e\n", row.k, row.E_predicted,
                  row.E_finite_volume, row.abs_error, row.decay_slope, row.surface_mass);
    os << buf;
  }
}

}  // namespace smm
