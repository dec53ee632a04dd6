#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "smm/green.hpp"
#include "smm/model.hpp"

namespace smm {

/// Complex values on the surface cube |n|_inf <= W, indexed like cube_sites(d, W).
struct SurfaceField {
  int d = 1;
  long W = 0;
  Eigen::VectorXcd values;

  SurfaceField() = default;
  SurfaceField(int d_, long W_);
  std::vector<IVec> sites() const { return cube_sites(d, W); }
  /// Row of site n, or -1 outside the cube.
  long index(const IVec& n) const;
  Complex at(const IVec& n) const;
};

/// Values on the slab |n|_inf <= Ln, x in [x_min, x_max].
struct LatticeField {
  int d = 1;
  long Ln = 0;
  long x_min = 0;
  long x_max = 0;
  std::vector<Complex> values;

  LatticeField(int d_, long Ln_, long x_min_, long x_max_);
  long index(const IVec& n, long x) const;
  Complex at(const IVec& n, long x) const;
  double max_abs() const;
};

class ReductionContext {
 public:
  /// N = 0 picks the default grid for d.
  ReductionContext(const ModelParams& params, Complex z, long W = 15, int N = 0);

  const ModelParams& params() const { return params_; }
  Complex z() const { return z_; }
  Complex delta() const { return delta_; }
  long W() const { return W_; }
  int N() const { return gamma_grid_.N(); }
  const SymbolGrid& gamma_grid() const { return gamma_grid_; }

 private:
  ModelParams params_;
  Complex z_;
  Complex delta_;
  long W_;
  SymbolGrid gamma_grid_;
};

struct TOperator {
  std::vector<IVec> sites;
  Eigen::MatrixXcd neumann;
  Eigen::MatrixXcd direct;
  int tail_terms = 0;
  double c_norm = 0.0;
};

/// Surface reduction operator on the window, by the Neumann series in (delta C U)
/// and independently by (lambda^-1 v^-1 + Gamma_0)^-1.
TOperator build_T(const ReductionContext& ctx, double tail_tol = 1e-10);

/// Only the direct inverse; valid wherever the truncated system is nonsingular.
Eigen::MatrixXcd build_T_direct(const ModelParams& params, Complex z, long W, int N = 0);

/// Gamma_0(n_i - n_j) on the window sites.
Eigen::MatrixXcd gamma0_matrix(const LatticeKernel& k, const std::vector<IVec>& sites);

void write_T(const TOperator& T, const ReductionContext& ctx, std::ostream& bin, nlohmann::json& sidecar);

Complex q_symbol(std::span<const double> y, double E, double lambda, Geometry g = Geometry::FullSpace);

struct ZetaBranch {
  double lambda = 0.0;
  double E = 0.0;
  int N = 0;
  std::vector<double> zeta_values;
  long winding = 0;
  double zeta0 = 0.0;
  double max_unimodular_defect = 0.0;
  bool experimental = false;
};

inline constexpr double kUnwrapLimit = 0.25;

/// Unwrapped argument function of q on the torus; d = 1 tracks one closed loop.
ZetaBranch zeta_branch(double E, double lambda, int N = 2048, Geometry g = Geometry::FullSpace, int d = 1);

/// Rotation number, the torus mean of zeta.
double zeta0(double E, double lambda, int N = 2048, Geometry g = Geometry::FullSpace, int d = 1);

struct Zeta0Row {
  double E;
  double zeta0;
  long winding;
};

struct Zeta0Curve {
  std::vector<Zeta0Row> rows;
  bool monotone = false;
};

Zeta0Curve zeta0_curve(double E_min, double E_max, int steps, double lambda,
                       Geometry g = Geometry::FullSpace, int N = 2048, int d = 1);
void write_zeta0_csv(const Zeta0Curve& c, std::ostream& os);

/// psi(n, x) = sum_eta G0(n - eta, x) phi_eta on |n|_inf <= Ln, |x| <= X (x in [0, X] for half space).
LatticeField transfer_phi_to_psi(const SurfaceField& phi, double E, const ModelParams& params, long Ln,
                                 long X, int N = 0);

/// phi_n = sum_eta Gamma_0^-1(n - eta) psi(eta, 0), returned on the same cube as psi_surface.
SurfaceField transfer_psi_to_phi(const SurfaceField& psi_surface, double E, const ModelParams& params,
                                 int N = 0);

/// Surface layer of a lattice field.
SurfaceField surface_of(const LatticeField& psi);

/// max |(H - E) psi| over sites away from the slab boundary, divided by max |psi|.
double eigen_residual(const LatticeField& psi, double E, const ModelParams& params, long margin = 1);

struct CayleyReport {
  std::string status;  // "ok", "zero vector"
  double clay_residual = 0.0;
  double trf3_residual = 0.0;
  long excluded_sites = 0;
  bool discrepancy = false;
};

/// The literal (1 + i v^-1)(1 - i v^-1)^-1 at site n; NaN where v vanishes.
Complex cayley_multiplier(const ModelParams& params, const IVec& n);

CayleyReport cayley_check(const SurfaceField& phi, double E, const ModelParams& params, int N = 0,
                          double tol = 1e-5);

}  // namespace smm
