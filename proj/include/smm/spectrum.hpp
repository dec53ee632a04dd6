#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

#include "smm/diophantine.hpp"
#include "smm/model.hpp"
#include "smm/reduction.hpp"

namespace smm {

struct Site {
  IVec n;
  long x;
};

/// Truncation of H (or H+) to the box |n|_inf <= L, x in [-L, L] (or [0, L]), Dirichlet walls.
/// Rows are ordered layer by layer in x, so the surface x = 0 is one contiguous block.
struct FiniteVolumeOperator {
  ModelParams params;
  double coupling = 0.0;  // lambda actually used; 0 gives the free operator
  long L = 0;
  long x_min = 0;
  long x_max = 0;
  std::vector<IVec> layer_sites;  // cube_sites(d, L)
  Eigen::SparseMatrix<double> matrix;

  int d() const { return params.d(); }
  long layer_size() const { return static_cast<long>(layer_sites.size()); }
  long dim() const { return matrix.rows(); }
  long row(const IVec& n, long x) const;
  Site site(long row) const;
};

inline constexpr double kMaxSurfacePotential = 1e10;

/// `coupling` overrides lambda (0 for H_0 / H_0^+).
FiniteVolumeOperator build_finite(const ModelParams& params, long L, std::optional<double> coupling = std::nullopt);

/// "row col value" triplets of the upper triangle plus a JSON header.
void write_triplets(const FiniteVolumeOperator& op, std::ostream& os, nlohmann::json& header);

struct DecayFit {
  double slope_n = 0.0;
  double slope_x = 0.0;
  double slope = 0.0;
};

struct EigenPair {
  double E = 0.0;
  Eigen::VectorXd psi;  // unit norm, rows as in the operator
  IVec center_n;
  long center_x = 0;
  double surface_mass = 0.0;
  DecayFit decay;
};

inline constexpr double kBandMargin = 0.2;

/// Eigenpairs in the open window (lo, hi), which must avoid [-c_d - 0.2, c_d + 0.2].
/// Uses the surface Schur complement, whose eigenvalues decrease monotonically in the energy.
std::vector<EigenPair> eig_window(const FiniteVolumeOperator& op, double lo, double hi, double tol = 1e-12);

/// Dense symmetric eigensolver on the whole box; a cross-check for small boxes.
std::vector<EigenPair> eig_window_dense(const FiniteVolumeOperator& op, double lo, double hi);

/// All eigenvalues of the dense matrix (small boxes only).
Eigen::VectorXd all_eigenvalues(const FiniteVolumeOperator& op);

void analyse_eigenvector(const FiniteVolumeOperator& op, EigenPair& ep);

enum class Side { Below, Above };

struct PredictedEigenvalue {
  long k = 0;
  double E = 0.0;
  double quantization_residual = 0.0;
  Side side = Side::Above;
};

struct Prediction {
  std::vector<PredictedEigenvalue> values;  // sorted by E
  bool monotone = true;                      // false raises the NonMonotoneZeta flag
};

/// Roots of zeta_0(E) = theta + k alpha (mod 1) in (E_lo, E_hi) for k in [k_min, k_max]; d = 1.
Prediction predict_eigenvalues(double lambda, double alpha, double theta, long k_min, long k_max, double E_lo,
                               double E_hi, double tol = 1e-12, Geometry g = Geometry::FullSpace, int N = 2048,
                               int scan_points = 400);

struct DensityRow {
  long K;
  double min_distance;
  long best_k;
};

/// For each K, the distance from E_star to the nearest predicted eigenvalue with |k| <= K.
std::vector<DensityRow> spectral_density_scan(double lambda, double alpha, double theta, double E_star, long K_max,
                                              Geometry g = Geometry::FullSpace, double E_far = 60.0,
                                              int N = 2048);

struct ResolventReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  long pairs = 0;
  int tail_terms = 0;
};

/// Direct inverse of the box versus G_0 - G_0 T G_0 with T on the full surface window; W <= L/2.
ResolventReport resolvent_check(const ModelParams& params, long L, Complex z, long W, bool free_operator = false,
                                int N = 0);

struct ReducedSolution {
  double E = 0.0;
  double sigma_min = 0.0;
  SurfaceField phi;
  IVec center;
  double edge_ratio = 0.0;     // max |phi| on the window boundary over max |phi|
  long regularized_sites = 0;  // sites with v = 0, where the row reads phi_n = 0
};

struct ReduceOptions {
  double scan_step = 2e-3;
  double refine_tol = 1e-13;
  double accept = 1e-8;
  double edge_tol = 1e-6;  // hits still carrying mass at the window boundary are truncation artefacts
  int N = 2048;
};

/// Energies where diag(cos pi phi_n) + diag(sin pi phi_n) lambda Gamma_0(E) is singular on |n| <= W,
/// phi_n = alpha n + theta reduced to (-1/2, 1/2]; d = 1.
std::vector<ReducedSolution> reduced_equation_solve(const ModelParams& params, double E_lo, double E_hi, long W,
                                                    const ReduceOptions& opt = {});

/// Smallest singular value of the scaled reduced matrix, with its right singular vector.
double reduced_sigma_min(const ModelParams& params, double E, long W, int N, Eigen::VectorXd* phi = nullptr);

struct CoverSum {
  double s = 0.0;
  double rho_bar = 0.0;
  std::vector<int> n_k;
  std::vector<double> q_nk;       // as doubles (may be +inf)
  std::vector<double> log_per_k;  // ln of q (2 e^{-rho_bar q/2} / q)^s
  bool strictly_decreasing = false;
  double fit_slope = 0.0;          // d ln per_k / d q
  double fit_r2 = 0.0;
  double expected_slope = 0.0;     // -s rho_bar / 2
};

/// Cover s-sums over the indices n_k of the t_m construction available in `cf`, up to k_max of them.
CoverSum cover_sum(const ContinuedFraction& cf, double beta, double rho_bar, double s, int k_max = 6);

struct MatchRow {
  long k;
  double E_predicted;
  double E_finite_volume;
  double abs_error;
  double decay_slope;
  double surface_mass;
};

struct MatchReport {
  std::vector<MatchRow> rows;
  long unmatched_predictions = 0;
  long unmatched_eigenvalues = 0;
};

/// Nearest-neighbour pairing of predictions and eigenvalues; a pair counts when |dE| < tol both ways.
MatchReport match_predictions(const std::vector<PredictedEigenvalue>& pred, const std::vector<EigenPair>& eig,
                              double tol);

void write_eigen_report(const MatchReport& r, std::ostream& os);

}  // namespace smm
