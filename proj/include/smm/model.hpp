#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace smm {

enum class Geometry { FullSpace, HalfSpace };

using IVec = std::vector<long>;

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& s);

/// Parameters of H (full space) or H+ (half space). Immutable.
class ModelParams {
 public:
  ModelParams(double lambda, std::vector<double> alpha, double theta,
              Geometry geometry = Geometry::FullSpace);

  double lambda() const { return lambda_; }
  const std::vector<double>& alpha() const { return alpha_; }
  double theta() const { return theta_; }
  int d() const { return static_cast<int>(alpha_.size()); }
  Geometry geometry() const { return geometry_; }
  /// Edge of the free band [-c_d, c_d].
  double c_d() const { return 2.0 * (d() + 1); }

  /// alpha.n + theta reduced mod 1, accumulated in long double.
  double phase(const IVec& n) const;

  ModelParams with_lambda(double lambda) const;
  ModelParams with_theta(double theta) const;
  ModelParams with_geometry(Geometry g) const;

 private:
  double lambda_;
  std::vector<double> alpha_;
  double theta_;
  Geometry geometry_;
};

struct LatticeSite {
  IVec n;
  long x = 0;
  long norm() const;
};

struct PhaseConditionReport {
  long window_radius = 0;
  double min_distance = 0.5;
  IVec worst_site;
};

inline constexpr double kEpsTan = 1e-12;

/// tan pi(alpha.n + theta) without the coupling.
double tan_phase(const ModelParams& p, const IVec& n, double eps_tan = kEpsTan);

/// lambda * tan pi(alpha.n + theta). Throws PhaseSingularity near a pole.
double potential(const ModelParams& p, const IVec& n, double eps_tan = kEpsTan);

/// Exact minimum over the l1 ball |n|_1 <= radius of dist(alpha.n + theta, 1/2 + Z).
PhaseConditionReport check_theta_condition(const ModelParams& p, long radius);

/// theta -> theta + alpha.j mod 1.
ModelParams shift_phase(const ModelParams& p, const IVec& j);

/// All integer vectors of length d with max |n_i| <= radius, lexicographic order.
std::vector<IVec> cube_sites(int d, long radius);
/// All integer vectors of length d with sum |n_i| <= radius.
std::vector<IVec> l1_ball_sites(int d, long radius);

void to_json(nlohmann::json& j, const ModelParams& p);
ModelParams model_params_from_json(const nlohmann::json& j);

}  // namespace smm
