#include "smm/model.hpp"

#include <cmath>
#include <cstdlib>

#include "smm/errors.hpp"
#include "smm/numerics.hpp"

namespace smm {

std::string to_string(Geometry g) { return g == Geometry::FullSpace ? "full" : "half"; }

Geometry geometry_from_string(const std::string& s) {
  if (s == "full") return Geometry::FullSpace;
  if (s == "half") return Geometry::HalfSpace;
  throw InvalidArgument("geometry must be \"full\" or \"half\", got \"" + s + "\"");
}

namespace {
double reduce_unit(double a) {
  if (!std::isfinite(a)) throw InvalidArgument("non-finite frequency or phase");
  return frac(a);
}
}  // namespace

ModelParams::ModelParams(double lambda, std::vector<double> alpha, double theta, Geometry geometry)
    : lambda_(lambda), alpha_(std::move(alpha)), theta_(reduce_unit(theta)), geometry_(geometry) {
  if (lambda_ == 0.0 || !std::isfinite(lambda_)) throw InvalidArgument("lambda must be nonzero");
  if (alpha_.empty()) throw InvalidArgument("surface dimension d must be >= 1");
  for (auto& a : alpha_) a = reduce_unit(a);
}

double ModelParams::phase(const IVec& n) const {
  if (n.size() != alpha_.size()) throw InvalidArgument("site dimension does not match d");
  long double acc = theta_;
  for (std::size_t i = 0; i < n.size(); ++i) {
    long double t = static_cast<long double>(alpha_[i]) * static_cast<long double>(n[i]);
    t -= std::floor(t);
    acc += t;
  }
  acc -= std::floor(acc);
  double out = static_cast<double>(acc);
  return out >= 1.0 ? 0.0 : out;
}

ModelParams ModelParams::with_lambda(double lambda) const {
  return ModelParams(lambda, alpha_, theta_, geometry_);
}
ModelParams ModelParams::with_theta(double theta) const {
  return ModelParams(lambda_, alpha_, theta, geometry_);
}
ModelParams ModelParams::with_geometry(Geometry g) const {
  return ModelParams(lambda_, alpha_, theta_, g);
}

long LatticeSite::norm() const {
  long s = std::labs(x);
  for (long v : n) s += std::labs(v);
  return s;
}

double tan_phase(const ModelParams& p, const IVec& n, double eps_tan) {
  const double ph = p.phase(n);
  if (std::fabs(ph - 0.5) <= eps_tan) {
    throw PhaseSingularity("alpha.n + theta is 1/2 mod 1 at a surface site");
  }
  // Reduce to (-1/2, 1/2] so the argument of tan stays small.
  const double r = ph > 0.5 ? ph - 1.0 : ph;
  return std::tan(kPi * r);
}

double potential(const ModelParams& p, const IVec& n, double eps_tan) {
  return p.lambda() * tan_phase(p, n, eps_tan);
}

std::vector<IVec> cube_sites(int d, long radius) {
  std::vector<IVec> out;
  IVec cur(d, -radius);
  if (radius < 0) return out;
  while (true) {
    out.push_back(cur);
    int i = d - 1;
    while (i >= 0 && cur[i] == radius) {
      cur[i] = -radius;
      --i;
    }
    if (i < 0) break;
    ++cur[i];
  }
  return out;
}

std::vector<IVec> l1_ball_sites(int d, long radius) {
  std::vector<IVec> out;
  for (auto& n : cube_sites(d, radius)) {
    long s = 0;
    for (long v : n) s += std::labs(v);
    if (s <= radius) out.push_back(std::move(n));
  }
  return out;
}

PhaseConditionReport check_theta_condition(const ModelParams& p, long radius) {
  if (radius < 0) throw InvalidArgument("radius must be >= 0");
  PhaseConditionReport rep;
  rep.window_radius = radius;
  rep.min_distance = 0.5;
  rep.worst_site = IVec(p.d(), 0);
  bool first = true;
  for (const auto& n : l1_ball_sites(p.d(), radius)) {
    const double dist = std::fabs(p.phase(n) - 0.5);
    if (first || dist < rep.min_distance) {
      rep.min_distance = dist;
      rep.worst_site = n;
      first = false;
    }
  }
  return rep;
}

ModelParams shift_phase(const ModelParams& p, const IVec& j) {
  return p.with_theta(p.phase(j));
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"lambda", p.lambda()},
                     {"alpha", p.alpha()},
                     {"theta", p.theta()},
                     {"d", p.d()},
                     {"geometry", to_string(p.geometry())}};
}

ModelParams model_params_from_json(const nlohmann::json& j) {
  try {
    auto alpha = j.at("alpha").get<std::vector<double>>();
    if (j.contains("d") && j.at("d").get<int>() != static_cast<int>(alpha.size())) {
      throw InvalidArgument("\"d\" does not match the length of \"alpha\"");
    }
    Geometry g = j.contains("geometry") ? geometry_from_string(j.at("geometry").get<std::string>())
                                        : Geometry::FullSpace;
    return ModelParams(j.at("lambda").get<double>(), std::move(alpha), j.at("theta").get<double>(), g);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed model parameters: ") + e.what());
  }
}

}  // namespace smm
