#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "commands.hpp"
#include "smm/diophantine.hpp"
#include "smm/ergodic.hpp"
#include "smm/errors.hpp"
#include "smm/green.hpp"
#include "smm/reduction.hpp"
#include "smm/spectrum.hpp"

namespace py = pybind11;
using namespace smm;

namespace {

py::dict cf_dict(const ContinuedFraction& cf) {
  auto strs = [](const std::vector<BigInt>& v, std::size_t from) {
    py::list out;
    for (std::size_t i = from; i < v.size(); ++i) out.append(py::int_(py::str(v[i].str())));
    return out;
  };
  py::dict d;
  d["alpha_desc"] = cf.alpha_desc;
  d["a"] = strs(cf.a, 1);
  d["p"] = strs(cf.p, 0);
  d["q"] = strs(cf.q, 0);
  d["value"] = cf.value();
  return d;
}

Geometry geom(const std::string& g) { return geometry_from_string(g); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Surface Maryland model laboratory";

  static py::exception<Error> base(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, (e.name() + ": " + e.what()).c_str());
    } catch (const Error& e) {
      base((e.name() + ": " + e.what()).c_str());
    }
  });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double lambda, std::vector<double> alpha, double theta, const std::string& g) {
             return ModelParams(lambda, std::move(alpha), theta, geom(g));
           }),
           py::arg("lam"), py::arg("alpha"), py::arg("theta"), py::arg("geometry") = "full")
      .def_property_readonly("lam", &ModelParams::lambda)
      .def_property_readonly("alpha", &ModelParams::alpha)
      .def_property_readonly("theta", &ModelParams::theta)
      .def_property_readonly("d", &ModelParams::d)
      .def_property_readonly("c_d", &ModelParams::c_d)
      .def("phase", &ModelParams::phase)
      .def("potential", [](const ModelParams& p, const IVec& n) { return potential(p, n); });

  m.def("gamma0_hat", [](std::vector<double> y, Complex z) { return gamma0_hat(y, z); });
  m.def("gamma0_hat_plus", [](std::vector<double> y, Complex z) { return gamma0_hat_plus(y, z); });
  m.def("gamma0_position", [](const IVec& n, Complex z, int N, const std::string& g) {
    return gamma0_position(n, z, N, geom(g));
  }, py::arg("n"), py::arg("z"), py::arg("N") = 2048, py::arg("geometry") = "full");

  m.def("zeta0", [](double E, double lambda, int N, const std::string& g) { return zeta0(E, lambda, N, geom(g)); },
        py::arg("E"), py::arg("lam"), py::arg("N") = 2048, py::arg("geometry") = "full");

  m.def("predict_eigenvalues",
        [](double lambda, double alpha, double theta, long k0, long k1, double lo, double hi, double tol,
           const std::string& g) {
          py::list out;
          for (const auto& v : predict_eigenvalues(lambda, alpha, theta, k0, k1, lo, hi, tol, geom(g)).values) {
            py::dict d;
            d["k"] = v.k;
            d["E"] = v.E;
            d["residual"] = v.quantization_residual;
            out.append(d);
          }
          return out;
        },
        py::arg("lam"), py::arg("alpha"), py::arg("theta"), py::arg("k_min"), py::arg("k_max"), py::arg("E_lo"),
        py::arg("E_hi"), py::arg("tol") = 1e-12, py::arg("geometry") = "full");

  py::class_<FiniteVolumeOperator>(m, "FiniteVolumeOperator")
      .def_property_readonly("dim", &FiniteVolumeOperator::dim)
      .def_readonly("L", &FiniteVolumeOperator::L)
      .def("dense", [](const FiniteVolumeOperator& op) { return Eigen::MatrixXd(op.matrix); })
      .def("eigenvalues", &all_eigenvalues);

  m.def("build_finite",
        [](const ModelParams& p, long L, std::optional<double> coupling) { return build_finite(p, L, coupling); },
        py::arg("params"), py::arg("L"), py::arg("coupling") = py::none());

  m.def("eig_window",
        [](const FiniteVolumeOperator& op, double lo, double hi) {
          py::list out;
          for (const auto& e : eig_window(op, lo, hi)) {
            py::dict d;
            d["E"] = e.E;
            d["psi"] = e.psi;
            d["center_n"] = e.center_n;
            d["center_x"] = e.center_x;
            d["surface_mass"] = e.surface_mass;
            d["decay_slope"] = e.decay.slope;
            out.append(d);
          }
          return out;
        });

  m.def("resolvent_check",
        [](const ModelParams& p, long L, Complex z, long W, bool free_op) {
          const auto r = resolvent_check(p, L, z, W, free_op);
          return py::dict(py::arg("max_rel_error") = r.max_rel_error, py::arg("max_abs_error") = r.max_abs_error);
        },
        py::arg("params"), py::arg("L"), py::arg("z"), py::arg("W"), py::arg("free") = false);

  m.def("reduced_equation_solve",
        [](const ModelParams& p, double lo, double hi, long W) {
          py::list out;
          for (const auto& s : reduced_equation_solve(p, lo, hi, W)) {
            py::dict d;
            d["E"] = s.E;
            d["sigma_min"] = s.sigma_min;
            d["phi"] = Eigen::VectorXcd(s.phi.values);
            d["center"] = s.center;
            out.append(d);
          }
          return out;
        });

  m.def("cf_expand", [](const std::string& alpha, int depth) { return cf_dict(cf_expand(AlphaDescriptor::parse(alpha), depth)); },
        py::arg("alpha"), py::arg("depth"));
  m.def("beta_estimate", [](const std::string& alpha, int depth) {
    return beta_estimate(cf_expand(AlphaDescriptor::parse(alpha), depth)).beta_estimate;
  }, py::arg("alpha"), py::arg("depth"));
  m.def("determinant_identity_holds", [](const std::string& alpha, int depth) {
    return determinant_identity_holds(cf_expand(AlphaDescriptor::parse(alpha), depth));
  });

  m.def("cover_sum",
        [](const std::string& alpha, int depth, double rho_bar, double s) {
          const auto desc = AlphaDescriptor::parse(alpha);
          const auto c = cover_sum(cf_expand(desc, depth), desc.beta, rho_bar, s);
          return py::dict(py::arg("n_k") = c.n_k, py::arg("q_nk") = c.q_nk, py::arg("log_per_k") = c.log_per_k,
                          py::arg("strictly_decreasing") = c.strictly_decreasing);
        });

  m.def("lemma_le",
        [](const std::string& alpha, int depth, int max_n) {
          const auto cf = cf_expand(AlphaDescriptor::parse(alpha), depth);
          const auto r = verify_lemma_le(AnalyticObservable::standard(), cf, qn_sequence(cf, max_n));
          py::list sup;
          for (const auto& row : r.rows) sup.append(row.sup_real);
          return py::dict(py::arg("pass") = r.pass, py::arg("tail_sup") = r.tail_sup, py::arg("sup") = sup);
        },
        py::arg("alpha") = "golden", py::arg("depth") = 30, py::arg("max_n") = 15);

  m.def("spectral_density_scan",
        [](double lambda, double alpha, double theta, double E_star, long K) {
          std::vector<double> d;
          for (const auto& r : spectral_density_scan(lambda, alpha, theta, E_star, K)) d.push_back(r.min_distance);
          return d;
        });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
