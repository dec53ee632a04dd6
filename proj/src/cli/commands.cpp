#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "smm/diophantine.hpp"
#include "smm/ergodic.hpp"
#include "smm/errors.hpp"
#include "smm/green.hpp"
#include "smm/reduction.hpp"
#include "smm/spectrum.hpp"

namespace smm::cli {

namespace {

using nlohmann::json;

struct Opt {
  const char* flag;  // long flag without dashes, also the params key
  json def;
  const char* help;
};

const std::map<std::string, std::vector<Opt>>& option_table() {
  static const std::map<std::string, std::vector<Opt>> t = {
      {"green",
       {{"d", 1, "surface dimension"},
        {"z-re", 5.0, "Re z"},
        {"z-im", 0.0, "Im z"},
        {"grid", 0, "grid points per axis (0 = default)"},
        {"geometry", "full", "full or half"},
        {"radius", 10, "position kernel radius"}}},
      {"zeta0",
       {{"lambda", 1.0, "coupling"},
        {"e-min", 4.2, "lowest energy"},
        {"e-max", 12.0, "highest energy"},
        {"steps", 200, "energy samples"},
        {"geometry", "full", "full or half"},
        {"grid", 2048, "torus grid"}}},
      {"predict",
       {{"lambda", 1.0, "coupling"},
        {"alpha", "golden", "frequency descriptor"},
        {"theta", 0.0, "phase"},
        {"k", "-8:8", "label range a:b"},
        {"e-window", "4.2:9", "energy window lo:hi"},
        {"tol", 1e-12, "root tolerance"},
        {"geometry", "full", "full or half"},
        {"grid", 2048, "torus grid"},
        {"validate-L", 0, "box radius of the finite-volume oracle (0 = none)"},
        {"match-tol", 1e-2, "pairing tolerance"}}},
      {"fv",
       {{"lambda", 1.0, "coupling"},
        {"alpha", "golden", "frequency descriptor"},
        {"extra-alpha", "", "further components, ';'-separated descriptors"},
        {"theta", 0.0, "phase"},
        {"L", 20, "box radius"},
        {"window", "4.2:8", "eigenvalue window lo:hi"},
        {"geometry", "full", "full or half"},
        {"export", false, "also write the sparse triplets"}}},
      {"resolvent",
       {{"lambda", 1.0, "coupling"},
        {"alpha", "golden", "frequency descriptor"},
        {"theta", 0.0, "phase"},
        {"geometry", "full", "full or half"},
        {"L", 30, "box radius"},
        {"W", 10, "interior radius"},
        {"z-re", 5.0, "Re z"},
        {"z-im", -1.0, "Im z"},
        {"free", false, "compare the free operators"}}},
      {"cf",
       {{"alpha", "golden", "frequency descriptor"},
        {"depth", 20, "number of quotients"},
        {"budget-bits", kDefaultBudgetBits, "size cap for q_n"},
        {"best-approx-K", 0, "exhaustive best-approximation check up to K (0 = skip)"}}},
      {"ergodic",
       {{"alpha", "golden", "frequency descriptor"},
        {"modes", "exp:40", "exp:J[:rate] or single:j"},
        {"rho", 1.0, "analyticity width"},
        {"sequence", "qn", "qn, linear or tm"},
        {"max-n", 15, "last index of the sequence"},
        {"x-points", 64, "grid points in x"},
        {"eps", 1e-2, "tail threshold"},
        {"depth", 30, "continued fraction depth"}}},
      {"cover",
       {{"alpha", "beta:1.0", "frequency descriptor with beta > 0"},
        {"depth", 8, "continued fraction depth"},
        {"rho-bar", 1.0 / 30.0, "cover radius exponent"},
        {"s", "0.1,0.5,1", "Hausdorff exponents"},
        {"k-max", 6, "number of cover indices"}}},
      {"reduce",
       {{"lambda", 1.0, "coupling"},
        {"alpha", "golden", "frequency descriptor"},
        {"theta", 0.0, "phase"},
        {"e-window", "4.2:8", "energy window lo:hi"},
        {"W", 20, "surface window radius"},
        {"scan-step", 2e-3, "energy scan step"},
        {"grid", 2048, "torus grid"}}},
      {"transfer",
       {{"lambda", 1.0, "coupling"},
        {"alpha", "golden", "frequency descriptor"},
        {"theta", 0.0, "phase"},
        {"e-window", "4.2:8", "energy window lo:hi"},
        {"W", 20, "surface window radius"},
        {"X", 10, "depth of the lifted field"},
        {"grid", 2048, "torus grid"}}},
  };
  return t;
}

std::pair<double, double> parse_range(const std::string& s) {
  const auto c = s.find(':', 1);
  if (c == std::string::npos) throw InvalidArgument("expected lo:hi, got '" + s + "'");
  try {
    return {std::stod(s.substr(0, c)), std::stod(s.substr(c + 1))};
  } catch (const std::exception&) {
    throw InvalidArgument("expected lo:hi, got '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw InvalidArgument("bad number '" + cell + "'");
    }
  }
  return out;
}

Geometry geometry_of(const json& p) { return geometry_from_string(p.at("geometry").get<std::string>()); }

double alpha_value(const std::string& text, std::ostream& err) {
  const auto desc = AlphaDescriptor::parse(text);
  switch (desc.kind) {
    case AlphaDescriptor::Kind::Decimal:
      err << "warning: decimal alpha is rational; its expansion terminates\n";
      return static_cast<double>(desc.rational);
    case AlphaDescriptor::Kind::Double:
      return desc.value;
    case AlphaDescriptor::Kind::Beta:
      return cf_expand(desc, 8).value();
    default:
      return cf_expand(desc, 40).value();
  }
}

ModelParams model_of(const json& p, std::ostream& err) {
  std::vector<double> alpha{alpha_value(p.at("alpha").get<std::string>(), err)};
  if (p.contains("extra-alpha")) {
    std::stringstream ss(p.at("extra-alpha").get<std::string>());
    std::string part;
    while (std::getline(ss, part, ';'))
      if (!part.empty()) alpha.push_back(alpha_value(part, err));
  }
  const Geometry g = p.contains("geometry") ? geometry_of(p) : Geometry::FullSpace;
  return ModelParams(p.at("lambda").get<double>(), alpha, p.at("theta").get<double>(), g);
}

struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;  // suffix, contents
  json summary = json::object();
  bool table = false;  // first file is a CSV table honouring --format
};

Outputs cmd_green(const json& p, std::ostream&) {
  const int d = p.at("d").get<int>();
  if (d < 1) throw InvalidArgument("d must be >= 1");
  const Complex z(p.at("z-re").get<double>(), p.at("z-im").get<double>());
  const Geometry g = geometry_of(p);
  const double c = 2.0 * (d + 1);
  if (z.imag() == 0.0 && std::fabs(z.real()) <= c)
    throw BranchPoint("z lies in the free band [-c_d, c_d]; the fibers meet their branch points");
  int N = p.at("grid").get<int>();
  if (N <= 0) N = default_grid_size(d);
  const auto grid = gamma_grid(d, z, N, g);
  Outputs o;
  std::ostringstream sym;
  grid.write_csv(sym);
  o.files.push_back({".symbol.csv", sym.str()});

  const auto K = kernel_from_symbol(grid);
  std::ostringstream ker;
  for (int a = 0; a < d; ++a) ker << "n" << (a + 1) << ",";
  ker << "re,im\n";
  for (const auto& n : cube_sites(d, p.at("radius").get<long>())) {
    for (long v : n) ker << v << ",";
    const Complex k = K.at(n);
    ker << format_double(k.real()) << "," << format_double(k.imag()) << "\n";
  }
  o.files.push_back({".kernel.csv", ker.str()});
  const auto fit = kernel_decay_fit(K, std::min<long>(p.at("radius").get<long>(), N / 4));
  o.summary = {{"grid", N}, {"max_abs_symbol", grid.max_abs()}, {"decay_rate", -fit.slope}, {"decay_r2", fit.r2}};
  return o;
}

Outputs cmd_zeta0(const json& p, std::ostream&) {
  const auto c = zeta0_curve(p.at("e-min").get<double>(), p.at("e-max").get<double>(), p.at("steps").get<int>(),
                             p.at("lambda").get<double>(), geometry_of(p), p.at("grid").get<int>());
  Outputs o;
  o.table = true;
  std::ostringstream os;
  write_zeta0_csv(c, os);
  o.files.push_back({".csv", os.str()});
  o.summary = {{"monotone", c.monotone}};
  return o;
}

Outputs cmd_predict(const json& p, std::ostream& err) {
  const auto params = model_of(p, err);
  if (params.d() != 1) throw InvalidArgument("predict needs d = 1");
  const auto [k0, k1] = parse_range(p.at("k").get<std::string>());
  const auto [lo, hi] = parse_range(p.at("e-window").get<std::string>());
  const auto pred = predict_eigenvalues(params.lambda(), params.alpha()[0], params.theta(), std::lround(k0),
                                        std::lround(k1), lo, hi, p.at("tol").get<double>(), params.geometry(),
                                        p.at("grid").get<int>());
  Outputs o;
  o.table = true;
  o.summary = {{"predictions", pred.values.size()}, {"monotone", pred.monotone}};
  if (!pred.monotone) err << "warning: NonMonotoneZeta; all sign changes of the dense scan are reported\n";
  std::ostringstream os;
  const long L = p.at("validate-L").get<long>();
  if (L > 0) {
    const auto op = build_finite(params, L);
    const auto eig = eig_window(op, lo, hi);
    const auto m = match_predictions(pred.values, eig, p.at("match-tol").get<double>());
    write_eigen_report(m, os);
    o.summary["eigenvalues"] = eig.size();
    o.summary["matched"] = m.rows.size();
    o.summary["unmatched_predictions"] = m.unmatched_predictions;
    o.summary["unmatched_eigenvalues"] = m.unmatched_eigenvalues;
  } else {
    os << "k,E,quantization_residual,side\n";
    for (const auto& v : pred.values)
      os << v.k << "," << format_double(v.E) << "," << format_double(v.quantization_residual) << ","
         << (v.side == Side::Above ? "above" : "below") << "\n";
  }
  o.files.insert(o.files.begin(), {".csv", os.str()});
  return o;
}

Outputs cmd_fv(const json& p, std::ostream& err) {
  const auto params = model_of(p, err);
  const auto op = build_finite(params, p.at("L").get<long>());
  const auto [lo, hi] = parse_range(p.at("window").get<std::string>());
  const auto eig = eig_window(op, lo, hi);
  Outputs o;
  o.table = true;
  std::ostringstream os;
  os << "E,center_n,center_x,decay_slope_n,decay_slope_x,decay_slope,surface_mass\n";
  for (const auto& e : eig) {
    os << format_double(e.E) << ",";
    for (std::size_t a = 0; a < e.center_n.size(); ++a) os << (a ? ";" : "") << e.center_n[a];
    os << "," << e.center_x << "," << format_double(e.decay.slope_n) << "," << format_double(e.decay.slope_x)
       << "," << format_double(e.decay.slope) << "," << format_double(e.surface_mass) << "\n";
  }
  o.files.push_back({".csv", os.str()});
  if (p.at("export").get<bool>()) {
    std::ostringstream tr;
    json header;
    write_triplets(op, tr, header);
    o.files.push_back({".triplets.txt", tr.str()});
    o.files.push_back({".triplets.json", header.dump(2) + "\n"});
  }
  o.summary = {{"dim", op.dim()}, {"eigenvalues", eig.size()}};
  return o;
}

Outputs cmd_resolvent(const json& p, std::ostream& err) {
  const auto params = model_of(p, err);
  const Complex z(p.at("z-re").get<double>(), p.at("z-im").get<double>());
  const auto r = resolvent_check(params, p.at("L").get<long>(), z, p.at("W").get<long>(), p.at("free").get<bool>());
  Outputs o;
  o.summary = {{"max_rel_error", r.max_rel_error}, {"max_abs_error", r.max_abs_error}, {"pairs", r.pairs}};
  o.files.push_back({".json", o.summary.dump(2) + "\n"});
  return o;
}

Outputs cmd_cf(const json& p, std::ostream& err) {
  const auto desc = AlphaDescriptor::parse(p.at("alpha").get<std::string>());
  if (desc.kind == AlphaDescriptor::Kind::Decimal || desc.kind == AlphaDescriptor::Kind::Double)
    err << "warning: decimal alpha; the expansion is limited by its precision\n";
  const auto cf = cf_expand(desc, p.at("depth").get<int>(), p.at("budget-bits").get<long>());
  json j = cf;
  j["determinant_identity"] = determinant_identity_holds(cf);
  j["gdc2_sandwich"] = gdc2_sandwich_holds(cf);
  if (cf.depth() >= 5) {
    const auto b = beta_estimate(cf);
    j["beta_estimate"] = b.beta_estimate;
    j["beta_window"] = {b.n_from, b.n_to};
  }
  const long K = p.at("best-approx-K").get<long>();
  if (K > 0) j["best_approx_check"] = best_approx_check(cf, K);
  Outputs o;
  o.files.push_back({".json", j.dump(2) + "\n"});
  o.summary = {{"depth", cf.depth()}, {"determinant_identity", j["determinant_identity"]},
               {"gdc2_sandwich", j["gdc2_sandwich"]}};
  if (j.contains("beta_estimate")) o.summary["beta_estimate"] = j["beta_estimate"];
  return o;
}

AnalyticObservable observable_of(const json& p) {
  const auto spec = p.at("modes").get<std::string>();
  const double rho = p.at("rho").get<double>();
  const auto c1 = spec.find(':');
  if (c1 == std::string::npos) throw InvalidArgument("modes must be exp:J[:rate] or single:j");
  const std::string kind = spec.substr(0, c1);
  const std::string rest = spec.substr(c1 + 1);
  const auto c2 = rest.find(':');
  try {
    if (kind == "exp") {
      const int J = std::stoi(rest.substr(0, c2));
      const double rate = c2 == std::string::npos ? kTwoPi : std::stod(rest.substr(c2 + 1));
      return AnalyticObservable::exp_modes(J, rate, rho);
    }
    if (kind == "single") return AnalyticObservable::single_mode(std::stoi(rest), rho);
  } catch (const std::logic_error&) {
  }
  throw InvalidArgument("modes must be exp:J[:rate] or single:j");
}

Outputs cmd_ergodic(const json& p, std::ostream&) {
  const auto desc = AlphaDescriptor::parse(p.at("alpha").get<std::string>());
  const auto cf = cf_expand(desc, p.at("depth").get<int>());
  const auto f = observable_of(p);
  const auto seq = p.at("sequence").get<std::string>();
  const int max_n = p.at("max-n").get<int>();
  const int xp = p.at("x-points").get<int>();
  Outputs o;
  o.table = true;
  std::ostringstream os;
  if (seq == "tm") {
    if (desc.kind != AlphaDescriptor::Kind::Beta) throw InvalidArgument("sequence tm needs a beta descriptor");
    const auto tm = tm_sequence(cf, f.rho(), desc.beta);
    const auto r = verify_lemma_le1(f, cf, tm, xp);
    write_le1_csv(r, os);
    o.summary = {{"pass", r.pass},
                 {"tm_decreasing", r.tm_decreasing},
                 {"generic_not_decaying", r.generic_not_decaying},
                 {"series_bounded", r.series_bounded}};
  } else {
    std::vector<BigInt> j;
    if (seq == "qn") {
      j = qn_sequence(cf, max_n);
    } else if (seq == "linear") {
      for (int k = 1; k <= max_n; ++k) j.push_back(BigInt(k));
    } else {
      throw InvalidArgument("sequence must be qn, linear or tm");
    }
    const auto r = verify_lemma_le(f, cf, j, xp, p.at("eps").get<double>());
    write_le_csv(r, os);
    o.summary = le_summary(r);
  }
  o.files.push_back({".csv", os.str()});
  return o;
}

Outputs cmd_cover(const json& p, std::ostream&) {
  const auto desc = AlphaDescriptor::parse(p.at("alpha").get<std::string>());
  if (desc.kind != AlphaDescriptor::Kind::Beta || !(desc.beta > 0.0))
    throw InvalidArgument("cover needs a beta descriptor with beta > 0");
  const auto cf = cf_expand(desc, p.at("depth").get<int>());
  Outputs o;
  o.table = true;
  std::ostringstream os;
  os << "s,k,n_k,q_nk,log_per_k\n";
  json runs = json::array();
  for (double s : parse_list(p.at("s").get<std::string>())) {
    const auto c = cover_sum(cf, desc.beta, p.at("rho-bar").get<double>(), s, p.at("k-max").get<int>());
    for (std::size_t k = 0; k < c.n_k.size(); ++k)
      os << format_double(s) << "," << (k + 1) << "," << c.n_k[k] << "," << format_double(c.q_nk[k]) << ","
         << format_double(c.log_per_k[k]) << "\n";
    runs.push_back({{"s", s},
                    {"terms", c.n_k.size()},
                    {"strictly_decreasing", c.strictly_decreasing},
                    {"fit_slope", c.fit_slope},
                    {"expected_slope", c.expected_slope},
                    {"fit_r2", c.fit_r2}});
  }
  o.files.push_back({".csv", os.str()});
  o.summary = {{"runs", runs}};
  return o;
}

std::vector<ReducedSolution> reduce_of(const json& p, const ModelParams& params) {
  const auto [lo, hi] = parse_range(p.at("e-window").get<std::string>());
  ReduceOptions opt;
  if (p.contains("scan-step")) opt.scan_step = p.at("scan-step").get<double>();
  opt.N = p.at("grid").get<int>();
  return reduced_equation_solve(params, lo, hi, p.at("W").get<long>(), opt);
}

Outputs cmd_reduce(const json& p, std::ostream& err) {
  const auto params = model_of(p, err);
  const auto sols = reduce_of(p, params);
  Outputs o;
  o.table = true;
  std::ostringstream os;
  os << "E,sigma_min,center,regularized_sites\n";
  for (const auto& s : sols)
    os << format_double(s.E) << "," << format_double(s.sigma_min) << "," << s.center[0] << ","
       << format_double(s.edge_ratio) << "," << s.regularized_sites << "\n";
  o.files.push_back({".csv", os.str()});
  o.summary = {{"solutions", sols.size()}};
  return o;
}

Outputs cmd_transfer(const json& p, std::ostream& err) {
  const auto params = model_of(p, err);
  const auto sols = reduce_of(p, params);
  const long W = p.at("W").get<long>();
  const int N = p.at("grid").get<int>();
  Outputs o;
  o.table = true;
  std::ostringstream os;
  os << "E,eigen_residual,round_trip_error,clay_residual,trf3_residual,cayley_status\n";
  for (const auto& s : sols) {
    const auto psi = transfer_phi_to_psi(s.phi, s.E, params, W, p.at("X").get<long>(), N);
    const double res = eigen_residual(psi, s.E, params);
    const auto back = transfer_psi_to_phi(surface_of(psi), s.E, params, N);
    double trip = 0.0;
    const double scale = s.phi.values.cwiseAbs().maxCoeff();
    for (const auto& n : cube_sites(params.d(), W / 2)) trip = std::max(trip, std::abs(back.at(n) - s.phi.at(n)));
    const auto cay = cayley_check(s.phi, s.E, params, N);
    os << format_double(s.E) << "," << format_double(res) << "," << format_double(trip / scale) << ","
       << format_double(cay.clay_residual) << "," << format_double(cay.trf3_residual) << "," << cay.status << "\n";
  }
  o.files.push_back({".csv", os.str()});
  o.summary = {{"solutions", sols.size()}};
  return o;
}

Outputs dispatch(const RunConfig& cfg, std::ostream& err) {
  const auto& p = cfg.params;
  try {
    if (cfg.command == "green") return cmd_green(p, err);
    if (cfg.command == "zeta0") return cmd_zeta0(p, err);
    if (cfg.command == "predict") return cmd_predict(p, err);
    if (cfg.command == "fv") return cmd_fv(p, err);
    if (cfg.command == "resolvent") return cmd_resolvent(p, err);
    if (cfg.command == "cf") return cmd_cf(p, err);
    if (cfg.command == "ergodic") return cmd_ergodic(p, err);
    if (cfg.command == "cover") return cmd_cover(p, err);
    if (cfg.command == "reduce") return cmd_reduce(p, err);
    if (cfg.command == "transfer") return cmd_transfer(p, err);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad parameter: ") + e.what());
  }
  throw InvalidArgument("unknown command '" + cfg.command + "'");
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path.string());
  f << contents;
}

// fill defaults and coerce types to those of the defaults
json normalise(const std::string& command, const json& given) {
  json p = default_params(command);
  for (auto it = given.begin(); it != given.end(); ++it) {
    if (!p.contains(it.key())) throw InvalidArgument("unknown parameter '" + it.key() + "' for " + command);
    const json& def = p[it.key()];
    const json& v = it.value();
    const bool ok = (def.is_string() && v.is_string()) || (def.is_boolean() && v.is_boolean()) ||
                    (def.is_number_integer() && v.is_number_integer()) ||
                    (def.is_number_float() && v.is_number());
    if (!ok) throw InvalidArgument("parameter '" + it.key() + "' has the wrong type");
    p[it.key()] = def.is_number_float() ? json(v.get<double>()) : v;
  }
  return p;
}

}  // namespace

json default_params(const std::string& command) {
  const auto& t = option_table();
  const auto it = t.find(command);
  if (it == t.end()) throw InvalidArgument("unknown command '" + command + "'");
  json p = json::object();
  for (const auto& o : it->second) p[o.flag] = o.def;
  return p;
}

int execute(const RunConfig& cfg_in, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = cfg_in;
    cfg.params = normalise(cfg.command, cfg.params);
    Outputs o = dispatch(cfg, err);
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    json written = json::array();
    for (std::size_t i = 0; i < o.files.size(); ++i) {
      auto [suffix, contents] = o.files[i];
      if (i == 0 && o.table && cfg.format == "json") {
        contents = csv_to_json(contents).dump(2) + "\n";
        suffix = suffix.substr(0, suffix.size() - 4) + ".json";
      }
      const std::string name = output_name(cfg, suffix);
      write_file(dir / name, contents);
      written.push_back(name);
      out << (dir / name).string() << "\n";
    }
    const json manifest{{"config", to_json(cfg)}, {"hash", config_hash(cfg)}, {"outputs", written},
                        {"summary", o.summary}};
    const std::string mname = output_name(cfg, ".manifest.json");
    write_file(dir / mname, manifest.dump(2) + "\n");
    out << (dir / mname).string() << "\n";
    return 0;
  } catch (const InvalidArgument& e) {
    err << e.name() << ": " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << e.name() << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::Solver ? 4 : 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "IOError: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "InternalError: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Surface Maryland model laboratory"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand all help");

  std::string out_dir = ".", format = "csv", config_path;
  long seed = 0;
  bool dump = false;
  std::map<std::string, std::string> raw;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;

  static const std::map<std::string, std::string> about = {
      {"green", "free Green kernels and symbols, with the decay fit"},
      {"zeta0", "rotation number curve zeta0(E)"},
      {"predict", "eigenvalues from the quantization condition, optionally validated on a box"},
      {"fv", "finite-volume box eigenpairs"},
      {"resolvent", "resolvent identity check on a box"},
      {"cf", "continued fraction, convergents, beta estimate"},
      {"ergodic", "Birkhoff deviations and lemma checks"},
      {"cover", "cover sums for a Liouville frequency"},
      {"reduce", "solve the reduced surface equation"},
      {"transfer", "reduced solutions lifted to the bulk"},
  };
  for (const auto& [name, table] : option_table()) {
    auto* sub = app.add_subcommand(name, about.count(name) ? about.at(name) : "");
    subs[name] = sub;
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "seed recorded in the config");
    sub->add_option("--config", config_path, "run config JSON (flags given on the command line override it)");
    sub->add_flag("--dump-config", dump, "print the resolved config and exit");
    for (const auto& o : table) {
      const std::string key = o.flag;
      const std::string flag = "--" + key;
      if (o.def.is_boolean()) {
        opts[name][key] = sub->add_flag(flag, flags[name + "/" + key], o.help);
      } else {
        opts[name][key] = sub->add_option(flag, raw[name + "/" + key], o.help)->allow_extra_args(false);
      }
    }
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "UsageError: " << e.what() << "\n";
    return 3;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    RunConfig cfg;
    cfg.command = command;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw InvalidArgument("cannot read config " + config_path);
      json j;
      try {
        f >> j;
      } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config is not JSON: ") + e.what());
      }
      cfg = config_from_json(j);
      if (cfg.command != command) throw InvalidArgument("config is for '" + cfg.command + "', not '" + command + "'");
    }
    auto* sub = subs[command];
    if (sub->count("--out")) cfg.output_dir = out_dir;
    if (sub->count("--format")) cfg.format = format;
    if (sub->count("--seed")) cfg.seed = seed;

    json p = config_path.empty() ? json::object() : cfg.params;
    for (const auto& o : option_table().at(command)) {
      const std::string key = o.flag;
      if (opts[command][key]->count() == 0) continue;
      if (o.def.is_boolean()) {
        p[key] = flags[command + "/" + key];
        continue;
      }
      const std::string& v = raw[command + "/" + key];
      try {
        if (o.def.is_string()) p[key] = v;
        else if (o.def.is_number_integer()) {
          std::size_t used = 0;
          const long x = std::stol(v, &used);
          if (used != v.size()) throw std::invalid_argument(v);
          p[key] = x;
        } else {
          std::size_t used = 0;
          const double x = std::stod(v, &used);
          if (used != v.size()) throw std::invalid_argument(v);
          p[key] = x;
        }
      } catch (const std::logic_error&) {
        throw InvalidArgument("--" + key + " expects a number, got '" + v + "'");
      }
    }
    cfg.params = normalise(command, p);
    if (dump) {
      out << to_json(cfg).dump(2) << "\n";
      return 0;
    }
    return execute(cfg, out, err);
  } catch (const InvalidArgument& e) {
    err << e.name() << ": " << e.what() << "\n";
    return 3;
  }
}

}  // namespace smm::cli
