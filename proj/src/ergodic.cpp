#include "smm/ergodic.hpp"

#include <cmath>
#include <ostream>

#include "smm/errors.hpp"

namespace smm {

AnalyticObservable::AnalyticObservable(std::vector<Complex> coeffs, double rho)
    : coeffs_(std::move(coeffs)), rho_(rho) {
  if (coeffs_.size() % 2 != 1) throw InvalidArgument("observable needs coefficients for j = -J..J");
  if (!(rho >= 0.0)) throw InvalidArgument("strip width must be >= 0");
  J_ = static_cast<int>(coeffs_.size() / 2);
  C_ = 0.0;
  for (int j = -J_; j <= J_; ++j) C_ = std::max(C_, std::abs(coeff(j)) * std::exp(kTwoPi * rho_ * std::abs(j)));
}

AnalyticObservable AnalyticObservable::exp_modes(int J, double rate, double rho) {
  std::vector<Complex> c(2 * J + 1);
  for (int j = -J; j <= J; ++j) c[j + J] = std::exp(-rate * std::abs(j));
  return AnalyticObservable(std::move(c), rho);
}

AnalyticObservable AnalyticObservable::standard() { return exp_modes(40, kTwoPi, 1.0); }

AnalyticObservable AnalyticObservable::single_mode(int j, double rho) {
  const int J = std::abs(j);
  std::vector<Complex> c(2 * J + 1, Complex(0.0));
  c[j + J] = 1.0;
  return AnalyticObservable(std::move(c), rho);
}

AnalyticObservable AnalyticObservable::constant(Complex v) { return AnalyticObservable({v}, 1.0); }

Complex AnalyticObservable::operator()(Complex x) const {
  Complex s = 0.0;
  for (int j = -J_; j <= J_; ++j) s += coeff(j) * std::exp(Complex(0.0, kTwoPi * j) * x);
  return s;
}

namespace {

Complex unit(double t) { return std::polar(1.0, kTwoPi * t); }

// e^{2 pi i j x} for complex x
Complex mode(int j, Complex x) { return std::exp(Complex(0.0, kTwoPi * j) * x); }

}  // namespace

Complex birkhoff_direct(const AnalyticObservable& f, const ContinuedFraction& cf, Complex x, long N) {
  if (N < 1) throw InvalidArgument("Birkhoff sums need N >= 1");
  const BigFloat a = cf.alpha();
  const double hi = static_cast<double>(a);
  const double lo = static_cast<double>(a - BigFloat(hi));
  const int J = f.J();
  std::vector<Complex> base(2 * J + 1);
  for (int j = -J; j <= J; ++j) base[j + J] = f.coeff(j) * mode(j, x);
  CompensatedSum<double> re, im;
  for (long m = 0; m < N; ++m) {
    const double md = static_cast<double>(m);
    const double p = md * hi;
    const double e = std::fma(md, hi, -p);
    const double t = frac(frac(p) + (e + md * lo));
    const Complex z = unit(t);
    Complex zp = z, zn = std::conj(z);
    Complex s = 0.0;
    for (int j = 1; j <= J; ++j) {
      s += base[J + j] * zp + base[J - j] * zn;
      zp *= z;
      zn *= std::conj(z);
    }
    re.add(s.real());
    im.add(s.imag());
  }
  return {re.value(), im.value()};
}

BirkhoffDeviation birkhoff_deviation(const AnalyticObservable& f, const ContinuedFraction& cf, Complex x,
                                     const BigInt& N) {
  if (N < 1) throw InvalidArgument("Birkhoff sums need N >= 1");
  if (std::fabs(x.imag()) > f.rho() / 2 + 1e-15) throw InvalidArgument("x outside the strip |Im x| <= rho/2");
  BirkhoffDeviation out;
  Complex s = 0.0;
  for (int j = -f.J(); j <= f.J(); ++j) {
    if (j == 0 || f.coeff(j) == 0.0) continue;
    const Complex den = unit(cf.frac_times(BigInt(j))) - 1.0;
    if (std::abs(den) < 1e-14) out.small_divisor = true;
    const Complex num = unit(cf.frac_times(N * j)) - 1.0;
    s += f.coeff(j) * mode(j, x) * num / den;
  }
  out.formula = s;
  if (N <= kDirectLimit) {
    out.direct = birkhoff_direct(f, cf, x, static_cast<long>(N));
    out.has_direct = true;
    out.disagreement = std::abs(out.direct - out.formula) / std::max(1.0, std::abs(out.formula));
  }
  return out;
}

std::vector<BigInt> qn_sequence(const ContinuedFraction& cf, int max_n) {
  if (max_n > cf.depth()) throw InvalidArgument("sequence asks for q_n beyond the expansion depth");
  std::vector<BigInt> out;
  for (int n = 1; n <= max_n; ++n) out.push_back(cf.q[n]);
  return out;
}

namespace {

// sup over a grid of |D_N| with geometric-sum modes, for Im x in `ims`.
double sup_deviation(const AnalyticObservable& f, const ContinuedFraction& cf, const BigInt& N,
                     const std::vector<double>& ims, int x_points) {
  const int J = f.J();
  std::vector<Complex> g(2 * J + 1, Complex(0.0));
  for (int j = -J; j <= J; ++j) {
    if (j == 0 || f.coeff(j) == 0.0) continue;
    const Complex den = unit(cf.frac_times(BigInt(j))) - 1.0;
    g[j + J] = f.coeff(j) * (unit(cf.frac_times(N * j)) - 1.0) / den;
  }
  double sup = 0.0;
  for (double im : ims)
    for (int i = 0; i < x_points; ++i) {
      const Complex x(static_cast<double>(i) / x_points, im);
      Complex s = 0.0;
      for (int j = -J; j <= J; ++j) s += g[j + J] * mode(j, x);
      sup = std::max(sup, std::abs(s));
    }
  return sup;
}

}  // namespace

LeReport verify_lemma_le(const AnalyticObservable& f, const ContinuedFraction& cf, const std::vector<BigInt>& j_seq,
                         int x_points, double eps) {
  LeReport rep;
  if (j_seq.empty()) throw InvalidArgument("empty j_k sequence");
  rep.beta_estimate = cf.depth() >= 5 ? beta_estimate(cf).beta_estimate : 0.0;
  const double s = f.rho() / 2;
  rep.rows.resize(j_seq.size());
  parallel_for(j_seq.size(), [&](std::size_t k) {
    rep.rows[k] = {static_cast<long>(k + 1), j_seq[k], sup_deviation(f, cf, j_seq[k], {0.0}, x_points),
                   sup_deviation(f, cf, j_seq[k], {s, -s}, x_points)};
  });
  std::vector<double> ks, logs;
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const double sup = std::max(rep.rows[k].sup_real, rep.rows[k].sup_strip);
    if (k + 1 == rep.rows.size()) rep.tail_sup = sup;
    ks.push_back(static_cast<double>(k + 1));
    logs.push_back(std::log(std::max(sup, 1e-300)));
  }
  rep.trend = linear_fit(ks, logs).slope;
  rep.small_divisor_constant = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= f.J(); ++j) {
    rep.small_divisor_constant =
        std::min(rep.small_divisor_constant, cf.dist_times(BigInt(j)) * std::exp(f.rho() / 4 * j));
  }
  rep.pass = rep.tail_sup < eps && rep.trend < 0.0;
  return rep;
}

Le1Report verify_lemma_le1(const AnalyticObservable& f, const ContinuedFraction& cf, const TmSequence& tm,
                           int x_points, int m_samples) {
  Le1Report rep;
  const double s = tm.rho_bar / 2;
  const int J = f.J();
  std::vector<double> sup_modes(2 * J + 1, 0.0);
  for (std::size_t k = 0; k < tm.n_k.size(); ++k) {
    // m = 1, 2, 4, ... plus the last materialised term
    std::vector<long> ms;
    for (long m = 1; m <= tm.kept[k] && static_cast<int>(ms.size()) < m_samples; m *= 2) ms.push_back(m);
    if (tm.kept[k] > 0 && ms.back() != tm.kept[k]) ms.push_back(tm.kept[k]);
    double kmax = 0.0, gmax = 0.0;
    for (long m : ms) {
      const BigInt N = tm.term(k, m);
      Le1Row row{static_cast<long>(k), m, N, sup_deviation(f, cf, N, {0.0}, x_points),
                 sup_deviation(f, cf, N, {s, -s}, x_points), sup_deviation(f, cf, N + 1, {0.0, s, -s}, x_points)};
      kmax = std::max({kmax, row.sup_tm, row.sup_tm_strip});
      gmax = std::max(gmax, row.sup_generic);
      rep.rows.push_back(row);
    }
    // every materialised m enters the sup of the series terms through ||t alpha|| = m ||q alpha||
    for (int j = -J; j <= J; ++j) {
      if (j == 0) continue;
      const Complex den = unit(cf.frac_times(BigInt(j))) - 1.0;
      for (long m : ms) {
        const Complex num = unit(cf.frac_times(tm.term(k, m) * j)) - 1.0;
        sup_modes[j + J] = std::max(sup_modes[j + J], std::abs(f.coeff(j) * num / den) * std::exp(kPi * tm.rho_bar * std::abs(j)));
      }
    }
    rep.per_k_sup.push_back(kmax);
    rep.per_k_generic.push_back(gmax);
  }
  double acc = 0.0;
  for (int j = 1; j <= J; ++j) {
    acc += sup_modes[J + j] + sup_modes[J - j];
    rep.partial_sums.push_back(acc);
  }
  rep.tm_decreasing = true;
  for (std::size_t k = 1; k < rep.per_k_sup.size(); ++k) rep.tm_decreasing = rep.tm_decreasing && rep.per_k_sup[k] < rep.per_k_sup[k - 1];
  const double gfirst = rep.per_k_generic.front(), glast = rep.per_k_generic.back();
  rep.generic_not_decaying = glast > 0.1 * gfirst && glast > 10.0 * rep.per_k_sup.back();
  const double total = rep.partial_sums.empty() ? 0.0 : rep.partial_sums.back();
  const double half = rep.partial_sums.empty() ? 0.0 : rep.partial_sums[rep.partial_sums.size() / 2];
  rep.series_bounded = std::isfinite(total) && (total - half) <= 1e-6 * (1.0 + total);
  rep.pass = rep.tm_decreasing && rep.generic_not_decaying && rep.series_bounded;
  return rep;
}

void write_le_csv(const LeReport& r, std::ostream& os) {
  os << "k,N,sup_deviation,strip_sup_deviation\n";
  char buf[128];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, ",%.12e,%.12e\n", row.sup_real, row.sup_strip);
    os << row.k << "," << row.N << buf;
  }
}

nlohmann::json le_summary(const LeReport& r) {
  return {{"pass", r.pass},
          {"tail_sup", r.tail_sup},
          {"trend", r.trend},
          {"beta_estimate", r.beta_estimate},
          {"small_divisor_constant", r.small_divisor_constant}};
}

void write_le1_csv(const Le1Report& r, std::ostream& os) {
  os << "k,N,sup_deviation,strip_sup_deviation,generic_sup_deviation\n";
  char buf[160];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, ",%.12e,%.12e,%.12e\n", row.sup_tm, row.sup_tm_strip, row.sup_generic);
    os << row.k << "," << row.N << buf;
  }
}

}  // namespace smm
