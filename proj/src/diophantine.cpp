#include "smm/diophantine.hpp"

#include <mpfr.h>

#include <cmath>
#include <limits>
#include <regex>
#include <sstream>

#include "smm/errors.hpp"
#include "smm/model.hpp"
#include "smm/numerics.hpp"

namespace smm {

namespace mp = boost::multiprecision;

namespace {

constexpr double kLn2 = 0.69314718055994530942;

long bit_length(const BigInt& v) { return v == 0 ? 0 : static_cast<long>(mp::msb(mp::abs(v))) + 1; }

BigInt floor_div(const BigInt& a, const BigInt& b) {
  // b > 0
  BigInt qt = a / b;
  if ((a % b != 0) && (a < 0)) qt -= 1;
  return qt;
}

// floor(e^{beta q} / q) computed with enough bits for an exact integer part.
BigInt beta_quotient(double beta, const BigInt& q, long budget_bits) {
  const double qd = static_cast<double>(q);
  const double x = beta * qd;
  if (!(x / kLn2 <= static_cast<double>(budget_bits))) {
    throw OverflowBudget("next partial quotient needs about " + std::to_string(x / kLn2) +
                         " bits, over the integer budget");
  }
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(x / kLn2) + bit_length(q) + 96;
  mpfr_t v;
  mpfr_init2(v, prec);
  mpfr_set_z(v, q.backend().data(), MPFR_RNDN);
  mpfr_mul_d(v, v, beta, MPFR_RNDN);
  mpfr_exp(v, v, MPFR_RNDN);
  mpfr_div_z(v, v, q.backend().data(), MPFR_RNDN);
  BigInt out;
  mpfr_get_z(out.backend().data(), v, MPFR_RNDD);
  mpfr_clear(v);
  return out < 1 ? BigInt(1) : out;
}

// e^{beta q} / q as a float, or +inf when outside the exponent range.
BigFloat beta_quotient_float(double beta, const BigInt& q) {
  const double x = beta * static_cast<double>(q);
  if (!(x / kLn2 < 1e8)) return std::numeric_limits<BigFloat>::infinity();
  BigFloat v = exp(BigFloat(q) * beta) / BigFloat(q);
  return v < 1 ? BigFloat(1) : floor(v);
}

BigInt isqrt(const BigInt& v) { return mp::sqrt(v); }

BigRational parse_decimal(const std::string& text) {
  static const std::regex re(R"(^([0-9]*)(?:\.([0-9]*))?$)");
  std::smatch m;
  if (!std::regex_match(text, m, re) || (m[1].str().empty() && m[2].str().empty())) {
    throw InvalidArgument("not a decimal frequency: \"" + text + "\"");
  }
  const std::string ip = m[1].str().empty() ? "0" : m[1].str();
  const std::string fp = m[2].str();
  // mpz reads a leading 0 as octal
  std::string digits = ip + fp;
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  BigInt num(digits);
  BigInt den = mp::pow(BigInt(10), static_cast<unsigned>(fp.size()));
  return BigRational(num, den);
}

// Successive partial quotients of a descriptor.
class QuotientStream {
 public:
  QuotientStream(const AlphaDescriptor& d, long budget_bits) : d_(d), budget_(budget_bits) {
    using K = AlphaDescriptor::Kind;
    switch (d.kind) {
      case K::Quadratic: {
        D_ = d.D;
        sqrtD_ = isqrt(D_);
        if (d.Q <= 0 || D_ <= 0 || sqrtD_ * sqrtD_ == D_) throw InvalidArgument("quadratic descriptor needs Q > 0, D > 0 non-square");
        if ((D_ - BigInt(d.P) * d.P) % d.Q != 0) throw InvalidArgument("quadratic descriptor needs Q | D - P^2");
        if (floor_div(BigInt(d.P) + sqrtD_, BigInt(d.Q)) != 0 || BigInt(d.P) + sqrtD_ < 0) {
          throw InvalidArgument("quadratic descriptor must lie in (0, 1)");
        }
        // 1/alpha = (-P + sqrt D) / ((D - P^2) / Q)
        P_ = -BigInt(d.P);
        Q_ = (D_ - BigInt(d.P) * d.P) / d.Q;
        break;
      }
      case K::Decimal:
        lo_ = d.rational - BigRational(floor_div(mp::numerator(d.rational), mp::denominator(d.rational)));
        if (lo_ == 0) terminal_ = true;
        break;
      case K::Double: {
        const double x = d.value - std::floor(d.value);
        const double ulp = std::nextafter(x, 2.0) - x;
        lo_ = BigRational(x - ulp);
        hi_ = BigRational(x + ulp);
        if (x - ulp <= 0.0) throw PrecisionExhausted("double frequency too close to 0");
        break;
      }
      case K::Quotients:
        if (d.quotients.empty()) throw InvalidArgument("empty quotient list");
        for (const auto& a : d.quotients)
          if (a < 1) throw InvalidArgument("partial quotients must be positive");
        break;
      case K::Beta:
        if (!(d.beta > 0.0)) throw InvalidArgument("beta must be positive");
        break;
    }
  }

  bool terminal() const { return terminal_; }

  // Next quotient given the current denominator q_n (used only by the beta rule).
  BigInt next(const BigInt& qn) {
    using K = AlphaDescriptor::Kind;
    ++index_;
    switch (d_.kind) {
      case K::Quadratic: {
        BigInt a = floor_div(P_ + sqrtD_, Q_);
        P_ = a * Q_ - P_;
        Q_ = (D_ - P_ * P_) / Q_;
        return a;
      }
      case K::Quotients: {
        const auto n = static_cast<std::size_t>(index_ - 1);
        if (n < d_.quotients.size()) {
          if (!d_.periodic && n + 1 == d_.quotients.size()) terminal_ = true;
          return d_.quotients[n];
        }
        if (!d_.periodic) throw RationalTermination("explicit quotient list ends: the frequency is rational");
        return d_.quotients.back();
      }
      case K::Beta: {
        const auto n = static_cast<std::size_t>(index_ - 1);
        if (n < d_.seed.size()) return BigInt(d_.seed[n]);
        return beta_quotient(d_.beta, qn, budget_);
      }
      case K::Decimal: {
        if (terminal_) throw RationalTermination("decimal frequency is rational; expansion terminated");
        const BigRational inv = 1 / lo_;
        BigInt a = floor_div(mp::numerator(inv), mp::denominator(inv));
        lo_ = inv - BigRational(a);
        if (lo_ == 0) terminal_ = true;
        return a;
      }
      case K::Double: {
        if (lo_ == 0 || hi_ == 0) throw PrecisionExhausted("double frequency cannot certify further quotients");
        const BigRational il = 1 / lo_, ih = 1 / hi_;
        BigInt al = floor_div(mp::numerator(il), mp::denominator(il));
        BigInt ah = floor_div(mp::numerator(ih), mp::denominator(ih));
        if (al != ah) throw PrecisionExhausted("double frequency cannot certify further quotients");
        // the map x -> 1/x - a reverses order
        BigRational nl = ih - BigRational(ah), nh = il - BigRational(al);
        lo_ = nl;
        hi_ = nh;
        return al;
      }
    }
    throw InvalidArgument("unknown descriptor kind");
  }

  // Float value of the next quotient when it is known; empty optional semantics via NaN.
  BigFloat peek_float(const BigInt& qn) const {
    using K = AlphaDescriptor::Kind;
    if (terminal_) return std::numeric_limits<BigFloat>::infinity();
    if (d_.kind == K::Beta && static_cast<std::size_t>(index_) >= d_.seed.size()) return beta_quotient_float(d_.beta, qn);
    QuotientStream copy = *this;
    try {
      return BigFloat(copy.next(qn));
    } catch (const Error&) {
      return std::numeric_limits<BigFloat>::quiet_NaN();
    }
  }

 private:
  AlphaDescriptor d_;
  long budget_;
  long index_ = 0;
  bool terminal_ = false;
  BigInt P_, Q_, D_, sqrtD_;
  BigRational lo_, hi_;
};

// [a_0; a_1, ...] with an unknown tail treated as a_last.
BigFloat eval_tail(const std::vector<BigFloat>& a) {
  BigFloat x = a.back();
  for (std::size_t i = a.size() - 1; i-- > 0;) x = a[i] + 1 / x;
  return x;
}

}  // namespace

AlphaDescriptor AlphaDescriptor::golden() { return quadratic(-1, 5, 2); }
AlphaDescriptor AlphaDescriptor::silver() { return quadratic(-1, 2, 1); }

AlphaDescriptor AlphaDescriptor::quadratic(long P, long D, long Q) {
  AlphaDescriptor d;
  d.kind = Kind::Quadratic;
  d.P = P;
  d.D = D;
  d.Q = Q;
  return d;
}

AlphaDescriptor AlphaDescriptor::from_quotients(std::vector<BigInt> a, bool periodic) {
  AlphaDescriptor d;
  d.kind = Kind::Quotients;
  d.quotients = std::move(a);
  d.periodic = periodic;
  return d;
}

AlphaDescriptor AlphaDescriptor::decimal(const std::string& text) {
  AlphaDescriptor d;
  d.kind = Kind::Decimal;
  d.rational = parse_decimal(text);
  d.value = static_cast<double>(d.rational);
  return d;
}

AlphaDescriptor AlphaDescriptor::from_double(double x) {
  AlphaDescriptor d;
  d.kind = Kind::Double;
  d.value = x;
  return d;
}

AlphaDescriptor alpha_with_beta(double beta, std::vector<long> seed, bool pad) {
  if (!(beta > 0.0)) throw InvalidArgument("alpha_with_beta needs beta > 0");
  AlphaDescriptor d;
  d.kind = AlphaDescriptor::Kind::Beta;
  d.beta = beta;
  d.seed = seed.empty() ? std::vector<long>{1} : std::move(seed);
  d.pad_seed = pad;
  return d;
}

AlphaDescriptor AlphaDescriptor::parse(const std::string& text) {
  if (text == "golden") return golden();
  if (text == "silver") return silver();
  auto split_longs = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
  };
  try {
    if (text.rfind("quotients:", 0) == 0) {
      auto items = split_longs(text.substr(10));
      bool periodic = false;
      if (!items.empty() && (items.back() == "..." || items.back() == "…")) {
        periodic = true;
        items.pop_back();
      }
      std::vector<BigInt> a;
      for (auto it : items) {
        if (it.empty() || it.find_first_not_of("0123456789") != std::string::npos)
          throw InvalidArgument("partial quotient \"" + it + "\" is not a positive decimal integer");
        it.erase(0, std::min(it.find_first_not_of('0'), it.size() - 1));
        a.emplace_back(it);
      }
      return from_quotients(std::move(a), periodic);
    }
    if (text.rfind("quadratic:", 0) == 0) {
      auto items = split_longs(text.substr(10));
      if (items.size() != 3) throw InvalidArgument("quadratic descriptor is quadratic:P,D,Q");
      return quadratic(std::stol(items[0]), std::stol(items[1]), std::stol(items[2]));
    }
    if (text.rfind("beta:", 0) == 0) {
      const std::string rest = text.substr(5);
      const auto colon = rest.find(':');
      const double beta = std::stod(rest.substr(0, colon));
      if (colon == std::string::npos) return alpha_with_beta(beta);
      const std::string opt = rest.substr(colon + 1);
      if (opt.rfind("seed=", 0) != 0) throw InvalidArgument("beta descriptor option must be seed=...");
      std::vector<long> seed;
      for (const auto& it : split_longs(opt.substr(5))) seed.push_back(std::stol(it));
      return alpha_with_beta(beta, seed, false);
    }
  } catch (const std::logic_error&) {
    throw InvalidArgument("malformed frequency descriptor \"" + text + "\"");
  }
  return decimal(text);
}

std::string AlphaDescriptor::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Quadratic:
      if (P == -1 && D == 5 && Q == 2) return "golden";
      if (P == -1 && D == 2 && Q == 1) return "silver";
      os << "quadratic:" << P << "," << D << "," << Q;
      break;
    case Kind::Quotients:
      os << "quotients:";
      for (std::size_t i = 0; i < quotients.size(); ++i) os << (i ? "," : "") << quotients[i];
      if (periodic) os << ",...";
      break;
    case Kind::Beta: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", beta);
      os << "beta:" << buf;
      if (!pad_seed) {
        os << ":seed=";
        for (std::size_t i = 0; i < seed.size(); ++i) os << (i ? "," : "") << seed[i];
      }
      break;
    }
    case Kind::Decimal:
      os << rational;
      break;
    case Kind::Double: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", value);
      os << buf;
      break;
    }
  }
  return os.str();
}

int beta_padding(double beta, const std::vector<long>& seed, int depth, long budget_bits) {
  const long double budget = static_cast<long double>(budget_bits) * kLn2;  // in nats
  for (int m = 0; m <= depth; ++m) {
    std::vector<long> prefix(m, 1);
    prefix.insert(prefix.end(), seed.begin(), seed.end());
    // q as long double while it fits, log q once it no longer does
    long double qm1 = 0.0L, q = 1.0L;
    bool q_huge = false;
    bool ok = true;
    for (int n = 1; n <= depth && ok; ++n) {
      if (q_huge) {
        ok = false;
        break;
      }
      long double next;
      if (static_cast<std::size_t>(n - 1) < prefix.size()) {
        next = prefix[n - 1] * q + qm1;
      } else {
        const long double x = static_cast<long double>(beta) * q;
        if (!(x <= budget)) {
          ok = false;
          break;
        }
        if (x > 11000.0L) {
          // q_{n} ~ e^x: representable in the budget but not as a long double
          q_huge = n < depth;
          next = 0.0L;
          if (n == depth) break;
          continue;
        }
        const long double a = std::max(1.0L, std::floor(std::exp(x) / q));
        next = a * q + qm1;
      }
      if (!(std::log(next) <= budget) || !std::isfinite(next)) {
        ok = false;
        break;
      }
      qm1 = q;
      q = next;
    }
    if (ok) return m;
  }
  return depth;
}

ContinuedFraction cf_expand(const AlphaDescriptor& desc_in, int depth, long budget_bits) {
  if (depth < 1) throw InvalidArgument("depth must be >= 1");
  AlphaDescriptor desc = desc_in;
  if (desc.kind == AlphaDescriptor::Kind::Beta && desc.pad_seed) {
    const int m = beta_padding(desc.beta, desc.seed, depth, budget_bits);
    std::vector<long> seed(m, 1);
    seed.insert(seed.end(), desc.seed.begin(), desc.seed.end());
    desc.seed = std::move(seed);
    desc.pad_seed = false;
  }
  ContinuedFraction cf;
  cf.alpha_desc = desc.to_string();
  QuotientStream qs(desc, budget_bits);
  cf.a.assign(1, BigInt(0));
  cf.p.assign(1, BigInt(0));
  cf.q.assign(1, BigInt(1));
  BigInt pm1 = 1, qm1 = 0;
  for (int n = 1; n <= depth; ++n) {
    if (qs.terminal()) throw RationalTermination("frequency is rational; expansion terminated at depth " + std::to_string(n - 1));
    BigInt a = qs.next(cf.q.back());
    BigInt pn = a * cf.p.back() + pm1;
    BigInt qn = a * cf.q.back() + qm1;
    if (bit_length(qn) > budget_bits) throw OverflowBudget("q_n exceeds the integer budget");
    pm1 = cf.p.back();
    qm1 = cf.q.back();
    cf.a.push_back(std::move(a));
    cf.p.push_back(std::move(pn));
    cf.q.push_back(std::move(qn));
  }

  // Look-ahead quotients where they are cheap to obtain; enough of them fix Delta to full precision.
  {
    QuotientStream ahead = qs;
    BigInt q_prev = qm1, q_cur = cf.q.back();
    for (int extra = 0; extra < 64; ++extra) {
      BigFloat a1 = ahead.peek_float(q_cur);
      if (boost::math::isnan(a1)) break;
      cf.lookahead.push_back(a1);
      if (!boost::math::isfinite(a1) || desc.kind == AlphaDescriptor::Kind::Beta) break;
      try {
        ahead.next(q_cur);
      } catch (const Error&) {
        break;
      }
      BigInt q_next = static_cast<BigInt>(a1) * q_cur + q_prev;
      q_prev = q_cur;
      q_cur = q_next;
    }
  }
  if (!cf.lookahead.empty() && boost::math::isfinite(cf.lookahead[0])) {
    cf.log_q_next = static_cast<double>(log(cf.lookahead[0] * BigFloat(cf.q.back()) + BigFloat(qm1)));
  } else if (desc.kind == AlphaDescriptor::Kind::Beta) {
    const double qd = static_cast<double>(cf.q.back());
    cf.log_q_next = desc.beta * qd;  // ln(e^{beta q}/q * q) to leading order
  } else {
    cf.log_q_next = std::numeric_limits<double>::infinity();
  }

  // Delta_n = 1 / (q_{n+1} + q_n t), t = 1 / [a_{n+2}; a_{n+3}, ...]
  std::vector<BigFloat> tail;
  for (int n = 1; n <= depth; ++n) tail.emplace_back(cf.a[n]);
  for (const auto& v : cf.lookahead) tail.push_back(v);
  cf.delta.resize(depth);
  for (int n = 0; n < depth; ++n) {
    BigFloat t;
    const std::size_t start = static_cast<std::size_t>(n + 1);  // index of a_{n+2} in tail
    if (start < tail.size()) {
      std::vector<BigFloat> rest(tail.begin() + static_cast<long>(start), tail.end());
      t = boost::math::isinf(rest.front()) ? BigFloat(0) : 1 / eval_tail(rest);
    } else if (qs.terminal()) {
      t = 0;
    } else {
      t = 0.5;  // tail unknown; Delta lies in the GDC2 sandwich regardless
    }
    cf.delta[n] = 1 / (BigFloat(cf.q[n + 1]) + BigFloat(cf.q[n]) * t);
  }
  return cf;
}

BigFloat ContinuedFraction::alpha() const {
  const int K = depth() - 1;
  const BigFloat sign = (K % 2 == 0) ? 1 : -1;
  return (BigFloat(p[K]) + sign * delta[K]) / BigFloat(q[K]);
}

namespace {

// N alpha - round(N alpha): the nearest-integer residue is exact, so small distances keep full
// relative precision even when q_K has far more digits than BigFloat.
BigFloat signed_offset(const ContinuedFraction& cf, const BigInt& N) {
  const int K = cf.depth() - 1;
  const BigInt& qK = cf.q[K];
  BigInt r = (N * cf.p[K]) % qK;
  if (r < 0) r += qK;
  if (2 * r > qK) r -= qK;
  const BigFloat sign = (K % 2 == 0) ? 1 : -1;
  return BigFloat(r) / BigFloat(qK) + sign * BigFloat(N) * cf.delta[K] / BigFloat(qK);
}

}  // namespace

BigFloat ContinuedFraction::frac_times_big(const BigInt& N) const {
  BigFloat s = signed_offset(*this, N);
  s -= floor(s);
  return s;
}

double ContinuedFraction::frac_times(const BigInt& N) const {
  const double f = static_cast<double>(frac_times_big(N));
  return f >= 1.0 ? 0.0 : f;
}

BigFloat ContinuedFraction::dist_times_big(const BigInt& N) const {
  const BigFloat s = signed_offset(*this, N);
  return abs(s - round(s));
}

double ContinuedFraction::dist_times(const BigInt& N) const { return static_cast<double>(dist_times_big(N)); }

void to_json(nlohmann::json& j, const ContinuedFraction& cf) {
  auto strs = [](const std::vector<BigInt>& v, std::size_t from) {
    std::vector<std::string> out;
    for (std::size_t i = from; i < v.size(); ++i) out.push_back(v[i].str());
    return out;
  };
  j = nlohmann::json{{"alpha_desc", cf.alpha_desc}, {"a", strs(cf.a, 1)}, {"p", strs(cf.p, 0)}, {"q", strs(cf.q, 0)}};
}

bool determinant_identity_holds(const ContinuedFraction& cf) {
  BigInt pm1 = 1, qm1 = 0;  // p_{-1}, q_{-1}
  for (int n = 0; n <= cf.depth(); ++n) {
    const BigInt det = cf.p[n] * qm1 - pm1 * cf.q[n];
    const BigInt expect = (n % 2 == 0) ? BigInt(-1) : BigInt(1);  // (-1)^{n-1}
    if (det != expect) return false;
    pm1 = cf.p[n];
    qm1 = cf.q[n];
  }
  return true;
}

bool gdc2_sandwich_holds(const ContinuedFraction& cf) {
  const int K = cf.depth();
  for (int n = 0; n < K; ++n) {
    // exact: with t in [t_lo, t_hi] the sandwich reads q_{n+1} <= q_{n+1} + q_n t <= 2 q_{n+1}
    BigRational t_hi(1);
    if (n + 2 <= K) t_hi = BigRational(BigInt(1), cf.a[n + 2]);
    if (BigRational(cf.q[n]) * t_hi > BigRational(cf.q[n + 1])) return false;
    if (cf.q[n] < 0) return false;
    // and the stored float value respects it up to rounding
    const BigFloat qd = BigFloat(cf.q[n + 1]) * cf.delta[n];
    const BigFloat slack = BigFloat("1e-60");
    if (qd > 1 + slack || 2 * qd < 1 - slack) return false;
  }
  for (int n = 2; n <= K; ++n)
    if (cf.q[n] <= cf.q[n - 1]) return false;
  return true;
}

bool best_approx_check(const ContinuedFraction& cf, long K) {
  if (BigInt(K) >= cf.q.back()) throw InvalidArgument("best_approx_check needs K < q_last");
  for (int n = 0; n < cf.depth(); ++n) {
    if (cf.q[n] >= K) break;
    const long upper = cf.q[n + 1] < K ? static_cast<long>(cf.q[n + 1]) : K;
    const BigFloat dn = cf.delta[n];
    const BigFloat tol = dn * BigFloat("1e-50");
    for (long k = 1; k < upper; ++k) {
      const BigFloat dk = cf.dist_times_big(BigInt(k));
      if (dk < dn - tol) return false;
    }
  }
  return true;
}

DiophantineReport diophantine_check(const ContinuedFraction& cf, double kappa, double tau, long K) {
  DiophantineReport rep{kappa, tau, K, {}};
  for (long k = 1; k <= K; ++k) {
    const double dist = cf.dist_times(BigInt(k));
    const double bound = kappa * std::pow(static_cast<double>(k), -tau);
    if (!(dist > bound)) rep.violations.push_back({{k}, dist, bound});
  }
  return rep;
}

DiophantineReport diophantine_check(const std::vector<double>& alpha, double kappa, double tau, long K) {
  DiophantineReport rep{kappa, tau, K, {}};
  const int d = static_cast<int>(alpha.size());
  for (const auto& k : cube_sites(d, K)) {
    long norm = 0;
    long double s = 0.0L;
    for (int i = 0; i < d; ++i) {
      norm += std::labs(k[i]);
      s += static_cast<long double>(k[i]) * alpha[i];
    }
    if (norm == 0) continue;
    s -= std::floor(s);
    const double f = static_cast<double>(s);
    const double dist = std::min(f, 1.0 - f);
    const double bound = kappa * std::pow(static_cast<double>(norm), -tau);
    if (!(dist > bound)) rep.violations.push_back({k, dist, bound});
  }
  return rep;
}

BetaIndex beta_estimate(const ContinuedFraction& cf) {
  const int K = cf.depth();
  if (K < 5) throw InvalidArgument("beta_estimate needs depth >= 5");
  BetaIndex b;
  for (int n = 1; n < K; ++n) {
    b.per_n.push_back(static_cast<double>(log(BigFloat(cf.q[n + 1])) / BigFloat(cf.q[n])));
  }
  b.n_to = K - 1;
  b.n_from = std::max(1, K / 2);
  b.beta_estimate = 0.0;
  for (int n = b.n_from; n <= b.n_to; ++n) b.beta_estimate = std::max(b.beta_estimate, b.per_n[n - 1]);
  return b;
}

std::size_t TmSequence::total_terms() const {
  std::size_t s = 0;
  for (long k : kept) s += static_cast<std::size_t>(k);
  return s;
}

TmSequence tm_sequence(const ContinuedFraction& cf, double rho, double beta, long budget) {
  if (!(beta > 0.0)) throw InvalidArgument("tm_sequence needs beta > 0");
  if (!(rho > 0.0)) throw InvalidArgument("tm_sequence needs rho > 0");
  if (budget < 1) throw InvalidArgument("tm_sequence budget must be positive");
  TmSequence tm;
  tm.rho_bar = std::min(rho, beta) / 30.0;
  long remaining = budget;
  for (int n = 0; n < cf.depth(); ++n) {
    const BigFloat lhs = log(BigFloat(cf.q[n + 1]));
    const BigFloat rhs = BigFloat(0.75 * beta) * BigFloat(cf.q[n]);
    if (lhs < rhs) continue;
    tm.n_k.push_back(n);
    tm.q_nk.push_back(cf.q[n]);
    tm.delta_nk.push_back(cf.delta[n]);
    const double log_ell = tm.rho_bar * static_cast<double>(cf.q[n]);
    tm.log_ell.push_back(log_ell);
    const double ell = std::floor(std::exp(log_ell));
    const long cap = std::max(0L, remaining);
    const long kept = ell >= static_cast<double>(cap) ? cap : static_cast<long>(ell);
    tm.kept.push_back(kept);
    remaining -= kept;
  }
  if (tm.n_k.empty()) throw NoQualifyingIndex("no convergent satisfies q_{n+1} >= e^{(3/4) beta q_n}; expand deeper");
  return tm;
}

bool tm_bounds_hold(const ContinuedFraction& cf, const TmSequence& tm) {
  for (std::size_t k = 0; k < tm.n_k.size(); ++k) {
    const BigFloat slack = 1 + BigFloat("1e-60");
    for (long m = 1; m <= tm.kept[k]; ++m) {
      if (cf.dist_times_big(tm.term(k, m)) > BigFloat(m) * tm.delta_nk[k] * slack) return false;
    }
  }
  return true;
}

}  // namespace smm
