#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <nlohmann/json.hpp>

namespace smm {

using BigInt = boost::multiprecision::mpz_int;
using BigRational = boost::multiprecision::mpq_rational;
/// ~265 bits; the exponent range comfortably holds 1/q for q of a million bits.
using BigFloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<80>>;

inline constexpr long kDefaultBudgetBits = 1L << 20;

/// Exact or certified description of a frequency in (0, 1).
struct AlphaDescriptor {
  enum class Kind { Quadratic, Quotients, Beta, Decimal, Double };
  Kind kind = Kind::Quadratic;
  // Quadratic: (P + sqrt(D)) / Q with Q > 0 dividing D - P^2.
  long P = 0, D = 0, Q = 1;
  // Quotients: a_1, a_2, ...; periodic continues by repeating the last entry.
  std::vector<BigInt> quotients;
  bool periodic = false;
  // Beta: a_{n+1} = max(1, floor(e^{beta q_n} / q_n)) after the seed.
  double beta = 0.0;
  std::vector<long> seed;
  bool pad_seed = false;
  // Decimal: exact value.
  BigRational rational;
  // Double: value with one-ulp uncertainty.
  double value = 0.0;

  static AlphaDescriptor golden();
  static AlphaDescriptor silver();
  static AlphaDescriptor quadratic(long P, long D, long Q);
  static AlphaDescriptor from_quotients(std::vector<BigInt> a, bool periodic);
  static AlphaDescriptor decimal(const std::string& text);
  static AlphaDescriptor from_double(double x);

  /// "golden", "silver", a decimal, "quotients:1,2,3" (trailing ",..." repeats the last),
  /// "beta:1.0" or "beta:1.0:seed=1,2".
  static AlphaDescriptor parse(const std::string& text);
  std::string to_string() const;
};

/// Frequency whose continued fraction grows with index beta; a_n = 1 padding is prepended to the
/// seed when `pad` is set so that a requested depth fits the integer budget.
AlphaDescriptor alpha_with_beta(double beta, std::vector<long> seed = {}, bool pad = true);

/// Number of leading a_n = 1 entries needed before `seed` so that `depth` quotients fit the budget.
int beta_padding(double beta, const std::vector<long>& seed, int depth, long budget_bits);

struct ContinuedFraction {
  std::string alpha_desc;
  std::vector<BigInt> a;  // a[0] unused, a[1..K]
  std::vector<BigInt> p;  // p[0..K]
  std::vector<BigInt> q;  // q[0..K]
  /// Delta_n = |q_n alpha - p_n| for n = 0..K-1.
  std::vector<BigFloat> delta;
  /// Look-ahead quotients a_{K+1}, ... when they were affordable (may be empty).
  std::vector<BigFloat> lookahead;
  /// ln q_{K+1}; +inf when not representable.
  double log_q_next = 0.0;

  int depth() const { return static_cast<int>(q.size()) - 1; }
  /// alpha to BigFloat precision.
  BigFloat alpha() const;
  double value() const { return static_cast<double>(alpha()); }
  /// frac(N alpha), through the exact residue N p_K mod q_K plus the small Delta correction.
  double frac_times(const BigInt& N) const;
  /// ||N alpha||_{R/Z}.
  double dist_times(const BigInt& N) const;
  BigFloat frac_times_big(const BigInt& N) const;
  BigFloat dist_times_big(const BigInt& N) const;
};

/// Expands to `depth` quotients. Throws PrecisionExhausted, RationalTermination or OverflowBudget.
ContinuedFraction cf_expand(const AlphaDescriptor& desc, int depth, long budget_bits = kDefaultBudgetBits);

void to_json(nlohmann::json& j, const ContinuedFraction& cf);

/// p_n q_{n-1} - p_{n-1} q_n = (-1)^{n-1} for every n, in integer arithmetic.
bool determinant_identity_holds(const ContinuedFraction& cf);

/// 1/(2 q_{n+1}) <= Delta_n <= 1/q_{n+1}, proved with rational bounds on the tail of the expansion.
bool gdc2_sandwich_holds(const ContinuedFraction& cf);

/// For each n with q_n < K: ||k alpha|| >= Delta_n for all 1 <= k < min(K, q_{n+1}).
bool best_approx_check(const ContinuedFraction& cf, long K);

struct DiophantineViolation {
  std::vector<long> k;
  double distance;
  double bound;
};

struct DiophantineReport {
  double kappa = 0.0;
  double tau = 0.0;
  long K = 0;
  std::vector<DiophantineViolation> violations;
};

/// ||k alpha|| > kappa |k|^-tau over 1 <= k <= K.
DiophantineReport diophantine_check(const ContinuedFraction& cf, double kappa, double tau, long K);
/// Multi-frequency window 0 < |k|_inf <= K with |k| the l1 norm.
DiophantineReport diophantine_check(const std::vector<double>& alpha, double kappa, double tau, long K);

struct BetaIndex {
  double beta_estimate = 0.0;
  int n_from = 0;
  int n_to = 0;
  std::vector<double> per_n;  // ln q_{n+1} / q_n for n = 1..K-1
};

BetaIndex beta_estimate(const ContinuedFraction& cf);

struct TmSequence {
  double rho_bar = 0.0;
  std::vector<int> n_k;
  std::vector<BigInt> q_nk;
  std::vector<BigFloat> delta_nk;
  /// ln ell_k with ell_k = floor(e^{rho_bar q_{n_k}}); may be +inf.
  std::vector<double> log_ell;
  /// Materialised multiples per k: t = m q_{n_k} for m = 1..kept[k].
  std::vector<long> kept;

  std::size_t total_terms() const;
  BigInt term(std::size_t k, long m) const { return q_nk[k] * m; }
};

/// Multiples of the q_n with ln q_{n+1} >= (3/4) beta q_n. Throws NoQualifyingIndex.
TmSequence tm_sequence(const ContinuedFraction& cf, double rho, double beta, long budget = 1000000);

/// ||t_m alpha|| <= m Delta_{n_k} for every materialised term, compared in BigFloat.
bool tm_bounds_hold(const ContinuedFraction& cf, const TmSequence& tm);

}  // namespace smm
