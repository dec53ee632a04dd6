#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smm/diophantine.hpp"
#include "smm/numerics.hpp"

namespace smm {

/// f(x) = sum_{|j| <= J} f_j e^{2 pi i j x} with |f_j| <= C e^{-2 pi rho |j|}.
class AnalyticObservable {
 public:
  AnalyticObservable(std::vector<Complex> coeffs, double rho);

  /// f_j = e^{-rate |j|} for |j| <= J.
  static AnalyticObservable exp_modes(int J, double rate, double rho);
  /// The default test observable f_j = e^{-2 pi |j|}, J = 40, rho = 1.
  static AnalyticObservable standard();
  static AnalyticObservable single_mode(int j, double rho = 1.0);
  static AnalyticObservable constant(Complex c);

  int J() const { return J_; }
  double rho() const { return rho_; }
  double certificate() const { return C_; }
  Complex coeff(int j) const { return (j < -J_ || j > J_) ? Complex(0.0) : coeffs_[j + J_]; }
  Complex mean() const { return coeffs_[J_]; }
  Complex operator()(Complex x) const;

 private:
  std::vector<Complex> coeffs_;
  int J_;
  double rho_;
  double C_;
};

struct BirkhoffDeviation {
  Complex formula;
  Complex direct;
  bool has_direct = false;
  bool small_divisor = false;
  double disagreement = 0.0;  // |direct - formula| / max(1, |formula|)
};

inline constexpr long kDirectLimit = 1000000;

/// D_N(x) = sum_{m < N} f(x + m alpha) - N f_0, by summation (N <= 10^6) and by geometric sums.
BirkhoffDeviation birkhoff_deviation(const AnalyticObservable& f, const ContinuedFraction& cf, Complex x,
                                     const BigInt& N);

/// Direct summation only, compensated, with double-double phases.
Complex birkhoff_direct(const AnalyticObservable& f, const ContinuedFraction& cf, Complex x, long N);

struct ErgodicRow {
  long k;
  BigInt N;
  double sup_real;
  double sup_strip;
};

struct LeReport {
  std::vector<ErgodicRow> rows;
  double tail_sup = 0.0;  // sup at the last j_k
  double trend = 0.0;     // slope of log sup against k
  double beta_estimate = 0.0;
  /// empirical min over 0 < |j| <= J of ||j alpha|| e^{(rho/4)|j|}
  double small_divisor_constant = 0.0;
  bool pass = false;
};

/// j_k = q_n (n = 1..max_n), or any given sequence.
std::vector<BigInt> qn_sequence(const ContinuedFraction& cf, int max_n);

LeReport verify_lemma_le(const AnalyticObservable& f, const ContinuedFraction& cf,
                         const std::vector<BigInt>& j_seq, int x_points = 64, double eps = 1e-2);

struct Le1Row {
  long k;
  long m;
  BigInt N;
  double sup_tm;
  double sup_tm_strip;
  double sup_generic;  // at N + 1
};

struct Le1Report {
  std::vector<Le1Row> rows;
  std::vector<double> per_k_sup;      // max over materialised m
  std::vector<double> per_k_generic;  // same for N + 1
  std::vector<double> partial_sums;   // finite-J version of the series over j, sup over m
  bool tm_decreasing = false;
  bool generic_not_decaying = false;
  bool series_bounded = false;
  bool pass = false;
};

Le1Report verify_lemma_le1(const AnalyticObservable& f, const ContinuedFraction& cf, const TmSequence& tm,
                           int x_points = 32, int m_samples = 16);

void write_le_csv(const LeReport& r, std::ostream& os);
nlohmann::json le_summary(const LeReport& r);
void write_le1_csv(const Le1Report& r, std::ostream& os);

}  // namespace smm
