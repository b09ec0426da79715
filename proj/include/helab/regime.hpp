#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace helab {

using Rational = boost::multiprecision::cpp_rational;

/// Exact decimal reading of a finite double: the shortest round-trip decimal
/// form, so 0.45 becomes 9/20.
Rational rational_from_double(double value);

/// Accepts integers, fractions "a/b", decimals with optional exponent
/// ("0.45", "1e-1"). Throws config on anything else.
Rational parse_rational(std::string_view text);

/// "a/b", or "a" when the denominator is 1.
std::string format_rational(const Rational& value);

/// Integrability exponent in [1, inf]; inf is kept as a distinct value with
/// reciprocal 0.
class Exponent {
 public:
  explicit Exponent(Rational value);
  static Exponent infinite();

  bool is_infinite() const noexcept { return infinite_; }
  /// Finite value; throws precondition for inf.
  const Rational& value() const;
  Rational reciprocal() const;
  double to_double() const;
  std::string str() const;

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  Exponent() = default;
  bool infinite_ = false;
  Rational value_{1};
};

/// "inf", "infinity", "∞" or any parse_rational input.
Exponent parse_exponent(std::string_view text);
Exponent exponent_from_double(double value);

/// Hypotheses of the conservation theorem. theta, alpha in (0,1);
/// p, q, r, kappa in [1, inf] with 1/p + 1/q = 1 and 1/r + 1/kappa = 1.
struct ExponentRegime {
  Rational theta;
  Rational alpha;
  Exponent p;
  Exponent q;
  Exponent r;
  Exponent kappa;

  /// Validating constructor; throws out_of_range or precondition.
  static ExponentRegime make(Rational theta, Rational alpha, Exponent p, Exponent q, Exponent r, Exponent kappa);
};

/// 2 theta + alpha >= 1 (boundary included).
bool conserves_helicity(const ExponentRegime& regime);
bool conserves_helicity(const Rational& theta, const Rational& alpha);

/// (alpha + theta) / (1 - theta); theta in [0,1), alpha in [0,1].
Rational holder_time_exponent(const Rational& theta, const Rational& alpha);

/// (2 theta - 1) / (1 - theta); theta in (1/2, 1), otherwise out_of_range.
Rational holder_time_exponent_w3(const Rational& theta);

/// 9 / (5 + 2 (alpha - theta)); alpha, theta in [0,1].
Rational embedding_threshold(const Rational& alpha, const Rational& theta);

struct Remark2Threshold {
  Rational q_threshold;      ///< 9 / (4 + 3 alpha)
  Rational companion_theta;  ///< (1 - alpha) / 2
};
/// alpha in [0,1].
Remark2Threshold remark2_threshold(const Rational& alpha);

/// |t - s|^{1/(1-theta)} for t_gap >= 0 and theta in [0,1).
double balancing_delta(double t_gap, double theta);
/// Exact value when 1/(1-theta) is an integer; nullopt otherwise.
std::optional<Rational> balancing_delta_exact(const Rational& t_gap, const Rational& theta);

struct RegimeVerdict {
  bool conserves;
  Rational time_exponent;
  std::optional<Rational> time_exponent_w3;  ///< only for theta > 1/2
  Rational embedding_threshold;
  Remark2Threshold remark2;
};

RegimeVerdict evaluate(const ExponentRegime& regime);

inline double to_double(const Rational& r) { return static_cast<double>(r); }

}  // namespace helab
