#include "helab/regime.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "helab/error.hpp"

namespace helab {
namespace {

using boost::multiprecision::cpp_int;

const Rational zero{0};
const Rational one{1};
const Rational half{1, 2};

[[noreturn]] void bad_number(std::string_view text) {
  throw Error(ErrorCode::config, "not an exact number: '" + std::string(text) + "'");
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) bad_number(text);
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = s.substr(0, dot);
    const std::string_view frac = s.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac))) {
      bad_number(text);
    }
    digits = std::string(whole) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    if (!all_digits(s)) bad_number(text);
    digits = std::string(s);
  }
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  cpp_int numerator(digits);
  cpp_int scale = 1;
  for (long i = 0; i < std::labs(exponent); ++i) scale *= 10;
  Rational value = exponent >= 0 ? Rational(numerator * scale) : Rational(numerator, scale);
  return negative ? Rational(-value) : value;
}

void require_unit(const Rational& x, const char* name, bool open_low, bool open_high) {
  const bool low_ok = open_low ? x > zero : x >= zero;
  const bool high_ok = open_high ? x < one : x <= one;
  if (!low_ok || !high_ok) {
    throw Error(ErrorCode::out_of_range, std::string(name) + " = " + format_rational(x) + " outside its range");
  }
}

}  // namespace

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::config, "non-finite number");
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return parse_decimal(std::string_view(buf, result.ptr - buf));
}

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_decimal(text.substr(0, slash));
    const Rational den = parse_decimal(text.substr(slash + 1));
    if (den == zero) bad_number(text);
    return num / den;
  }
  return parse_decimal(text);
}

std::string format_rational(const Rational& value) {
  const cpp_int num = boost::multiprecision::numerator(value);
  const cpp_int den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Exponent::Exponent(Rational value) : value_(std::move(value)) {
  if (value_ < one) throw Error(ErrorCode::out_of_range, "exponent " + format_rational(value_) + " below 1");
}

Exponent Exponent::infinite() {
  Exponent e;
  e.infinite_ = true;
  e.value_ = zero;
  return e;
}

const Rational& Exponent::value() const {
  if (infinite_) throw Error(ErrorCode::precondition, "infinite exponent has no finite value");
  return value_;
}

Rational Exponent::reciprocal() const { return infinite_ ? zero : Rational(one / value_); }

double Exponent::to_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : static_cast<double>(value_);
}

std::string Exponent::str() const { return infinite_ ? "inf" : format_rational(value_); }

Exponent parse_exponent(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "Infinity" || text == "∞") return Exponent::infinite();
  return Exponent(parse_rational(text));
}

Exponent exponent_from_double(double value) {
  if (std::isinf(value) && value > 0) return Exponent::infinite();
  return Exponent(rational_from_double(value));
}

ExponentRegime ExponentRegime::make(Rational theta, Rational alpha, Exponent p, Exponent q, Exponent r,
                                    Exponent kappa) {
  require_unit(theta, "theta", true, true);
  require_unit(alpha, "alpha", true, true);
  if (p.reciprocal() + q.reciprocal() != one) {
    throw Error(ErrorCode::precondition, "1/p + 1/q must equal 1 (p = " + p.str() + ", q = " + q.str() + ")");
  }
  if (r.reciprocal() + kappa.reciprocal() != one) {
    throw Error(ErrorCode::precondition, "1/r + 1/kappa must equal 1 (r = " + r.str() + ", kappa = " + kappa.str() + ")");
  }
  return {std::move(theta), std::move(alpha), std::move(p), std::move(q), std::move(r), std::move(kappa)};
}

bool conserves_helicity(const Rational& theta, const Rational& alpha) { return 2 * theta + alpha >= one; }

bool conserves_helicity(const ExponentRegime& regime) { return conserves_helicity(regime.theta, regime.alpha); }

Rational holder_time_exponent(const Rational& theta, const Rational& alpha) {
  require_unit(theta, "theta", false, true);
  require_unit(alpha, "alpha", false, false);
  return (alpha + theta) / (one - theta);
}

Rational holder_time_exponent_w3(const Rational& theta) {
  if (!(theta > half && theta < one)) {
    throw Error(ErrorCode::out_of_range, "theta = " + format_rational(theta) + " must lie in (1/2, 1)");
  }
  return (2 * theta - one) / (one - theta);
}

Rational embedding_threshold(const Rational& alpha, const Rational& theta) {
  require_unit(alpha, "alpha", false, false);
  require_unit(theta, "theta", false, false);
  return Rational(9) / (5 + 2 * (alpha - theta));
}

Remark2Threshold remark2_threshold(const Rational& alpha) {
  require_unit(alpha, "alpha", false, false);
  return {Rational(9) / (4 + 3 * alpha), (one - alpha) / 2};
}

double balancing_delta(double t_gap, double theta) {
  if (!(t_gap >= 0.0)) throw Error(ErrorCode::out_of_range, "time gap must be nonnegative");
  if (!(theta >= 0.0 && theta < 1.0)) throw Error(ErrorCode::out_of_range, "theta must lie in [0, 1)");
  return std::pow(t_gap, 1.0 / (1.0 - theta));
}

std::optional<Rational> balancing_delta_exact(const Rational& t_gap, const Rational& theta) {
  if (t_gap < zero) throw Error(ErrorCode::out_of_range, "time gap must be nonnegative");
  require_unit(theta, "theta", false, true);
  const Rational power = one / (one - theta);
  if (boost::multiprecision::denominator(power) != 1) return std::nullopt;
  const cpp_int n = boost::multiprecision::numerator(power);
  Rational out = one;
  for (cpp_int i = 0; i < n; ++i) out *= t_gap;
  return out;
}

RegimeVerdict evaluate(const ExponentRegime& regime) {
  RegimeVerdict v{conserves_helicity(regime), holder_time_exponent(regime.theta, regime.alpha), std::nullopt,
                  embedding_threshold(regime.alpha, regime.theta), remark2_threshold(regime.alpha)};
  if (regime.theta > half) v.time_exponent_w3 = holder_time_exponent_w3(regime.theta);
  return v;
}

}  // namespace helab
