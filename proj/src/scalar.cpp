#include "matsg/scalar.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cctype>
#include <limits>
#include <sstream>

#include "matsg/error.hpp"

namespace matsg {

namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool looks_decimal(const std::string& s) {
  return s.find_first_of(".eE") != std::string::npos;
}

Rational parse_decimal(const std::string& s) {
  // mantissa[e exponent], parsed exactly.
  size_t epos = s.find_first_of("eE");
  std::string mant = s.substr(0, epos);
  long exp10 = 0;
  if (epos != std::string::npos) {
    try {
      exp10 = std::stol(s.substr(epos + 1));
    } catch (const std::exception&) {
      throw ParseError("bad exponent in number '" + s + "'");
    }
  }
  bool neg = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    neg = mant[0] == '-';
    mant.erase(0, 1);
  }
  size_t dot = mant.find('.');
  std::string digits = mant;
  if (dot != std::string::npos) {
    digits = mant.substr(0, dot) + mant.substr(dot + 1);
    exp10 -= static_cast<long>(mant.size() - dot - 1);
  }
  if (digits.empty()) throw ParseError("bad number '" + s + "'");
  for (char c : digits)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError("bad number '" + s + "'");
  Integer num(digits, 10);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational q = exp10 >= 0 ? Rational(num * scale) : Rational(num, scale);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

}  // namespace

std::string to_string(ScalarMode mode) {
  return mode == ScalarMode::exact ? "exact" : "real";
}

ScalarMode parse_mode(std::string_view text) {
  if (text == "exact") return ScalarMode::exact;
  if (text == "real") return ScalarMode::real;
  throw ParseError("unknown mode '" + std::string(text) + "' (expected exact|real)");
}

Rational parse_rational(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw ParseError("empty rational");
  if (looks_decimal(s)) return parse_decimal(s);
  Rational q;
  try {
    std::string t = s;
    if (t[0] == '+') t.erase(0, 1);
    if (q.set_str(t, 10) != 0) throw ParseError("bad rational '" + s + "'");
  } catch (const std::invalid_argument&) {
    throw ParseError("bad rational '" + s + "'");
  }
  if (q.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

Real to_real(const Rational& q) {
  return Real(q.get_num().get_str()) / Real(q.get_den().get_str());
}

double to_double(const Real& r) { return r.convert_to<double>(); }
double to_double(const Rational& q) { return q.get_d(); }

Real real_pi() { return boost::math::constants::pi<Real>(); }

Real parse_real(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw ParseError("empty real");
  size_t star = s.find('*');
  if (star != std::string::npos) {
    return to_real(parse_rational(s.substr(0, star))) * parse_real(s.substr(star + 1));
  }
  bool neg = false;
  std::string body = s;
  if (body[0] == '-') {
    neg = true;
    body.erase(0, 1);
  }
  Real v;
  if (body == "pi") {
    v = real_pi();
  } else if (body == "e") {
    v = boost::math::constants::e<Real>();
  } else if (body.rfind("sqrt(", 0) == 0 && body.back() == ')') {
    Rational inner = parse_rational(body.substr(5, body.size() - 6));
    if (inner < 0) throw ParseError("sqrt of negative in '" + s + "'");
    v = boost::multiprecision::sqrt(to_real(inner));
  } else {
    Rational q = parse_rational(s);
    // Long decimals go straight to the binary float so the round trip is exact.
    if (s.find('/') == std::string::npos) return Real(s);
    return to_real(q);
  }
  return neg ? Real(-v) : v;
}

std::string to_string(const Real& r) {
  std::ostringstream os;
  os.precision(std::numeric_limits<Real>::max_digits10);
  os << r;
  return os.str();
}

std::vector<Rational> convergents(const Real& v, int max_terms) {
  std::vector<Rational> out;
  // p_{-1}=1, p_{-2}=0; q_{-1}=0, q_{-2}=1.
  Integer p_prev = 1, p_prev2 = 0, q_prev = 0, q_prev2 = 1;
  Real x = v;
  const Real eps = Real(1) / Real("1e45");
  for (int k = 0; k < max_terms; ++k) {
    Real fl = boost::multiprecision::floor(x);
    Integer a(fl.convert_to<boost::multiprecision::cpp_int>().str());
    Integer p = a * p_prev + p_prev2;
    Integer q = a * q_prev + q_prev2;
    out.emplace_back(p, q);
    out.back().canonicalize();
    Real frac = x - fl;
    if (boost::multiprecision::abs(frac) < eps) break;
    x = Real(1) / frac;
    p_prev2 = p_prev;
    p_prev = p;
    q_prev2 = q_prev;
    q_prev = q;
  }
  return out;
}

std::optional<Rational> rational_approximation(const Real& v, const Real& tol,
                                               int max_terms) {
  for (const Rational& c : convergents(v, max_terms)) {
    if (boost::multiprecision::abs(to_real(c) - v) <= tol) return c;
  }
  return std::nullopt;
}

Real reduce_symmetric(const Real& r, const Real& a) {
  if (a <= 0) throw DomainError("reduction half-width must be positive");
  Real period = 2 * a;
  Real shifted = r + a;
  Real k = boost::multiprecision::floor(shifted / period);
  Real out = shifted - k * period - a;
  if (out >= a) out -= period;
  if (out < -a) out += period;
  return out;
}

}  // namespace matsg
