#pragma once

#include <gmpxx.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace matsg {

using Rational = mpq_class;
using Integer = mpz_class;

// 50 significant decimal digits; basis constants need at least 30.
using Real = boost::multiprecision::cpp_bin_float_50;

inline constexpr int kRealDigits = 50;

enum class ScalarMode { exact, real };

std::string to_string(ScalarMode mode);
ScalarMode parse_mode(std::string_view text);

// Accepts "p/q", integers and plain decimals ("0.125", "-3e-2").
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

// Accepts everything parse_rational does plus "pi", "e", "sqrt(n)",
// "sqrt(p/q)" and a leading rational factor "q*<const>" (e.g. "1/2*pi").
Real parse_real(std::string_view text);
// Full-precision decimal representation that parse_real reads back exactly.
std::string to_string(const Real& r);

Real to_real(const Rational& q);
double to_double(const Real& r);
double to_double(const Rational& q);

Real real_pi();

// Continued fraction convergents p_k/q_k of v, stopping after max_terms or
// once the remainder vanishes at working precision.
std::vector<Rational> convergents(const Real& v, int max_terms = 64);

// First convergent of v within tol, if any within max_terms.
std::optional<Rational> rational_approximation(const Real& v, const Real& tol,
                                               int max_terms = 64);

// Reduce r into [-a, a).
Real reduce_symmetric(const Real& r, const Real& a);

}  // namespace matsg
