#ifndef MLEQLAB_RATIONAL_HPP
#define MLEQLAB_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace mleq {

// Exact arithmetic for payoff states. Genericity checks are meaningful only
// when state coincidences are decided exactly, so states are kept as
// arbitrary-precision rationals and projected to double for the numerics.
using Rational = boost::multiprecision::cpp_rational;

// Accepts "num/den", decimal strings ("0.21", ".5"), and plain integers.
// Decimal strings are read in base 10, so "0.21" is exactly 21/100.
Rational parse_rational(const std::string& text);

double to_double(const Rational& value);

// Compact rendering: decimal when the denominator divides a power of ten
// (up to 18 digits), "num/den" otherwise.
std::string rational_to_string(const Rational& value);

}  // namespace mleq

#endif
