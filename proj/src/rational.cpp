#include "mleqlab/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace mleq {

namespace {

using BigInt = boost::multiprecision::cpp_int;

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  // trim whitespace
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = (s.front() == '-');
    s.erase(s.begin());
  }
  if (s.empty()) throw std::invalid_argument("malformed rational literal: '" + text + "'");

  Rational result;
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw std::invalid_argument("malformed fraction literal: '" + text + "'");
    }
    BigInt d(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    result = Rational(BigInt(num), d);
  } else {
    auto dot = s.find('.');
    if (dot == std::string::npos) {
      if (!all_digits(s)) throw std::invalid_argument("malformed rational literal: '" + text + "'");
      result = Rational(BigInt(s));
    } else {
      std::string whole = s.substr(0, dot);
      std::string frac = s.substr(dot + 1);
      if (whole.empty() && frac.empty()) {
        throw std::invalid_argument("malformed decimal literal: '" + text + "'");
      }
      if (!whole.empty() && !all_digits(whole)) {
        throw std::invalid_argument("malformed decimal literal: '" + text + "'");
      }
      if (!frac.empty() && !all_digits(frac)) {
        throw std::invalid_argument("malformed decimal literal: '" + text + "'");
      }
      BigInt scale = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
      BigInt numerator = whole.empty() ? BigInt(0) : BigInt(whole);
      numerator *= scale;
      if (!frac.empty()) numerator += BigInt(frac);
      result = Rational(numerator, scale);
    }
  }
  if (negative) result = -result;
  return result;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::string rational_to_string(const Rational& value) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  BigInt den = denominator(value);
  BigInt num = numerator(value);
  // try a terminating decimal expansion with at most 18 digits
  BigInt scale = 1;
  for (int digits = 0; digits <= 18; ++digits) {
    if (scale % den == 0) {
      BigInt scaled = num * (scale / den);
      bool neg = scaled < 0;
      if (neg) scaled = -scaled;
      std::string body = scaled.str();
      std::string out;
      if (digits == 0) {
        out = body;
      } else {
        while (static_cast<int>(body.size()) <= digits) body.insert(body.begin(), '0');
        out = body.substr(0, body.size() - digits) + "." + body.substr(body.size() - digits);
        while (out.back() == '0') out.pop_back();
        if (out.back() == '.') out.pop_back();
      }
      return neg ? "-" + out : out;
    }
    scale *= 10;
  }
  return num.str() + "/" + den.str();
}

}  // namespace mleq
