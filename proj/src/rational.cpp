// Copyright 2026 The quantsyn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quantsyn/rational.hpp"

#include <cctype>
#include <cmath>

namespace quantsyn {

namespace {

Integer pow10(long long e) {
  Integer r = 1;
  for (long long i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(std::string_view text) {
  if (text.empty()) throw UsageError("empty number");
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  Integer mantissa = 0;
  long long scale = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      if (seen_point) ++scale;
      any_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw UsageError("malformed number '" + std::string(text) + "'");
  long long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      exp_negative = text[pos] == '-';
      ++pos;
    }
    if (pos >= text.size()) throw UsageError("malformed exponent in '" + std::string(text) + "'");
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (!std::isdigit(static_cast<unsigned char>(c))) break;
      exponent = exponent * 10 + (c - '0');
      if (exponent > 4000) throw UsageError("exponent out of range");
    }
    if (exp_negative) exponent = -exponent;
  }
  if (pos != text.size()) throw UsageError("trailing characters in '" + std::string(text) + "'");
  const long long shift = exponent - scale;
  Rational r = shift >= 0 ? Rational(mantissa * pow10(shift)) : Rational(mantissa, pow10(-shift));
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  const Rational num = parse_decimal(text.substr(0, slash));
  const Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw UsageError("zero denominator in '" + std::string(text) + "'");
  return Rational(num / den);
}

Integer floor_integer(const Rational& r) {
  const Integer& n = boost::multiprecision::numerator(r);
  const Integer& d = boost::multiprecision::denominator(r);
  Integer q = n / d;  // truncates toward zero
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

Integer ceil_integer(const Rational& r) {
  return Integer(-floor_integer(Rational(-r)));
}

long long floor_ll(const Rational& r) {
  return floor_integer(r).convert_to<long long>();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational from_double(double d) {
  if (!std::isfinite(d)) throw UsageError("non-finite value");
  return Rational(d);
}

Rational round_to(double d, long long denominator) {
  const double scaled = d * static_cast<double>(denominator);
  return Rational(static_cast<long long>(std::llround(scaled)), denominator);
}

std::string to_string(const Rational& r) { return r.str(); }

}  // namespace quantsyn
