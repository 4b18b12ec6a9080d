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

#pragma once

/// @file
///
/// Exact rational numbers and the small set of conversions the rest of the
/// library needs.

#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace quantsyn {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

/// Thrown when an API is called with arguments that violate its contract.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Thrown when a configured resource cap (cells, assignments, ...) is hit.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "p/q", "-12", "0.637", "1e-6", "2.5E+3" exactly.
Rational parse_rational(std::string_view text);

Integer floor_integer(const Rational& r);
Integer ceil_integer(const Rational& r);
long long floor_ll(const Rational& r);

double to_double(const Rational& r);

/// Exact binary value of a finite double.
Rational from_double(double d);

/// Nearest rational with the given denominator (round half away from zero).
Rational round_to(double d, long long denominator);

std::string to_string(const Rational& r);

inline bool is_integral(const Rational& r) {
  return boost::multiprecision::denominator(r) == 1;
}

}  // namespace quantsyn
