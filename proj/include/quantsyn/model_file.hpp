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
/// Text format for plants and control problems.
///
///   model scalar;
///   param T = 1/100;
///   sampling T;
///   var x real [-2, 2.5] floor 1;     # or: bits 8 (uniform over the bounds)
///   input u bool;
///   input v int [-1, 1];
///   aux y real [0, 10];
///   trans !u -> x' = x + (5/4 - x) * T;
///   init x >= -2;
///   goal x <= 1/4;
///
/// Expressions are linear; numbers are decimals, exponents or p/q fractions,
/// all read exactly. A trailing quote names the next-state copy of a state
/// variable. '#' starts a comment.

#include "quantsyn/models.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace quantsyn {

class ParseError : public UsageError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct ModelFile {
  ModelInstance model;
  std::map<std::string, Rational> params;
};

/// `bits` replaces the resolution of every "bits" quantizer when given.
ModelFile parse_model(std::string_view text, std::optional<unsigned> bits = std::nullopt);

}  // namespace quantsyn
