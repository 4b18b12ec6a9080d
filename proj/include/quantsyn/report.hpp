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
/// Text and CSV tables of pipeline rows, with small/mgo ratio lines for rows
/// that share a model and a resolution.

#include "quantsyn/pipeline.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace quantsyn {

void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows);
void write_report_text(std::ostream& os, const std::vector<ReportRow>& rows);

struct RatioLine {
  std::string model;
  unsigned bits = 0;
  double blocks = 0;     // small / mgo
  double src_bytes = 0;  // small / mgo
  std::optional<double> path;
};

std::vector<RatioLine> ratio_lines(const std::vector<ReportRow>& rows);

}  // namespace quantsyn
