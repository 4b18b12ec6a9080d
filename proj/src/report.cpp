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

#include "quantsyn/report.hpp"

#include <iomanip>
#include <sstream>

namespace quantsyn {

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string path_text(const ReportRow& r) { return r.path ? fixed(to_double(*r.path), 2) : "inf"; }

std::vector<std::string> cells(const ReportRow& r) {
  return {r.model,
          std::to_string(r.bits),
          r.algo,
          r.synthesized ? "ok" : "FAIL",
          std::to_string(r.controller_nodes),
          std::to_string(r.src_bytes),
          std::to_string(r.blocks),
          std::to_string(r.height),
          path_text(r),
          fixed(r.abstraction_secs + r.synthesis_secs, 2)};
}

const std::vector<std::string> kHeader = {"model", "b",      "algo",   "status", "nodes",
                                          "src_bytes", "blocks", "height", "path",   "secs"};

}  // namespace

std::vector<RatioLine> ratio_lines(const std::vector<ReportRow>& rows) {
  std::vector<RatioLine> out;
  for (const ReportRow& s : rows) {
    if (s.algo != "small") continue;
    for (const ReportRow& m : rows) {
      if (m.algo != "mgo" || m.model != s.model || m.bits != s.bits) continue;
      if (m.blocks == 0 || m.src_bytes == 0) continue;
      RatioLine l{s.model, s.bits, static_cast<double>(s.blocks) / static_cast<double>(m.blocks),
                  static_cast<double>(s.src_bytes) / static_cast<double>(m.src_bytes), std::nullopt};
      if (s.path && m.path && *m.path != 0) l.path = to_double(*s.path / *m.path);
      out.push_back(l);
      break;
    }
  }
  return out;
}

void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  for (std::size_t i = 0; i < kHeader.size(); ++i) os << (i ? "," : "") << kHeader[i];
  os << ",setup_time\n";
  for (const ReportRow& r : rows) {
    const auto c = cells(r);
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << ',' << (r.setup_time ? fixed(*r.setup_time, 6) : "") << '\n';
  }
}

void write_report_text(std::ostream& os, const std::vector<ReportRow>& rows) {
  std::vector<std::vector<std::string>> table{kHeader};
  for (const ReportRow& r : rows) table.push_back(cells(r));
  std::vector<std::size_t> width(kHeader.size(), 0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << row[i];
    }
    os << '\n';
  }
  for (const RatioLine& l : ratio_lines(rows)) {
    os << l.model << " b=" << l.bits << ": blocks small/mgo = " << fixed(100 * l.blocks, 1)
       << "%, src_bytes small/mgo = " << fixed(100 * l.src_bytes, 1) << "%";
    if (l.path) os << ", path small/mgo = " << fixed(*l.path, 2);
    os << '\n';
  }
}

}  // namespace quantsyn
