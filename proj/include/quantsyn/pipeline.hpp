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
/// One run of the flow: abstraction, synthesis, law extraction, emission and
/// an optional closed-loop simulation, summarized as a report row.

#include "quantsyn/codegen.hpp"
#include "quantsyn/models.hpp"
#include "quantsyn/simulate.hpp"
#include "quantsyn/synthesis.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace quantsyn {

enum class Algorithm { mgo, small };

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct ReportRow {
  std::string model;
  unsigned bits = 0;
  std::string algo;
  bool synthesized = false;
  std::uint64_t init_states = 0;
  std::uint64_t domain_states = 0;
  std::size_t controller_nodes = 0;
  std::size_t src_bytes = 0;
  std::size_t blocks = 0;
  std::size_t height = 0;
  std::optional<Rational> path;
  double abstraction_secs = 0;
  double synthesis_secs = 0;
  std::size_t peak_nodes = 0;
  std::optional<double> setup_time;
  std::vector<double> ripple;
};

struct PipelineOptions {
  Algorithm algo = Algorithm::mgo;
  std::vector<std::uint64_t> priority;  // small controller only; empty: ascending
  unsigned bits = 0;                    // reported resolution
  std::string out_dir;                  // empty: write nothing
  /// Closed-loop simulation from x0 when set.
  std::optional<std::vector<double>> x0;
  std::size_t horizon = 4000;
  /// Plant used for simulation; the determinized transition predicate when null.
  std::shared_ptr<const PlantSim> plant;
};

struct PipelineResult {
  ReportRow row;
  SynthesisResult synthesis;
  std::optional<ControlLaw> law;
  std::optional<Emission> emission;
  std::optional<Trajectory> trajectory;
  std::optional<LoopMetrics> metrics;
};

AbstractLts abstract_model(const ModelInstance& m, const AbstractionOptions& options = {});

/// Synthesis and the later stages on an abstraction of `m`.
PipelineResult run_on_abstraction(const ModelInstance& m, const AbstractLts& abs, const PipelineOptions& options);

PipelineResult run_pipeline(const ModelInstance& m, const PipelineOptions& options,
                            const AbstractionOptions& abstraction = {});

}  // namespace quantsyn
