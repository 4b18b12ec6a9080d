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
/// Closed-loop simulation of a concrete plant driven by an emitted branch
/// program, and the set-up time and ripple metrics of a run.

#include "quantsyn/codegen.hpp"
#include "quantsyn/dtlhs.hpp"

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace quantsyn {

/// One sampling period of the concrete plant, in floating point.
class PlantSim {
 public:
  virtual ~PlantSim() = default;
  virtual std::string flavor() const = 0;
  /// Successor under an action code, or nullopt when the plant has no
  /// behavior there (the state left the modeled region).
  virtual std::optional<std::vector<double>> step(const std::vector<double>& x, std::uint64_t action) const = 0;
};

/// The nonlinear pendulum x1' = x1 + T x2, x2' = x2 + T sin(x1) + T F u, with
/// x1 wrapped into one period after each step.
std::unique_ptr<PlantSim> pendulum_plant(const Quantization& q, double force, double sampling);

/// The plant's own transition predicate, made deterministic: in each step the
/// first guard assignment whose reduced system holds at x is used, trying
/// higher values of the auxiliary booleans first. Throws UsageError when some
/// next-state variable is not defined by an equality.
std::unique_ptr<PlantSim> determinized_plant(const Dtlhs& h, const Quantization& q);

struct Sample {
  double t = 0;
  std::vector<double> x;
  std::optional<std::uint64_t> action;
};

struct Trajectory {
  double sampling = 0;
  std::vector<Sample> samples;
  bool stopped = false;  // left the admissible or the controlled region
  std::string stop_reason;
};

/// Quantize, check ctrlRegion, apply ctrlLaw, step the plant; `horizon` steps.
Trajectory simulate(const PlantSim& plant, const BranchProgram& prog, const Quantization& q,
                    const std::vector<double>& x0, std::size_t horizon, double sampling);

bool in_region(const Region& r, const std::vector<VarId>& x, const std::vector<double>& values);

struct LoopMetrics {
  std::optional<double> setup_time;  // nullopt: never settles in the goal
  std::vector<double> ripple;        // per state variable, empty without setup
};

LoopMetrics loop_metrics(const Trajectory& traj, const Region& goal, const std::vector<VarId>& x);

/// Header t,<names>,action,in_goal and one line per sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& names,
                          const Region& goal, const std::vector<VarId>& x);

}  // namespace quantsyn
