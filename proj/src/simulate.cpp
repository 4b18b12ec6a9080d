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

#include "quantsyn/simulate.hpp"

#include "quantsyn/models.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

namespace quantsyn {

namespace {

class PendulumPlant : public PlantSim {
 public:
  PendulumPlant(const Quantization& q, double force, double sampling)
      : force_(force), sampling_(sampling), period_(2 * to_double(pendulum_pi())) {
    for (std::uint64_t a = 0; a < q.action_code_count(); ++a) {
      const auto values = q.action_values(a);
      inputs_.push_back(values ? std::optional<double>(to_double(values->at(0))) : std::nullopt);
    }
  }

  std::string flavor() const override { return "nonlinear-pendulum"; }

  std::optional<std::vector<double>> step(const std::vector<double>& x, std::uint64_t action) const override {
    if (action >= inputs_.size() || !inputs_[action]) return std::nullopt;
    double x1 = x.at(0) + sampling_ * x.at(1);
    const double x2 = x.at(1) + sampling_ * std::sin(x.at(0)) + sampling_ * force_ * *inputs_[action];
    const double half = period_ / 2;
    if (x1 > half) x1 -= period_;
    if (x1 < -half) x1 += period_;
    return std::vector<double>{x1, x2};
  }

 private:
  double force_;
  double sampling_;
  double period_;
  std::vector<std::optional<double>> inputs_;
};

struct AffineRow {
  std::vector<double> coeffs;  // per state variable
  double constant = 0;
};

struct DoubleMode {
  std::vector<AffineRow> conditions;  // row . x + constant <= 0
  std::vector<AffineRow> next;
};

class DeterminizedPlant : public PlantSim {
 public:
  DeterminizedPlant(const Dtlhs& h, const Quantization& q) {
    Abstractor abs(h, q);
    const auto& x = h.x();
    auto row = [&](const LinearExpression& e, const Rational& bound) {
      AffineRow r;
      r.coeffs.assign(x.size(), 0.0);
      r.constant = to_double(e.constant() - bound);
      for (const auto& [id, k] : e.terms()) {
        const auto it = std::find(x.begin(), x.end(), id);
        if (it == x.end()) {
          throw UsageError("variable '" + h.vars()[id].name + "' is not determined by the state");
        }
        r.coeffs[static_cast<std::size_t>(it - x.begin())] = to_double(k);
      }
      return r;
    };
    for (std::uint64_t a = 0; a < q.action_code_count(); ++a) {
      std::vector<AffineMode> ms = abs.modes(a);
      std::stable_sort(ms.begin(), ms.end(),
                       [](const AffineMode& l, const AffineMode& r) { return l.assignment > r.assignment; });
      std::vector<DoubleMode> dm;
      for (const auto& m : ms) {
        DoubleMode d;
        for (const auto& c : m.conditions) d.conditions.push_back(row(c.expr, c.bound));
        for (const auto& n : m.next) {
          if (!n) throw UsageError("next state is not defined by an equality");
          d.next.push_back(row(*n, Rational(0)));
        }
        dm.push_back(std::move(d));
      }
      modes_.push_back(std::move(dm));
    }
  }

  std::string flavor() const override { return "linear-dtlhs-determinized"; }

  std::optional<std::vector<double>> step(const std::vector<double>& x, std::uint64_t action) const override {
    if (action >= modes_.size()) return std::nullopt;
    auto eval = [&](const AffineRow& r) {
      double s = r.constant;
      for (std::size_t i = 0; i < x.size(); ++i) s += r.coeffs[i] * x[i];
      return s;
    };
    for (const DoubleMode& m : modes_[action]) {
      const bool holds = std::all_of(m.conditions.begin(), m.conditions.end(), [&](const AffineRow& r) {
        return eval(r) <= 1e-9 * (1 + std::abs(r.constant));
      });
      if (!holds) continue;
      std::vector<double> out;
      for (const auto& n : m.next) out.push_back(eval(n));
      return out;
    }
    return std::nullopt;
  }

 private:
  std::vector<std::vector<DoubleMode>> modes_;
};

}  // namespace

std::unique_ptr<PlantSim> pendulum_plant(const Quantization& q, double force, double sampling) {
  return std::make_unique<PendulumPlant>(q, force, sampling);
}

std::unique_ptr<PlantSim> determinized_plant(const Dtlhs& h, const Quantization& q) {
  return std::make_unique<DeterminizedPlant>(h, q);
}

Trajectory simulate(const PlantSim& plant, const BranchProgram& prog, const Quantization& q,
                    const std::vector<double>& x0, std::size_t horizon, double sampling) {
  if (x0.size() != q.state().size()) throw UsageError("initial state has the wrong dimension");
  Trajectory traj;
  traj.sampling = sampling;
  std::vector<double> x = x0;
  for (std::size_t k = 0;; ++k) {
    Sample s{static_cast<double>(k) * sampling, x, std::nullopt};
    if (k == horizon) {
      traj.samples.push_back(std::move(s));
      break;
    }
    std::uint64_t code = 0;
    bool admissible = true;
    for (std::size_t i = 0; i < x.size() && admissible; ++i) {
      const auto c = std::isfinite(x[i]) ? q.state()[i].code(x[i]) : std::nullopt;
      if (!c) {
        admissible = false;
        break;
      }
      code = (code << q.state()[i].bits) | *c;
    }
    if (!admissible) {
      traj.samples.push_back(std::move(s));
      traj.stopped = true;
      traj.stop_reason = "state left the admissible region";
      break;
    }
    s.action = interpret(prog, code);
    if (!s.action) {
      traj.samples.push_back(std::move(s));
      traj.stopped = true;
      traj.stop_reason = "state left the controlled region";
      break;
    }
    const auto next = plant.step(x, *s.action);
    traj.samples.push_back(std::move(s));
    if (!next) {
      traj.stopped = true;
      traj.stop_reason = "plant has no behavior at this state";
      break;
    }
    x = *next;
  }
  return traj;
}

bool in_region(const Region& r, const std::vector<VarId>& x, const std::vector<double>& values) {
  Valuation v;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(values.at(i))) return false;
    v[x[i]] = from_double(values[i]);
  }
  return contains(r, v);
}

LoopMetrics loop_metrics(const Trajectory& traj, const Region& goal, const std::vector<VarId>& x) {
  LoopMetrics m;
  if (traj.samples.empty() || traj.stopped) return m;
  std::size_t first = traj.samples.size();
  while (first > 0 && in_region(goal, x, traj.samples[first - 1].x)) --first;
  if (first == traj.samples.size()) return m;
  m.setup_time = traj.samples[first].t;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lo = traj.samples[first].x[i], hi = lo;
    for (std::size_t k = first; k < traj.samples.size(); ++k) {
      lo = std::min(lo, traj.samples[k].x[i]);
      hi = std::max(hi, traj.samples[k].x[i]);
    }
    m.ripple.push_back(hi - lo);
  }
  return m;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& names,
                          const Region& goal, const std::vector<VarId>& x) {
  os << "t";
  for (const auto& n : names) os << ',' << n;
  os << ",action,in_goal\n";
  const auto flags = os.flags();
  os << std::setprecision(10);
  for (const Sample& s : traj.samples) {
    os << s.t;
    for (double v : s.x) os << ',' << v;
    os << ',';
    if (s.action) os << *s.action;
    os << ',' << (in_region(goal, x, s.x) ? 1 : 0) << '\n';
  }
  os.flags(flags);
}

}  // namespace quantsyn
