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

#include "quantsyn/lts.hpp"
#include "quantsyn/model_file.hpp"
#include "quantsyn/pipeline.hpp"
#include "quantsyn/report.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace {

using namespace quantsyn;

struct Options {
  std::string builtin;
  std::string model_file;
  std::vector<unsigned> bits;
  std::string algo = "mgo";
  std::string priority;
  std::size_t horizon = 0;
  std::string out_dir;
  unsigned jobs = 1;
  std::uint64_t seed = 1;
  std::string force = "2";
  std::string sampling;
  std::string rho;
  unsigned inputs = 1;
  std::string x0;
  bool exact_images = false;
  std::string self_loops = "certificate";
};

struct Problem {
  ModelInstance model;
  std::shared_ptr<const PlantSim> plant;
  std::vector<double> x0;
  std::size_t horizon = 0;
};

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(parse_rational(item)));
  return out;
}

std::vector<std::uint64_t> parse_priority(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  return out;
}

Problem make_problem(const Options& o, unsigned bits) {
  Problem p;
  if (!o.model_file.empty()) {
    std::ifstream in(o.model_file);
    if (!in) throw std::runtime_error("cannot read " + o.model_file);
    std::stringstream ss;
    ss << in.rdbuf();
    p.model = parse_model(ss.str(), bits == 0 ? std::nullopt : std::optional<unsigned>(bits)).model;
    p.horizon = 4000;
  } else if (o.builtin == "pendulum") {
    const Rational force = parse_rational(o.force);
    const Rational t = o.sampling.empty() ? (bits <= 10 ? Rational(1, 10) : Rational(1, 100)) : parse_rational(o.sampling);
    const Rational rho = o.rho.empty() ? Rational(1, 10) : parse_rational(o.rho);
    p.model = pendulum_model(force, t, bits, rho);
    p.plant = pendulum_plant(p.model.quantization, to_double(force), to_double(t));
    p.x0 = {3.14159, 0.0};
    p.horizon = 4000;
  } else if (o.builtin == "buck") {
    const Rational t = o.sampling.empty() ? Rational(1, 1000000) : parse_rational(o.sampling);
    const Rational rho = o.rho.empty() ? Rational(1, 100) : parse_rational(o.rho);
    p.model = buck_model(o.inputs, t, bits, rho);
    p.x0 = {0.0, 0.0};
    p.horizon = 50000;
  } else if (o.builtin == "scalar") {
    const Rational t = o.sampling.empty() ? Rational(1, 100) : parse_rational(o.sampling);
    const Rational eps = o.rho.empty() ? Rational(1, 4) : parse_rational(o.rho);
    p.model = scalar_model(t, eps, bits);
    p.x0 = {2.4};
    p.horizon = 4000;
  } else {
    throw UsageError("give a model file or --builtin pendulum|buck|scalar");
  }
  if (!o.x0.empty()) p.x0 = parse_point(o.x0);
  if (o.horizon) p.horizon = o.horizon;
  return p;
}

AbstractionOptions abstraction_options(const Options& o) {
  AbstractionOptions a;
  a.image = o.exact_images ? ImageMethod::exact : ImageMethod::interval;
  if (o.self_loops == "keep") {
    a.self_loops = SelfLoopMode::keep;
  } else if (o.self_loops == "certificate") {
    a.self_loops = SelfLoopMode::certificate;
  } else if (o.self_loops == "exact") {
    a.self_loops = SelfLoopMode::exact_certificate;
  } else {
    throw UsageError("unknown self-loop mode '" + o.self_loops + "'");
  }
  return a;
}

std::vector<Algorithm> algorithms(const Options& o) {
  if (o.algo == "both") return {Algorithm::mgo, Algorithm::small};
  return {parse_algorithm(o.algo)};
}

unsigned default_bits(const Options& o) {
  if (!o.bits.empty()) return o.bits.front();
  if (o.builtin == "scalar") return 3;
  if (o.builtin.empty()) return 0;
  return 8;
}

/// Runs every (bits, algorithm) combination; the abstraction is shared by the
/// algorithms of one resolution.
std::vector<PipelineResult> run_all(const Options& o, bool simulate, std::vector<ReportRow>& rows) {
  std::vector<unsigned> bits = o.bits;
  if (bits.empty()) bits.push_back(default_bits(o));
  const auto algos = algorithms(o);
  std::vector<std::vector<PipelineResult>> results(bits.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= bits.size()) return;
      try {
        const Problem p = make_problem(o, bits[i]);
        const AbstractLts abs = abstract_model(p.model, abstraction_options(o));
        for (Algorithm a : algos) {
          PipelineOptions po;
          po.algo = a;
          po.priority = parse_priority(o.priority);
          po.bits = bits[i];
          po.out_dir = o.out_dir;
          if (simulate) po.x0 = p.x0;
          po.horizon = p.horizon;
          po.plant = p.plant;
          results[i].push_back(run_on_abstraction(p.model, abs, po));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(bits.size())));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  std::vector<PipelineResult> flat;
  for (auto& r : results) {
    for (auto& x : r) {
      rows.push_back(x.row);
      flat.push_back(std::move(x));
    }
  }
  return flat;
}

int exit_status(const std::vector<ReportRow>& rows) {
  for (const auto& r : rows) {
    if (!r.synthesized) return 2;
  }
  return 0;
}

int selftest(const Options& o) {
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "PASS " : "FAIL ") << what << '\n';
    if (!ok) ++failures;
  };
  const LtsFixture fx = example_lts();
  const StateSet all{0, 1, 2, 3, 4};
  const AbstractLts abs = from_explicit(fx.lts, all, fx.goal);
  const ControllerRel mgo = decode_controller(abs, mgo_ctr(abs).controller);
  check(mgo == ControllerRel{{0, 0}, {0, 1}, {1, 0}, {2, 0}, {3, 1}, {4, 1}}, "example mgo controller");
  const ControllerRel small = decode_controller(abs, small_ctr(abs, {0, 1}).controller);
  check(small == ControllerRel{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 1}}, "example small controller");
  std::size_t agree = 0;
  const std::size_t runs = 50;
  for (std::size_t i = 0; i < runs; ++i) {
    const LtsFixture r = random_lts(16, 3, 0.2, o.seed + i);
    StateSet init;
    for (unsigned s = 0; s < 16; ++s) init.insert(s);
    const AbstractLts ra = from_explicit(r.lts, init, r.goal);
    const ExplicitSynthesis oracle = mgo_oracle(r.lts, init, r.goal);
    if (decode_controller(ra, mgo_ctr(ra).controller) == oracle.controller) ++agree;
  }
  check(agree == runs, "symbolic mgo matches the explicit oracle on random systems");
  return failures == 0 ? 0 : 1;
}

void add_model_options(CLI::App* cmd, Options& o, bool many_bits) {
  cmd->add_option("model", o.model_file, "model file");
  cmd->add_option("--builtin", o.builtin, "built-in model")->check(CLI::IsMember({"pendulum", "buck", "scalar"}));
  if (many_bits) {
    cmd->add_option("--bits", o.bits, "quantization bits (one or more)");
  } else {
    cmd->add_option("--bits", o.bits, "quantization bits")->expected(1);
  }
  cmd->add_option("--algo", o.algo, "mgo, small or both")->check(CLI::IsMember({"mgo", "small", "both"}));
  cmd->add_option("--priority", o.priority, "action codes of the small controller, highest priority first");
  cmd->add_option("--out-dir", o.out_dir, "directory for generated files");
  cmd->add_option("--jobs", o.jobs, "parallel runs")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--force", o.force, "pendulum force intensity");
  cmd->add_option("--sampling", o.sampling, "sampling time");
  cmd->add_option("--rho", o.rho, "goal radius");
  cmd->add_option("--inputs", o.inputs, "buck converter inputs")->check(CLI::PositiveNumber);
  cmd->add_option("--x0", o.x0, "initial state for simulation, comma separated");
  cmd->add_option("--horizon", o.horizon, "simulation steps");
  cmd->add_flag("--exact-images", o.exact_images, "bound images with linear programs");
  cmd->add_option("--self-loops", o.self_loops, "keep, certificate or exact");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantsyn: quantized controller synthesis and code generation"};
  app.require_subcommand(1);
  Options o;
  auto* synth = app.add_subcommand("synthesize", "synthesize a controller and print its summary");
  auto* codegen = app.add_subcommand("codegen", "synthesize and emit C control software");
  auto* sim = app.add_subcommand("simulate", "synthesize, emit and simulate the closed loop");
  auto* report = app.add_subcommand("report", "table over resolutions and algorithms");
  auto* self = app.add_subcommand("selftest", "run built-in consistency checks");
  add_model_options(synth, o, false);
  add_model_options(codegen, o, false);
  add_model_options(sim, o, false);
  add_model_options(report, o, true);
  self->add_option("--seed", o.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (self->parsed()) return selftest(o);
    std::vector<ReportRow> rows;
    if (synth->parsed()) {
      run_all(o, false, rows);
      write_report_text(std::cout, rows);
    } else if (codegen->parsed()) {
      const auto results = run_all(o, false, rows);
      for (const auto& r : results) {
        if (o.out_dir.empty() && r.emission) std::cout << r.emission->source.text;
      }
      if (!o.out_dir.empty()) write_report_text(std::cout, rows);
    } else if (sim->parsed()) {
      const auto results = run_all(o, true, rows);
      write_report_text(std::cout, rows);
      for (const auto& r : results) {
        if (!r.trajectory) continue;
        std::cout << r.row.algo << ": ";
        if (r.trajectory->stopped) std::cout << "stopped (" << r.trajectory->stop_reason << "), ";
        if (r.row.setup_time) {
          std::cout << "setup time " << *r.row.setup_time << " s, ripple";
          for (double v : r.row.ripple) std::cout << ' ' << v;
        } else {
          std::cout << "never settles in the goal";
        }
        std::cout << '\n';
      }
    } else if (report->parsed()) {
      run_all(o, false, rows);
      write_report_text(std::cout, rows);
      if (!o.out_dir.empty()) {
        std::ofstream csv(o.out_dir + "/report.csv");
        write_report_csv(csv, rows);
      }
    }
    return exit_status(rows);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
