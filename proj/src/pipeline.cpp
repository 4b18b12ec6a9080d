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

#include "quantsyn/pipeline.hpp"

#include <filesystem>
#include <fstream>

namespace quantsyn {

std::string algorithm_name(Algorithm a) { return a == Algorithm::mgo ? "mgo" : "small"; }

Algorithm parse_algorithm(const std::string& name) {
  if (name == "mgo") return Algorithm::mgo;
  if (name == "small" || name == "sc") return Algorithm::small;
  throw UsageError("unknown algorithm '" + name + "' (expected mgo or small)");
}

AbstractLts abstract_model(const ModelInstance& m, const AbstractionOptions& options) {
  return build_abstraction(m.plant, m.quantization, m.init, m.goal, options);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

PipelineResult run_on_abstraction(const ModelInstance& m, const AbstractLts& abs, const PipelineOptions& options) {
  PipelineResult r;
  ReportRow& row = r.row;
  row.model = m.name;
  row.bits = options.bits;
  row.algo = algorithm_name(options.algo);
  row.abstraction_secs = abs.stats.seconds;
  r.synthesis = options.algo == Algorithm::mgo ? mgo_ctr(abs) : small_ctr(abs, options.priority);
  const SynthesisResult& s = r.synthesis;
  row.synthesized = s.initial_controllable && !abs.goal.is_false();
  row.synthesis_secs = s.elapsed;
  row.init_states = abs.count_states(abs.init);
  row.domain_states = abs.count_states(s.domain);
  row.controller_nodes = s.controller.node_count();
  if (row.domain_states > 0) {
    row.path = avg_worst_case_path(abs, s.controller);
    r.law = extract_law(abs, s.controller);
    r.emission = emit(*r.law);
    const Footprint fp = footprint(r.emission->source);
    row.src_bytes = fp.bytes;
    row.blocks = fp.block_count;
    row.height = fp.height;
  }
  row.peak_nodes = abs.mgr->stats().peak_nodes;

  const std::vector<std::string> names = [&] {
    std::vector<std::string> n;
    for (VarId id : m.plant.x()) n.push_back(m.plant.vars()[id].name);
    return n;
  }();
  if (options.x0 && r.emission) {
    std::shared_ptr<const PlantSim> plant = options.plant;
    if (!plant) plant = determinized_plant(m.plant, m.quantization);
    r.trajectory = simulate(*plant, r.emission->program, m.quantization, *options.x0, options.horizon,
                            to_double(m.sampling));
    r.metrics = loop_metrics(*r.trajectory, m.goal, m.plant.x());
    row.setup_time = r.metrics->setup_time;
    row.ripple = r.metrics->ripple;
  }

  if (!options.out_dir.empty()) {
    const std::filesystem::path dir(options.out_dir);
    std::filesystem::create_directories(dir);
    const std::string stem = m.name + "_" + row.algo + "_" + std::to_string(options.bits);
    if (r.emission) write_file(dir / source_file_name(m.name, row.algo, options.bits), r.emission->source.text);
    if (r.trajectory) {
      std::ofstream out(dir / (stem + "_traj.csv"));
      write_trajectory_csv(out, *r.trajectory, names, m.goal, m.plant.x());
    }
  }
  return r;
}

PipelineResult run_pipeline(const ModelInstance& m, const PipelineOptions& options,
                            const AbstractionOptions& abstraction) {
  const AbstractLts abs = abstract_model(m, abstraction);
  return run_on_abstraction(m, abs, options);
}

}  // namespace quantsyn
