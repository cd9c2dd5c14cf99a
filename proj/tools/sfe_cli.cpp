/*
Copyright 2026 The sfe Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Command-line front end for the simulation harness.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sfe/harness.hpp"

namespace {

using namespace sfe;

// Writes through `emit` to the file, or to stdout when the path is empty.
template <class F>
void output(const std::string& path, F&& emit) {
  if (path.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  emit(os);
}

json load_json(const std::string& path) {
  return detail::read_json_file(path, "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sound field estimation simulations"};
  app.require_subcommand(1);

  std::string config, out, json_out, plane = "xy", estimator;
  double freq = 0.0, radius = 1.0, c = 340.65, fmax = 1000.0, extent = 2.0, spacing = 0.05, offset = 0.0;
  int numax = 7, trial = 0;
  bool truth_only = false;

  auto* sweep = app.add_subcommand("sweep", "NMSE over frequencies, trials and estimators");
  sweep->add_option("config", config, "scenario JSON")->required();
  sweep->add_option("-o,--output", out, "results CSV (default stdout)");
  sweep->add_option("--json", json_out, "also write a JSON summary");

  auto* field = app.add_subcommand("field", "true and estimated field on a plane");
  field->add_option("config", config, "scenario JSON")->required();
  field->add_option("--freq", freq, "frequency in Hz")->required()->check(CLI::PositiveNumber);
  field->add_option("--plane", plane, "xy, xz or yz")->check(CLI::IsMember({"xy", "xz", "yz"}));
  field->add_option("--extent", extent, "side length in m")->check(CLI::PositiveNumber);
  field->add_option("--spacing", spacing, "grid spacing in m")->check(CLI::PositiveNumber);
  field->add_option("--offset", offset, "position along the normal axis in m");
  field->add_option("--estimator", estimator, "estimator id (default: first)");
  field->add_option("--trial", trial, "trial index")->check(CLI::NonNegativeNumber);
  field->add_flag("--truth-only", truth_only, "write only the true field");
  field->add_option("-o,--output", out, "field CSV (default stdout)");

  auto* forbidden = app.add_subcommand("forbidden", "frequencies where j_nu(kR) vanishes");
  forbidden->add_option("--radius", radius, "sphere radius in m")->check(CLI::PositiveNumber);
  forbidden->add_option("--c", c, "speed of sound in m/s")->check(CLI::PositiveNumber);
  forbidden->add_option("--numax", numax, "highest order")->check(CLI::NonNegativeNumber);
  forbidden->add_option("--fmax", fmax, "highest frequency in Hz")->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "pressure matching vs weighted pressure matching");
  synth->add_option("config", config, "synthesis JSON")->required();
  synth->add_option("-o,--output", out, "results CSV (default stdout)");

  auto* anc = app.add_subcommand("anc", "multipoint vs kernel-weighted noise control");
  anc->add_option("config", config, "ANC JSON")->required();
  anc->add_option("-o,--output", out, "results CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) {
      const auto recs = run_sweep(load_scenario(config));
      output(out, [&](std::ostream& os) { write_results_csv(os, recs); });
      if (!json_out.empty())
        output(json_out, [&](std::ostream& os) { os << results_to_json(recs).dump(2) << '\n'; });
    } else if (*field) {
      const auto cfg = load_scenario(config);
      PlaneSpec p{plane, extent, spacing, offset};
      std::vector<FieldSample> samples;
      if (truth_only) {
        samples = sample_plane(cfg, freq, p, nullptr);
      } else {
        const EstimatorSpec* est = &cfg.estimators.front();
        if (!estimator.empty()) {
          est = nullptr;
          for (const auto& e : cfg.estimators)
            if (e.id() == estimator) est = &e;
          if (!est) throw ConfigError("estimators", "no estimator with id '" + estimator + "'");
        }
        const auto res = run_trial(cfg, *est, freq, trial);
        samples = sample_plane(cfg, freq, p, &res.eval);
      }
      output(out, [&](std::ostream& os) { write_field_csv(os, samples); });
    } else if (*forbidden) {
      std::cout << "nu,frequency\n";
      for (const auto& ff : forbidden_frequencies(radius, c, numax, fmax))
        std::cout << ff.nu << ',' << fmt17(ff.frequency) << '\n';
    } else if (*synth) {
      const auto recs = run_synthesis(synthesis_from_json(load_json(config)));
      output(out, [&](std::ostream& os) { write_synthesis_csv(os, recs); });
    } else if (*anc) {
      const auto recs = run_anc(anc_from_json(load_json(config)));
      output(out, [&](std::ostream& os) { write_anc_csv(os, recs); });
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
