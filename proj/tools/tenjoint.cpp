// Copyright 2026 The tenjoint Authors.
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

// tenjoint: validate structures, run policies, probe compliance, and emit
// the reference elbow.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tenjoint/cli.hpp"

namespace {

tenjoint::Vec3 to_vec(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

}  // namespace

int main(int argc, char** argv) {
  using namespace tenjoint;
  CLI::App app{"Deterministic tensegrity elbow simulator"};
  app.require_subcommand(1);

  // validate
  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse a .tsg file and run the validator");
  validate->add_option("structure", validate_path, "Structure file")->required();

  // run
  cli::RunManifest manifest;
  manifest.output_dir = cli::default_output_dir();
  std::vector<double> gravity{0.0, 0.0, -9.81};
  auto* run = app.add_subcommand("run", "Settle, run a policy, export telemetry");
  run->add_option("--structure", manifest.structure_path, "Structure file")->required();
  run->add_option("--policy", manifest.policy,
                  "none | script:<csv> | <pair>:amp=<m>,period=<s>")
      ->capture_default_str();
  run->add_option("--dt", manifest.dt, "Time step (s)")->capture_default_str();
  run->add_option("--duration", manifest.duration, "Simulated time after settling (s)")
      ->capture_default_str();
  run->add_option("--gravity", gravity, "Gravity vector (m/s^2)")->expected(3);
  run->add_option("--out", manifest.output_dir, "Output directory (default $TENJOINT_OUT)");
  run->add_option("--settle-tol", manifest.settle.tolerance, "Settling speed tolerance (m/s)")
      ->capture_default_str();
  run->add_option("--settle-timeout", manifest.settle.timeout, "Settling timeout (s)")
      ->capture_default_str();

  // probe
  std::string probe_path;
  std::vector<double> force{0.0, 0.0, -1.0};
  SimConfig probe_config;
  SettleOptions probe_settle;
  auto* probe = app.add_subcommand("probe", "Apply a static end-effector force");
  probe->add_option("structure", probe_path, "Structure file")->required();
  probe->add_option("--force", force, "Force (N)")->expected(3)->allow_extra_args(false);
  probe->add_option("--dt", probe_config.dt, "Time step (s)")->capture_default_str();
  probe->add_option("--settle-tol", probe_settle.tolerance, "Settling speed tolerance (m/s)")
      ->capture_default_str();
  probe->add_option("--settle-timeout", probe_settle.timeout, "Settling timeout (s)")
      ->capture_default_str();

  // emit-elbow
  ElbowParams params;
  std::string emit_path = "elbow.tsg";
  std::vector<double> mount_translation{0.0, 0.0, 0.0};
  std::vector<double> mount_rotation{0.0, 0.0, 1.0, 0.0};
  auto* emit = app.add_subcommand("emit-elbow", "Write the reference elbow as a .tsg file");
  emit->add_option("--out", emit_path, "Output file")->capture_default_str();
  emit->add_option("--humerus-length", params.humerus_length)->capture_default_str();
  emit->add_option("--olecranon-length", params.olecranon_length)->capture_default_str();
  emit->add_option("--forearm-length", params.forearm_length)->capture_default_str();
  emit->add_option("--humerus-mass", params.humerus_mass)->capture_default_str();
  emit->add_option("--olecranon-mass", params.olecranon_mass)->capture_default_str();
  emit->add_option("--forearm-mass", params.forearm_mass)->capture_default_str();
  emit->add_option("--radius", params.rod_radius)->capture_default_str();
  emit->add_option("--active-k", params.active_k)->capture_default_str();
  emit->add_option("--passive-k", params.passive_k)->capture_default_str();
  emit->add_option("--damping", params.damping)->capture_default_str();
  emit->add_option("--pretension", params.pretension, "Equilibrium target tension (N)")
      ->capture_default_str();
  emit->add_option("--pretension-offset", params.pretension_offset,
                   "Co-contraction of the active pairs (m)")
      ->capture_default_str();
  emit->add_option("--active-range", params.active_range, "Active rest-length envelope (m)")
      ->capture_default_str();
  emit->add_option("--motor-vmax", params.motor_max_velocity)->capture_default_str();
  emit->add_option("--motor-amax", params.motor_max_acceleration)->capture_default_str();
  emit->add_flag("--mirror", params.mirrored, "Reflect across the sagittal plane");
  emit->add_option("--mount-translation", mount_translation, "Mount offset (m)")->expected(3);
  emit->add_option("--mount-rotation", mount_rotation, "Mount rotation: axis x y z, angle (deg)")
      ->expected(4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  try {
    if (*validate) return cli::cmd_validate(validate_path, std::cout, std::cerr);
    if (*run) {
      manifest.gravity = to_vec(gravity);
      return cli::cmd_run(manifest, std::cout, std::cerr);
    }
    if (*probe) return cli::cmd_probe(probe_path, to_vec(force), probe_config, probe_settle,
                                      std::cout, std::cerr);
    if (*emit) {
      const Vec3 axis(mount_rotation[0], mount_rotation[1], mount_rotation[2]);
      if (!(axis.norm() > 0.0)) {
        std::cerr << "error: mount rotation axis must be non-zero\n";
        return cli::kExitUsage;
      }
      params.mount.rotation = axis_angle(axis, mount_rotation[3] * kPi / 180.0);
      params.mount.translation = to_vec(mount_translation);
      return cli::cmd_emit_elbow(params, emit_path, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitFailure;
  }
  return cli::kExitUsage;
}
