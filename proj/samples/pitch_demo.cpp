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

// Flexes the reference elbow with the built-in pitch policy and prints the
// pitch trace at 0.25 s intervals. Pass a path to also write the telemetry CSV.

#include <cstdio>
#include <exception>

#include "tenjoint/controllers.hpp"
#include "tenjoint/elbow.hpp"
#include "tenjoint/telemetry.hpp"

int main(int argc, char** argv) {
  using namespace tenjoint;
  try {
    const Structure elbow = build_elbow();
    const Model model(elbow);
    const SimConfig config;

    SettleResult rest = settle(model, initial_state(elbow), config);
    std::printf("settled=%s after %.3f s\n", rest.settled ? "yes" : "no", rest.elapsed);
    rest.state.time = 0.0;

    const Policy policy = periodic_pair_policy(elbow, "pitch", 0.02, 4.0);
    const TelemetryRecord rec = run_policy(model, rest.state, policy, config, {8.0, true});

    for (std::size_t i = 0; i < rec.rows.size(); i += 250) {
      const TelemetryRow& r = rec.rows[i];
      std::printf("t=%5.2f  pitch=%7.2f deg  ee=(%.4f, %.4f, %.4f)\n", r.time,
                  r.pitch * 180.0 / kPi, r.end_effector.x(), r.end_effector.y(),
                  r.end_effector.z());
    }
    const Summary s = summarize(rec);
    std::printf("pitch range %.2f deg, yaw range %.2g deg, min clearance %.4f m\n",
                s.pitch_range * 180.0 / kPi, s.yaw_range * 180.0 / kPi, s.min_clearance);

    if (argc > 1) export_csv(rec, argv[1]);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
