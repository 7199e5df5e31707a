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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tenjoint/cli.hpp"

namespace tenjoint::acceptance {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rad2deg(double r) { return r * 180.0 / kPi; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Shared reference elbow, settled once.
struct Reference {
  Structure structure = build_elbow();
  Model model{structure};
  SimConfig config;
  SimState settled;

  Reference() {
    const SettleResult r = settle(model, initial_state(structure), config);
    if (!r.settled) throw Error("reference elbow did not settle");
    settled = r.state;
    settled.time = 0.0;
  }
};

// Smallest rod-rod distance observed by any elbow run.
double g_min_clearance = std::numeric_limits<double>::infinity();

void observe(const TelemetryRecord& r) {
  for (const TelemetryRow& row : r.rows) g_min_clearance = std::min(g_min_clearance, row.min_clearance);
}
void observe(const Model& m, const SimState& s) {
  g_min_clearance = std::min(g_min_clearance, min_rod_clearance(m, s));
}

Structure pendulum(double mass, double k, double b, double rest) {
  Structure s;
  s = add_rod(s, {"top", {0, 0, 1}, {0, 0, 2}, 1.0, 0.01});
  s = add_rod(s, {"bob", {0, 0, 1 - rest}, {0, 0, 1 - rest - 0.1}, mass, 0.001});
  s = add_fixed(s, {"top", EndpointTag::A});
  s = add_fixed(s, {"top", EndpointTag::B});
  s = add_cable(s, passive_cable("c", Anchor::rod("top", EndpointTag::A),
                                 Anchor::rod("bob", EndpointTag::A), k, b, rest));
  return s;
}

Outcome cable_force_oracle() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  int slack = 0;
  for (int i = 0; i < 1000; ++i) {
    const double k = 1.0 + 999.0 * (0.5 + 0.5 * unit(rng));
    const double b = 10.0 * (0.5 + 0.5 * unit(rng));
    const double rest = 0.1 + 0.5 * (0.5 + 0.5 * unit(rng));
    const Vec3 pa(unit(rng), unit(rng), unit(rng));
    const Vec3 dir = Vec3(unit(rng), unit(rng), unit(rng)).normalized();
    const double len = rest * (1.0 + 0.2 * unit(rng));
    const Vec3 pb = pa + len * dir;
    const Vec3 va(unit(rng), unit(rng), unit(rng)), vb(unit(rng), unit(rng), unit(rng));
    const CableSpec spec = passive_cable("c", Anchor::rod("a", EndpointTag::A),
                                         Anchor::rod("b", EndpointTag::A), k, b, rest);
    const CableForce f = cable_force(spec, pa, pb, va, vb);
    // Direct evaluation from the anchor data the library sees.
    const Vec3 d = pb - pa;
    const double length = std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
    const Vec3 u = d / length;
    const double rate = (vb.x() - va.x()) * u.x() + (vb.y() - va.y()) * u.y() + (vb.z() - va.z()) * u.z();
    const double expect = oracle::tension(k, b, length, rest, rate);
    if (expect == 0.0) {
      ++slack;
      if (f.state.tension != 0.0 || f.on_a != Vec3::Zero() || f.on_b != Vec3::Zero())
        return {false, "draw " + std::to_string(i) + ": slack cable carries force"};
      continue;
    }
    worst = std::max(worst, std::abs(f.state.tension - expect) / expect);
    worst = std::max(worst, (f.on_a - expect * u).norm() / expect);
  }
  return {worst <= 1e-12 && slack > 0,
          "max rel error " + num(worst) + ", " + std::to_string(slack) + " slack draws exactly zero"};
}

Outcome damped_oscillator() {
  const double mass = 1.0, k = 100.0, b = 2.0, rest = 0.5, x0 = -0.02;
  const Structure s = pendulum(mass, k, b, rest);
  const Model m(s);
  const SimConfig cfg{1e-4, Vec3(0, 0, -9.81)};
  SimState st = initial_state(s);
  const double eq = oracle::hang_extension(mass, k, 9.81);
  const double z_eq = s.rods()[1].center().z() - eq;
  st.rods[1].position.z() = z_eq + x0;
  const auto steps = static_cast<int>(std::lround(5.0 * oracle::damped_period(mass, k, b) / cfg.dt));
  double sq = 0.0;
  for (int n = 0; n < steps; ++n) {
    const double e = st.rods[1].position.z() - z_eq - oracle::underdamped(mass, k, b, x0, 0.0, st.time);
    sq += e * e;
    st = step(m, st, cfg);
  }
  const double rms = std::sqrt(sq / steps) / std::abs(x0);
  return {rms < 0.01, "RMS error " + num(100.0 * rms) + "% of amplitude over 5 periods"};
}

Outcome static_hang() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mass_d(0.1, 2.0), k_d(200.0, 2000.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double mass = mass_d(rng), k = k_d(rng);
    const double b = 2.0 * std::sqrt(k * mass);  // critical: settles quickly
    const Structure s = pendulum(mass, k, b, 0.5);
    const Model m(s);
    const SettleResult r = settle(m, initial_state(s), SimConfig{}, {1e-6, 30.0});
    if (!r.settled) return {false, "hang " + std::to_string(i) + " did not settle"};
    const double ext = cable_states(m, r.state)[0].extension;
    const double expect = oracle::hang_extension(mass, k, 9.81);
    worst = std::max(worst, std::abs(ext - expect) / expect);
  }
  return {worst <= 0.005, "worst relative error " + num(100.0 * worst) + "% over 10 (m, k)"};
}

Outcome momentum() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Structure s;
  for (int i = 0; i < 5; ++i)
    s = add_rod(s, {"r" + std::to_string(i), Vec3(i, u(rng), u(rng)), Vec3(i + 0.5, u(rng), u(rng)),
                    0.2 + 0.5 * (1.0 + u(rng)), 0.01});
  int c = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      const Anchor a = Anchor::rod("r" + std::to_string(i), EndpointTag::B);
      const Anchor b = Anchor::rod("r" + std::to_string(j), j % 2 ? EndpointTag::A : EndpointTag::B);
      const double len = (s.anchor_position(b) - s.anchor_position(a)).norm();
      s = add_cable(s, passive_cable("c" + std::to_string(c++), a, b, 80, 0.3, 0.8 * len));
    }
  const Model m(s);
  SimState st = initial_state(s);
  Vec3 p = Vec3::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < st.rods.size(); ++i) {
    st.rods[i].linear_velocity = Vec3(u(rng), u(rng), u(rng));
    st.rods[i].angular_velocity = Vec3(u(rng), u(rng), u(rng));
    p += m.rods()[i].mass * st.rods[i].linear_velocity;
    total += m.rods()[i].mass;
  }
  for (auto& r : st.rods) r.linear_velocity -= p / total;
  const SimConfig cfg{1e-3, Vec3::Zero()};
  double worst = linear_momentum(m, st).norm();
  for (int i = 0; i < 1000; ++i) {
    st = step(m, st, cfg);
    worst = std::max(worst, linear_momentum(m, st).norm());
  }
  return {worst <= 1e-9, "max |p| " + num(worst) + " kg m/s over 1000 steps"};
}

// Ends a 0.5 s push of `force` at the end-effector.
SimState pushed(const Reference& ref, const Vec3& force) {
  const std::size_t ee = end_effector_rod(ref.structure);
  const PointLoad load{ref.structure.rods()[ee].name, EndpointTag::B, force};
  SimState st = ref.settled;
  for (int i = 0; i < 500; ++i) {
    st = step(ref.model, st, {}, ref.config, std::span<const PointLoad>(&load, 1));
    observe(ref.model, st);
  }
  return st;
}

Outcome dissipation(const Reference& ref) {
  SimState st = pushed(ref, Vec3(0.6, -0.8, 0.0));
  const int per_window = 100;
  double prev = total_energy(ref.model, st, ref.config);
  const double start = prev;
  double worst_rise = -std::numeric_limits<double>::infinity();
  for (int w = 0; w < 100; ++w) {
    for (int i = 0; i < per_window; ++i) st = step(ref.model, st, ref.config);
    observe(ref.model, st);
    const double e = total_energy(ref.model, st, ref.config);
    worst_rise = std::max(worst_rise, e - prev);
    prev = e;
  }
  return {worst_rise <= 1e-9 && prev < start,
          "energy " + num(start) + " -> " + num(prev) + " J, largest window change " +
              num(worst_rise) + " J"};
}

Outcome restoration(const Reference& ref) {
  const Vec3 origin = end_effector(ref.model, ref.settled);
  double worst = 0.0;
  for (const Vec3& f : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)}) {
    SimState st = pushed(ref, f);
    for (int i = 0; i < 5000; ++i) st = step(ref.model, st, ref.config);
    observe(ref.model, st);
    worst = std::max(worst, (end_effector(ref.model, st) - origin).norm());
  }
  return {worst < 1e-3, "worst offset 5 s after release " + num(1e3 * worst) + " mm"};
}

std::vector<double> column(const TelemetryRecord& r, double TelemetryRow::*field) {
  std::vector<double> out;
  for (const TelemetryRow& row : r.rows) out.push_back(row.*field);
  return out;
}
std::vector<double> times(const TelemetryRecord& r) { return column(r, &TelemetryRow::time); }

struct Runs {
  TelemetryRecord pitch, yaw;
};

Outcome pitch_actuation(const Reference& ref, Runs& runs) {
  runs.pitch = run_policy(ref.model, ref.settled,
                          periodic_pair_policy(ref.structure, "pitch", 0.02, 4.0), ref.config,
                          {12.0, true});
  observe(runs.pitch);
  const Summary sum = summarize(runs.pitch);
  const auto period = estimate_period(times(runs.pitch), column(runs.pitch, &TelemetryRow::pitch));
  const double sweep = rad2deg(sum.pitch_range);
  const bool periodic = period && std::abs(*period - 4.0) <= 0.02 * 4.0;
  return {sweep >= 40.0 && periodic,
          "sweep " + num(sweep) + " deg, period " + (period ? num(*period) : "none") + " s"};
}

Outcome yaw_actuation(const Reference& ref, Runs& runs) {
  runs.yaw = run_policy(ref.model, ref.settled, periodic_pair_policy(ref.structure, "yaw", 0.02, 4.0),
                        ref.config, {8.0, true});
  observe(runs.yaw);
  const Vec3 n = fit_plane_normal(end_effector_path(runs.yaw));
  const double tilt = rad2deg(std::acos(std::clamp(std::abs(n.z()), 0.0, 1.0)));
  const Summary p = summarize(runs.pitch);
  const double drift = p.yaw_range / p.pitch_range;
  return {tilt <= 15.0 && drift < 0.2, "yaw plane tilt " + num(tilt) + " deg (yaw sweep " +
                                           num(rad2deg(summarize(runs.yaw).yaw_range)) +
                                           " deg), pitch-only yaw/pitch " + num(100.0 * drift) + "%"};
}

Outcome compliance(const Reference& ref) {
  std::string detail;
  bool ok = true;
  const char* axis = "xyz";
  for (int a = 0; a < 3; ++a) {
    Vec3 f = Vec3::Zero();
    f[a] = 1.0;
    const ProbeResult r = probe_compliance(ref.model, ref.settled, f, ref.config);
    observe(ref.model, r.loaded);
    observe(ref.model, r.released);
    const double d = r.displacement.norm();
    ok = ok && r.loaded_settled && d > 5e-4 && r.restored();
    detail += std::string(a ? ", " : "") + axis[a] + " " + num(1e3 * d) + " mm (restored to " +
              num(1e3 * r.restoration_error) + " mm)";
  }
  return {ok, detail};
}

Outcome clearance() {
  return {g_min_clearance > 0.0, "min rod-rod distance " + num(1e3 * g_min_clearance) + " mm"};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tenjoint_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ostringstream out, err;
  const std::string tsg = (dir / "elbow.tsg").string();
  if (cli::cmd_emit_elbow(ElbowParams{}, tsg, out, err) != cli::kExitOk)
    return {false, "emit-elbow failed: " + err.str()};
  std::string csv[2];
  for (int i = 0; i < 2; ++i) {
    cli::RunManifest m;
    m.structure_path = tsg;
    m.policy = "pitch:amp=0.02,period=4";
    m.duration = 2.0;
    m.output_dir = (dir / ("run" + std::to_string(i))).string();
    if (cli::cmd_run(m, out, err) != cli::kExitOk) return {false, "run failed: " + err.str()};
    csv[i] = read_text_file(m.output_dir + "/telemetry.csv");
  }
  fs::remove_all(dir);
  return {!csv[0].empty() && csv[0] == csv[1],
          std::to_string(csv[0].size()) + "-byte CSVs " + (csv[0] == csv[1] ? "identical" : "differ")};
}

Outcome motor_limits() {
  const CableSpec spec{"m", Anchor::rod("a", EndpointTag::A), Anchor::rod("b", EndpointTag::A), 100, 1,
                 0.2, CableRole::Active, 0.1, 0.3, 0.05, 0.5};
  const double dt = 1e-3, tol = 1e-9;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> wild(-1.0, 2.0);
  const std::vector<std::function<double(int)>> sequences = {
      [&](int) { return wild(rng); },
      [](int i) { return (i / 37) % 2 ? 1e3 : -1e3; },
      [](int i) { return 0.2 + 0.15 * std::sin(1e-5 * i * i); },
      [](int i) { return i % 2 ? 0.3 : 0.1; },
      [](int i) { return (i / 500) % 2 ? 0.1 : 0.3; },
  };
  double v_excess = 0.0, a_excess = 0.0, bound_excess = 0.0;
  for (const auto& desired : sequences) {
    MotorState m = initial_motor(spec);
    std::vector<double> x{m.rest_length};
    for (int i = 0; i < 20000; ++i) {
      m = filter_command(spec, m, desired(i), dt);
      x.push_back(m.rest_length);
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
      bound_excess = std::max({bound_excess, spec.min_length - x[i], x[i] - spec.max_length});
      const double v = (x[i] - x[i - 1]) / dt;
      v_excess = std::max(v_excess, std::abs(v) - spec.max_velocity);
      if (i >= 2) {
        const double acc = (x[i] - 2.0 * x[i - 1] + x[i - 2]) / (dt * dt);
        a_excess = std::max(a_excess, std::abs(acc) - spec.max_acceleration);
      }
    }
  }
  return {v_excess <= tol && a_excess <= tol && bound_excess <= tol,
          "worst excess: velocity " + num(v_excess) + ", acceleration " + num(a_excess) +
              ", bounds " + num(bound_excess)};
}

int run_all() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  };

  report(1, "cable force oracle", cable_force_oracle);
  report(2, "damped oscillator", damped_oscillator);
  report(3, "static hang", static_hang);
  report(4, "momentum conservation", momentum);

  std::optional<Reference> ref;
  try {
    ref.emplace();
  } catch (const std::exception& e) {
    std::printf("reference elbow unavailable: %s\n", e.what());
  }
  auto with_ref = [&](auto fn) {
    return [&, fn]() -> Outcome {
      if (!ref) return {false, "reference elbow unavailable"};
      return fn(*ref);
    };
  };
  Runs runs;
  report(5, "dissipation", with_ref(dissipation));
  report(6, "equilibrium restoration", with_ref(restoration));
  report(7, "pitch actuation", with_ref([&](const Reference& r) { return pitch_actuation(r, runs); }));
  report(8, "yaw actuation and axis independence",
         with_ref([&](const Reference& r) { return yaw_actuation(r, runs); }));
  report(9, "multi-axis compliance", with_ref(compliance));
  report(10, "rods never touch", clearance);
  report(11, "determinism", determinism);
  report(12, "motor limits", motor_limits);

  std::printf("%s: %d of 12 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

}  // namespace
}  // namespace tenjoint::acceptance

int main() { return tenjoint::acceptance::run_all(); }
