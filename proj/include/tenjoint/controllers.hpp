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

#pragma once

// Control policies and the closed simulation loop:
// policy -> motor filter -> step -> record.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tenjoint/actuation.hpp"
#include "tenjoint/dynamics.hpp"
#include "tenjoint/elbow.hpp"
#include "tenjoint/error.hpp"
#include "tenjoint/telemetry.hpp"
#include "tenjoint/text.hpp"

namespace tenjoint {

struct PolicyInput {
  double time = 0.0;
  std::map<std::string, double> cable_lengths;
  Vec3 end_effector = Vec3::Zero();
};

struct PolicyOutput {
  // Active cables only; cables left out are driven to their nominal rest.
  std::map<std::string, double> desired_rest;
};

struct Policy {
  std::string description;
  std::function<PolicyOutput(const PolicyInput&)> fn;

  PolicyOutput operator()(const PolicyInput& in) const { return fn(in); }
};

inline Policy null_policy() {
  return {"none", [](const PolicyInput&) { return PolicyOutput{}; }};
}

// delta(t) = amplitude * sin(2 pi t / period) applied to the pair.
inline Policy periodic_pair_policy(const Structure& s, const std::string& label,
                                   double amplitude, double period) {
  const AntagonisticPair* pair = s.find_pair(label);
  if (!pair) throw PolicyError("no antagonistic pair '" + label + "'");
  const CableSpec& f = s.cable(pair->flexor);
  const CableSpec& e = s.cable(pair->extensor);
  if (!f.is_active() || !e.is_active()) throw PolicyError("pair '" + label + "' is passive");
  if (!(period > 0.0) || !std::isfinite(period)) throw PolicyError("period must be > 0");
  if (!std::isfinite(amplitude)) throw PolicyError("amplitude must be finite");
  const double reach = std::min(0.5 * (f.max_length - f.min_length),
                                0.5 * (e.max_length - e.min_length) / pair->ratio);
  // Tolerates the rounding in (max - min) / 2.
  if (std::abs(amplitude) > reach * (1.0 + 1e-12))
    throw PolicyError("amplitude " + text::format_exact(amplitude) + " m exceeds the range " +
                      text::format_exact(reach) + " m of pair '" + label + "'");

  const AntagonisticPair p = *pair;
  const double f0 = f.rest_length, e0 = e.rest_length;
  return {label + ":amp=" + text::format_exact(amplitude) + ",period=" + text::format_exact(period),
          [p, f0, e0, amplitude, period](const PolicyInput& in) {
            const double delta = amplitude * std::sin(2.0 * kPi * (in.time / period));
            PolicyOutput out;
            out.desired_rest[p.flexor] = f0 - delta;
            out.desired_rest[p.extensor] = e0 + p.ratio * delta;
            return out;
          }};
}

struct ScheduleEntry {
  double time = 0.0;
  std::string cable;
  double desired_rest = 0.0;
};

// Step-and-hold playback. An event fires once the clock is within 1e-9 s of
// its time, so events on the dt grid are not lost to rounding.
inline Policy script_policy(const Structure& s, std::vector<ScheduleEntry> schedule,
                            std::string description = "script") {
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ScheduleEntry& e = schedule[i];
    const auto c = s.cable_index(e.cable);
    if (!c) throw PolicyError("schedule names unknown cable '" + e.cable + "'");
    if (!s.cables()[*c].is_active())
      throw PolicyError("schedule names passive cable '" + e.cable + "'");
    if (!std::isfinite(e.time) || !std::isfinite(e.desired_rest))
      throw PolicyError("schedule entries must be finite");
    if (i > 0 && e.time < schedule[i - 1].time)
      throw PolicyError("schedule is not sorted by time");
  }
  return {std::move(description), [schedule = std::move(schedule)](const PolicyInput& in) {
            PolicyOutput out;
            for (const ScheduleEntry& e : schedule) {
              if (e.time > in.time + 1e-9) break;
              out.desired_rest[e.cable] = e.desired_rest;
            }
            return out;
          }};
}

// CSV with header `time_s,cable,desired_rest_m`.
inline std::vector<ScheduleEntry> parse_schedule_csv(std::string_view source) {
  std::vector<ScheduleEntry> out;
  std::size_t pos = 0;
  int line = 0;
  bool header = true;
  while (pos < source.size()) {
    ++line;
    const auto fields = detail::csv_record(source, pos, line);
    if (fields.size() == 1 && text::trim(fields[0]).empty()) continue;
    if (header) {
      header = false;
      if (fields.size() != 3 || text::trim(fields[0]) != "time_s" ||
          text::trim(fields[1]) != "cable" || text::trim(fields[2]) != "desired_rest_m")
        throw ParseError("schedule header must be 'time_s,cable,desired_rest_m'", line);
      continue;
    }
    if (fields.size() != 3) throw ParseError("schedule rows need 3 fields", line);
    const auto t = text::parse_double(text::trim(fields[0]));
    const auto r = text::parse_double(text::trim(fields[2]));
    if (!t) throw ParseError("malformed number for time_s: '" + fields[0] + "'", line);
    if (!r) throw ParseError("malformed number for desired_rest_m: '" + fields[2] + "'", line);
    out.push_back({*t, std::string(text::trim(fields[1])), *r});
  }
  if (header) throw ParseError("schedule is empty (missing header)", 0);
  return out;
}

inline std::size_t sample_count(double duration, double dt) {
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw ParameterError("duration must be >= 0");
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

struct RunOptions {
  double duration = 1.0;
  // Angles are measured relative to the initial state when the structure
  // has humerus and forearm rods; zero otherwise.
  bool measure_angles = true;
};

// Closed loop from `initial`. Sample i is taken at initial.time + i*dt.
inline TelemetryRecord run_policy(const Model& m, const SimState& initial, const Policy& policy,
                                  const SimConfig& config, const RunOptions& opts = {}) {
  config.check();
  const Structure& s = m.structure();
  const std::size_t n = sample_count(opts.duration, config.dt);

  std::optional<ElbowGauge> gauge;
  if (opts.measure_angles && is_elbow(s)) gauge.emplace(s, initial);

  std::vector<std::size_t> active;
  std::vector<MotorState> motors;
  for (std::size_t c = 0; c < s.cables().size(); ++c)
    if (s.cables()[c].is_active()) {
      active.push_back(c);
      motors.push_back({s.cables()[c].name, initial.rest_lengths[c], 0.0});
    }

  TelemetryRecord rec = empty_record(s, config, policy.description);
  rec.rows.reserve(n);
  SimState state = initial;
  const double t0 = initial.time;
  rec.rows.push_back(sample(m, state, config, gauge ? &*gauge : nullptr));

  std::vector<double> rest = state.rest_lengths;
  for (std::size_t i = 1; i < n; ++i) {
    PolicyInput in;
    in.time = state.time;
    for (std::size_t c = 0; c < s.cables().size(); ++c) {
      const auto& cm = m.cables()[c];
      in.cable_lengths[s.cables()[c].name] = (m.point(state, cm.b) - m.point(state, cm.a)).norm();
    }
    in.end_effector = end_effector(m, state);
    const PolicyOutput out = policy(in);
    for (const auto& [name, value] : out.desired_rest) {
      const auto c = s.cable_index(name);
      if (!c) throw PolicyError("policy commands unknown cable '" + name + "'");
      if (!s.cables()[*c].is_active())
        throw PolicyError("policy commands passive cable '" + name + "'");
    }
    for (std::size_t k = 0; k < active.size(); ++k) {
      const CableSpec& spec = s.cables()[active[k]];
      const auto it = out.desired_rest.find(spec.name);
      const double desired = it == out.desired_rest.end() ? spec.rest_length : it->second;
      motors[k] = filter_command(spec, motors[k], desired, config.dt);
      rest[active[k]] = motors[k].rest_length;
    }
    state = step(m, state, rest, config);
    state.time = t0 + static_cast<double>(i) * config.dt;
    rec.rows.push_back(sample(m, state, config, gauge ? &*gauge : nullptr));
  }
  return rec;
}

}  // namespace tenjoint
