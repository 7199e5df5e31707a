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

// Motor model for active cables and antagonistic pair coupling.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "tenjoint/error.hpp"
#include "tenjoint/structure.hpp"

namespace tenjoint {

struct MotorState {
  std::string cable;
  double rest_length = 0.0;
  double rest_length_velocity = 0.0;
};

inline MotorState initial_motor(const CableSpec& spec) { return {spec.name, spec.rest_length, 0.0}; }

// Largest speed toward a target `distance` away from which the motor can
// still stop on it, given deceleration `accel` applied in steps of `dt`.
// Speed s covers dt * (s + (s - a dt) + ... ) until it reaches zero; in units
// of a dt that is piecewise linear, with n + 1 nonzero terms when
// n(n+1)/2 <= x < (n+1)(n+2)/2.
inline double braking_speed(double distance, double accel, double dt) {
  if (!(accel > 0.0) || !(distance > 0.0)) return 0.0;
  if (std::isinf(accel)) return std::numeric_limits<double>::infinity();
  const double x = distance / (accel * dt * dt);
  double n = std::floor(0.5 * (std::sqrt(1.0 + 8.0 * x) - 1.0));
  while ((n + 1.0) * (n + 2.0) * 0.5 <= x) n += 1.0;
  while (n > 0.0 && n * (n + 1.0) * 0.5 > x) n -= 1.0;
  return accel * dt * (x / (n + 1.0) + 0.5 * n);
}

// One motor tick toward `desired_rest`: slew-limited velocity, then speed
// limit, then position limits.
inline MotorState filter_command(const CableSpec& spec, const MotorState& motor,
                                 double desired_rest, double dt) {
  if (!spec.is_active())
    throw ActuationError("cable '" + spec.name + "' is passive and cannot be actuated");
  if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
  if (!std::isfinite(desired_rest))
    throw ActuationError("non-finite command for cable '" + spec.name + "'");

  const double target = std::clamp(desired_rest, spec.min_length, spec.max_length);
  const double error = target - motor.rest_length;
  const double reach = std::abs(error);
  const double speed = std::min({reach / dt, braking_speed(reach, spec.max_acceleration, dt),
                                 spec.max_velocity});
  const double v_target = std::copysign(speed, error);

  const double dv_max = spec.max_acceleration * dt;
  double v = motor.rest_length_velocity +
             std::clamp(v_target - motor.rest_length_velocity, -dv_max, dv_max);
  v = std::clamp(v, -spec.max_velocity, spec.max_velocity);

  // Reaching the target this tick lands on it exactly.
  const bool lands = v == v_target && speed == reach / dt;
  MotorState out{motor.cable, lands ? target : motor.rest_length + v * dt, v};
  if (out.rest_length < spec.min_length || out.rest_length > spec.max_length) {
    out.rest_length = std::clamp(out.rest_length, spec.min_length, spec.max_length);
    out.rest_length_velocity = (out.rest_length - motor.rest_length) / dt;
  }
  return out;
}

struct PairTargets {
  double flexor = 0.0;
  double extensor = 0.0;
};

// Desired rests for a pair displaced by `delta` from nominal: the flexor
// shortens by delta, the extensor lengthens by ratio * delta, and both
// shorten by `cocontraction`.
inline PairTargets antagonistic_targets(const Structure& s, const AntagonisticPair& pair,
                                        double delta, double cocontraction = 0.0) {
  const CableSpec& f = s.cable(pair.flexor);
  const CableSpec& e = s.cable(pair.extensor);
  if (!f.is_active() || !e.is_active())
    throw ActuationError("pair '" + pair.label + "' is not an active pair");
  return {f.rest_length - delta - cocontraction,
          e.rest_length + pair.ratio * delta - cocontraction};
}

// Resolves the pair that couples `flexor` and `extensor`.
inline const AntagonisticPair& find_coupling(const Structure& s, std::string_view flexor,
                                             std::string_view extensor) {
  for (const AntagonisticPair& p : s.pairs())
    if (p.flexor == flexor && p.extensor == extensor) return p;
  throw ActuationError("cables '" + std::string(flexor) + "' and '" + std::string(extensor) +
                       "' are not an antagonistic pair");
}

// Accumulates antagonistic displacements per pair. Offsets start at zero, so
// apply(d) followed by apply(-d) lands back on the nominal rests.
class AntagonisticDrive {
 public:
  explicit AntagonisticDrive(const Structure& s) : structure_(&s) {}

  PairTargets apply(std::string_view label, double delta) {
    const AntagonisticPair& p = pair(label);
    double& offset = offsets_[p.label];
    offset += delta;
    return antagonistic_targets(*structure_, p, offset, cocontraction(label));
  }

  PairTargets apply(std::string_view flexor, std::string_view extensor, double delta) {
    return apply(find_coupling(*structure_, flexor, extensor).label, delta);
  }

  void set_cocontraction(std::string_view label, double amount) {
    cocontraction_[pair(label).label] = amount;
  }

  double offset(std::string_view label) const {
    const auto it = offsets_.find(std::string(label));
    return it == offsets_.end() ? 0.0 : it->second;
  }

  double cocontraction(std::string_view label) const {
    const auto it = cocontraction_.find(std::string(label));
    return it == cocontraction_.end() ? 0.0 : it->second;
  }

  PairTargets targets(std::string_view label) const {
    return antagonistic_targets(*structure_, pair(label), offset(label), cocontraction(label));
  }

 private:
  const AntagonisticPair& pair(std::string_view label) const {
    const AntagonisticPair* p = structure_->find_pair(label);
    if (!p) throw ActuationError("no antagonistic pair '" + std::string(label) + "'");
    if (!structure_->cable(p->flexor).is_active())
      throw ActuationError("pair '" + p->label + "' is passive");
    return *p;
  }

  const Structure* structure_;
  std::map<std::string, double> offsets_;
  std::map<std::string, double> cocontraction_;
};

}  // namespace tenjoint
