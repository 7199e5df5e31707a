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

// Rigid-rod / cable-network dynamics.
//
// Rods are uniform solid cylinders with six degrees of freedom. Body frame:
// origin at the center of mass, axis along +z, endpoint A at -L/2 and B at
// +L/2. A rod with one pinned endpoint rotates about it; a rod with both
// endpoints pinned never moves.
//
// Cables pull with F = k X + b V while taut (X = L - rest > 0), clamped at
// zero so that neither the spring nor the damper ever pushes. Integration is
// semi-implicit Euler: velocities first, then positions from the new
// velocities; orientations are renormalized every step.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tenjoint/error.hpp"
#include "tenjoint/geometry.hpp"
#include "tenjoint/structure.hpp"

namespace tenjoint {

struct RodState {
  Vec3 position = Vec3::Zero();  // center of mass
  Quat orientation = Quat::Identity();
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
};

struct CableState {
  double current_length = 0.0;
  double extension = 0.0;       // X = L - rest
  double extension_rate = 0.0;  // V = dL/dt
  double tension = 0.0;         // pull magnitude, >= 0
};

// Rod states and rest lengths are index-aligned with Structure::rods() and
// Structure::cables().
struct SimState {
  double time = 0.0;
  std::vector<RodState> rods;
  std::vector<double> rest_lengths;
};

struct SimConfig {
  double dt = 1e-3;
  Vec3 gravity{0.0, 0.0, -9.81};

  void check() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be > 0");
    if (!all_finite(gravity)) throw ParameterError("gravity must be finite");
  }
};

// External force applied at a rod endpoint.
struct PointLoad {
  std::string rod;
  EndpointTag end = EndpointTag::B;
  Vec3 force = Vec3::Zero();
};

struct CableForce {
  Vec3 on_a = Vec3::Zero();
  Vec3 on_b = Vec3::Zero();
  CableState state;
};

// Tension-only spring-damper between two anchor points.
inline CableForce cable_force(const CableSpec& spec, double rest_length, const Vec3& pa,
                              const Vec3& pb, const Vec3& va, const Vec3& vb) {
  const Vec3 d = pb - pa;
  const double length = d.norm();
  if (!(length > 1e-12))
    throw DivergenceError("coincident cable anchors", "cable '" + spec.name + "'");
  const Vec3 u = d / length;
  CableForce out;
  out.state.current_length = length;
  out.state.extension = length - rest_length;
  out.state.extension_rate = (vb - va).dot(u);
  if (out.state.extension > 0.0) {
    const double pull =
        spec.stiffness_k * out.state.extension + spec.damping_b * out.state.extension_rate;
    out.state.tension = pull > 0.0 ? pull : 0.0;
  }
  if (!std::isfinite(out.state.tension))
    throw DivergenceError("non-finite cable tension", "cable '" + spec.name + "'");
  out.on_a = out.state.tension * u;
  out.on_b = -out.on_a;
  return out;
}

inline CableForce cable_force(const CableSpec& spec, const Vec3& pa, const Vec3& pb,
                              const Vec3& va, const Vec3& vb) {
  return cable_force(spec, spec.rest_length, pa, pb, va, vb);
}

enum class Fixity { kFree, kPivot, kFixed };

// Structure compiled into index form for stepping.
class Model {
 public:
  struct Rod {
    double mass = 0.0;
    double half_length = 0.0;
    Vec3 inertia_body = Vec3::Zero();  // principal moments (xx, yy, zz)
    Fixity fixity = Fixity::kFree;
    double pivot_sign = 0.0;  // body z of the pinned endpoint
    Vec3 pivot_world = Vec3::Zero();
  };
  struct AnchorRef {
    int rod = -1;           // -1: world mount
    double sign = 0.0;      // -1 endpoint A, +1 endpoint B
    Vec3 mount = Vec3::Zero();
  };
  struct Cable {
    AnchorRef a;
    AnchorRef b;
  };

  explicit Model(Structure s) : structure_(std::move(s)) {
    for (const RodSpec& r : structure_.rods()) {
      Rod m;
      m.mass = r.mass;
      m.half_length = 0.5 * r.length();
      const double r2 = r.radius * r.radius;
      const double transverse = r.mass * (3.0 * r2 + r.length() * r.length()) / 12.0;
      m.inertia_body = Vec3(transverse, transverse, 0.5 * r.mass * r2);
      const bool fa = structure_.is_fixed(r.name, EndpointTag::A);
      const bool fb = structure_.is_fixed(r.name, EndpointTag::B);
      if (fa && fb) {
        m.fixity = Fixity::kFixed;
      } else if (fa || fb) {
        m.fixity = Fixity::kPivot;
        m.pivot_sign = fa ? -1.0 : 1.0;
        m.pivot_world = fa ? r.endpoint_a : r.endpoint_b;
      }
      rods_.push_back(m);
    }
    for (const CableSpec& c : structure_.cables())
      cables_.push_back({ref(c.anchor_a), ref(c.anchor_b)});
  }

  const Structure& structure() const { return structure_; }
  const std::vector<Rod>& rods() const { return rods_; }
  const std::vector<Cable>& cables() const { return cables_; }

  AnchorRef ref(const Anchor& a) const {
    if (a.is_mount()) return {-1, 0.0, structure_.mount(a.body).position};
    const auto i = structure_.rod_index(a.body);
    if (!i) throw StructureError("unknown rod '" + a.body + "'");
    return {static_cast<int>(*i), *a.end == EndpointTag::A ? -1.0 : 1.0, Vec3::Zero()};
  }

  // Body-frame offset of an endpoint from the center of mass.
  Vec3 offset_body(std::size_t rod, double sign) const {
    return Vec3(0.0, 0.0, sign * rods_[rod].half_length);
  }

  Vec3 point(const SimState& s, const AnchorRef& a) const {
    if (a.rod < 0) return a.mount;
    const RodState& r = s.rods[static_cast<std::size_t>(a.rod)];
    return r.position + r.orientation * offset_body(static_cast<std::size_t>(a.rod), a.sign);
  }

  Vec3 velocity(const SimState& s, const AnchorRef& a) const {
    if (a.rod < 0) return Vec3::Zero();
    const RodState& r = s.rods[static_cast<std::size_t>(a.rod)];
    const Vec3 arm = r.orientation * offset_body(static_cast<std::size_t>(a.rod), a.sign);
    return r.linear_velocity + r.angular_velocity.cross(arm);
  }

  Vec3 endpoint(const SimState& s, std::size_t rod, EndpointTag tag) const {
    return point(s, {static_cast<int>(rod), tag == EndpointTag::A ? -1.0 : 1.0, Vec3::Zero()});
  }

  Mat3 world_inertia(const RodState& r, std::size_t rod) const {
    const Mat3 rot = r.orientation.toRotationMatrix();
    return rot * rods_[rod].inertia_body.asDiagonal() * rot.transpose();
  }

 private:
  Structure structure_;
  std::vector<Rod> rods_;
  std::vector<Cable> cables_;
};

// State at the declared geometry: at rest, nominal rest lengths, t = 0.
inline SimState initial_state(const Structure& s) {
  SimState out;
  for (const RodSpec& r : s.rods()) {
    RodState rs;
    rs.position = r.center();
    rs.orientation = Quat::FromTwoVectors(Vec3::UnitZ(), r.endpoint_b - r.endpoint_a);
    rs.orientation.normalize();
    out.rods.push_back(rs);
  }
  for (const CableSpec& c : s.cables()) out.rest_lengths.push_back(c.rest_length);
  return out;
}

inline std::vector<CableState> cable_states(const Model& m, const SimState& s) {
  std::vector<CableState> out;
  const auto& specs = m.structure().cables();
  out.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& c = m.cables()[i];
    out.push_back(cable_force(specs[i], s.rest_lengths[i], m.point(s, c.a), m.point(s, c.b),
                              m.velocity(s, c.a), m.velocity(s, c.b))
                      .state);
  }
  return out;
}

// One semi-implicit Euler update. `rest_lengths` (index-aligned with the
// cables; empty keeps the current ones) takes effect for this step.
inline SimState step(const Model& m, const SimState& in, std::span<const double> rest_lengths,
                     const SimConfig& config, std::span<const PointLoad> loads = {}) {
  config.check();
  const Structure& st = m.structure();
  const std::size_t nrods = st.rods().size();
  SimState out = in;
  if (!rest_lengths.empty()) {
    if (rest_lengths.size() != st.cables().size())
      throw ParameterError("rest-length command size mismatch");
    out.rest_lengths.assign(rest_lengths.begin(), rest_lengths.end());
  }

  std::vector<Vec3> force(nrods), torque(nrods, Vec3::Zero());
  for (std::size_t i = 0; i < nrods; ++i) force[i] = m.rods()[i].mass * config.gravity;

  auto apply = [&](const Model::AnchorRef& a, const Vec3& f) {
    if (a.rod < 0) return;
    const auto i = static_cast<std::size_t>(a.rod);
    force[i] += f;
    torque[i] += (in.rods[i].orientation * m.offset_body(i, a.sign)).cross(f);
  };

  for (std::size_t c = 0; c < st.cables().size(); ++c) {
    const auto& cm = m.cables()[c];
    const CableForce f =
        cable_force(st.cables()[c], out.rest_lengths[c], m.point(in, cm.a), m.point(in, cm.b),
                    m.velocity(in, cm.a), m.velocity(in, cm.b));
    apply(cm.a, f.on_a);
    apply(cm.b, f.on_b);
  }
  for (const PointLoad& load : loads) {
    const auto i = st.rod_index(load.rod);
    if (!i) throw StructureError("load on unknown rod '" + load.rod + "'");
    apply({static_cast<int>(*i), load.end == EndpointTag::A ? -1.0 : 1.0, Vec3::Zero()},
          load.force);
  }

  const double dt = config.dt;
  for (std::size_t i = 0; i < nrods; ++i) {
    const Model::Rod& rod = m.rods()[i];
    const RodState& r0 = in.rods[i];
    RodState& r = out.rods[i];
    if (rod.fixity == Fixity::kFixed) continue;

    Mat3 inertia = m.world_inertia(r0, i);
    Vec3 tau = torque[i];
    Vec3 arm = Vec3::Zero();  // pivot -> center of mass
    if (rod.fixity == Fixity::kPivot) {
      arm = -(r0.orientation * m.offset_body(i, rod.pivot_sign));
      tau += arm.cross(force[i]);
      inertia += rod.mass * (arm.squaredNorm() * Mat3::Identity() - arm * arm.transpose());
    }
    const Vec3& w0 = r0.angular_velocity;
    r.angular_velocity = w0 + dt * inertia.ldlt().solve(tau - w0.cross(inertia * w0));

    const Vec3& w = r.angular_velocity;
    const Quat spin(0.0, w.x(), w.y(), w.z());
    Quat q = r0.orientation;
    q.coeffs() += (0.5 * dt) * (spin * r0.orientation).coeffs();
    q.normalize();
    r.orientation = q;

    if (rod.fixity == Fixity::kPivot) {
      const Vec3 new_arm = -(q * m.offset_body(i, rod.pivot_sign));
      r.position = rod.pivot_world + new_arm;
      r.linear_velocity = w.cross(new_arm);
    } else {
      r.linear_velocity = r0.linear_velocity + (dt / rod.mass) * force[i];
      r.position = r0.position + dt * r.linear_velocity;
    }
    if (!all_finite(r.position) || !all_finite(r.linear_velocity) ||
        !all_finite(r.angular_velocity) || !all_finite(r.orientation))
      throw DivergenceError("non-finite rod state", "rod '" + st.rods()[i].name + "'");
  }
  out.time = in.time + dt;
  return out;
}

inline SimState step(const Model& m, const SimState& in, const SimConfig& config) {
  return step(m, in, std::span<const double>{}, config);
}

struct EnergyBreakdown {
  double kinetic = 0.0;
  double gravitational = 0.0;
  double elastic = 0.0;
  double total() const { return kinetic + gravitational + elastic; }
};

// Kinetic + gravitational (zero at the origin) + taut-cable elastic energy.
inline EnergyBreakdown energy(const Model& m, const SimState& s, const Vec3& gravity) {
  EnergyBreakdown e;
  for (std::size_t i = 0; i < m.rods().size(); ++i) {
    const RodState& r = s.rods[i];
    const double mass = m.rods()[i].mass;
    e.kinetic += 0.5 * mass * r.linear_velocity.squaredNorm() +
                 0.5 * r.angular_velocity.dot(m.world_inertia(r, i) * r.angular_velocity);
    e.gravitational -= mass * gravity.dot(r.position);
  }
  const auto& specs = m.structure().cables();
  for (std::size_t c = 0; c < specs.size(); ++c) {
    const double x =
        (m.point(s, m.cables()[c].b) - m.point(s, m.cables()[c].a)).norm() - s.rest_lengths[c];
    if (x > 0.0) e.elastic += 0.5 * specs[c].stiffness_k * x * x;
  }
  return e;
}

inline double total_energy(const Model& m, const SimState& s, const SimConfig& config = {}) {
  return energy(m, s, config.gravity).total();
}

inline Vec3 linear_momentum(const Model& m, const SimState& s) {
  Vec3 p = Vec3::Zero();
  for (std::size_t i = 0; i < m.rods().size(); ++i)
    p += m.rods()[i].mass * s.rods[i].linear_velocity;
  return p;
}

// Largest endpoint speed over all rods.
inline double max_endpoint_speed(const Model& m, const SimState& s) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rods().size(); ++i)
    for (double sign : {-1.0, 1.0})
      best = std::max(best, m.velocity(s, {static_cast<int>(i), sign, Vec3::Zero()}).norm());
  return best;
}

// Smallest surface gap between rods in the current pose.
inline double min_rod_clearance(const Model& m, const SimState& s) {
  std::vector<Vec3> a, b;
  for (std::size_t i = 0; i < m.rods().size(); ++i) {
    a.push_back(m.endpoint(s, i, EndpointTag::A));
    b.push_back(m.endpoint(s, i, EndpointTag::B));
  }
  return min_rod_clearance(m.structure().rods(), a, b);
}

// Largest distance of any pinned endpoint from its declared position.
inline double pinned_drift(const Model& m, const SimState& s) {
  double worst = 0.0;
  const Structure& st = m.structure();
  for (const FixedAnchor& f : st.fixed_anchors()) {
    const std::size_t i = *st.rod_index(f.rod);
    worst = std::max(worst, (m.endpoint(s, i, f.end) - st.rods()[i].endpoint(f.end)).norm());
  }
  return worst;
}

}  // namespace tenjoint
