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

// Reference tensegrity elbow: humerus, olecranon and forearm rods, two active
// antagonistic pairs (pitch, yaw), five passive pairs, and the joint-angle
// gauge used to read pitch and yaw back out of a simulation state.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tenjoint/dynamics.hpp"
#include "tenjoint/error.hpp"
#include "tenjoint/geometry.hpp"
#include "tenjoint/structure.hpp"

namespace tenjoint {

struct ElbowParams {
  double humerus_length = 0.30;
  double olecranon_length = 0.06;
  double forearm_length = 0.25;
  double humerus_mass = 0.02;
  double olecranon_mass = 0.005;
  double forearm_mass = 0.015;
  double rod_radius = 0.004;
  double active_k = 300.0;
  double passive_k = 150.0;
  double damping = 0.5;
  // Target tension for the equilibrium solve (N).
  double pretension = 2.0;
  // Co-contraction baked into the nominal active rests (m).
  double pretension_offset = 0.0;
  // Active rest-length envelope: nominal +/- range (m).
  double active_range = 0.03;
  double motor_max_velocity = 0.05;
  double motor_max_acceleration = 0.5;
  // Reflect across the sagittal plane (y -> -y) before mounting.
  bool mirrored = false;
  RigidTransform mount;
  Vec3 gravity{0.0, 0.0, -9.81};
};

inline void check(const ElbowParams& p) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ParameterError(std::string(what) + " must be > 0");
  };
  positive(p.humerus_length, "humerus length");
  positive(p.olecranon_length, "olecranon length");
  positive(p.forearm_length, "forearm length");
  positive(p.humerus_mass, "humerus mass");
  positive(p.olecranon_mass, "olecranon mass");
  positive(p.forearm_mass, "forearm mass");
  positive(p.rod_radius, "rod radius");
  positive(p.active_k, "active stiffness");
  positive(p.passive_k, "passive stiffness");
  positive(p.pretension, "pretension");
  positive(p.active_range, "active range");
  if (!(p.damping >= 0.0) || !std::isfinite(p.damping))
    throw ParameterError("damping must be >= 0");
  if (!(p.pretension_offset >= 0.0) || !std::isfinite(p.pretension_offset))
    throw ParameterError("pretension offset must be >= 0");
  if (!(p.motor_max_velocity >= 0.0) || !(p.motor_max_acceleration >= 0.0))
    throw ParameterError("motor limits must be >= 0");
  if (!(std::abs(p.mount.rotation.norm() - 1.0) <= 1e-9) || !all_finite(p.mount.translation))
    throw ParameterError("mount transform must be rigid");
}

// Fixed anchor layout, in metres, in the humerus-tip frame: elbow at the
// origin, shoulder on +z, forearm along +x, lateral (left) on +y.
namespace elbow_layout {
inline constexpr double kForearmDrop = 0.05;   // forearm axis below the elbow
inline constexpr double kOlecranonX = 0.02;
inline constexpr double kOlecranonDrop = 0.01;
inline constexpr double kSideMountX = 0.05;
inline constexpr double kSideMountY = 0.04;
inline constexpr double kBaseMountDrop = 0.09;
}  // namespace elbow_layout

struct FormFindResult {
  Structure structure;
  std::vector<double> tensions;
  double residual = 0.0;
};

// Chooses rest lengths so the declared geometry is a static equilibrium
// under gravity, with tensions as close as possible to `target` (N).
inline FormFindResult form_find(const Structure& s, const Vec3& gravity,
                                const std::vector<double>& target) {
  const Model model(s);
  const SimState pose = initial_state(s);
  const std::size_t nc = s.cables().size();
  if (target.size() != nc) throw ParameterError("target tension vector size mismatch");

  std::vector<std::size_t> row_of(s.rods().size(), 0);
  Eigen::Index rows = 0;
  for (std::size_t i = 0; i < s.rods().size(); ++i) {
    row_of[i] = static_cast<std::size_t>(rows);
    const Fixity f = model.rods()[i].fixity;
    rows += f == Fixity::kFree ? 6 : f == Fixity::kPivot ? 3 : 0;
  }
  if (rows == 0) throw ParameterError("structure has no movable rods");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(nc));
  Eigen::VectorXd load = Eigen::VectorXd::Zero(rows);

  // Torque reference: center for free rods, the pinned end for pivots.
  auto reference = [&](std::size_t i) {
    const Model::Rod& r = model.rods()[i];
    if (r.fixity == Fixity::kPivot) return r.pivot_world;
    return pose.rods[i].position;
  };
  auto add = [&](Eigen::VectorXd& col, std::size_t i, const Vec3& at, const Vec3& f) {
    const Fixity fx = model.rods()[i].fixity;
    if (fx == Fixity::kFixed) return;
    const auto r0 = static_cast<Eigen::Index>(row_of[i]);
    const Vec3 tq = (at - reference(i)).cross(f);
    if (fx == Fixity::kFree) {
      col.segment<3>(r0) += f;
      col.segment<3>(r0 + 3) += tq;
    } else {
      col.segment<3>(r0) += tq;
    }
  };

  for (std::size_t c = 0; c < nc; ++c) {
    const auto& cm = model.cables()[c];
    const Vec3 pa = model.point(pose, cm.a);
    const Vec3 pb = model.point(pose, cm.b);
    const Vec3 u = (pb - pa).normalized();
    Eigen::VectorXd col = Eigen::VectorXd::Zero(rows);
    if (cm.a.rod >= 0) add(col, static_cast<std::size_t>(cm.a.rod), pa, u);
    if (cm.b.rod >= 0) add(col, static_cast<std::size_t>(cm.b.rod), pb, -u);
    a.col(static_cast<Eigen::Index>(c)) = col;
  }
  for (std::size_t i = 0; i < s.rods().size(); ++i) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(rows);
    add(col, i, pose.rods[i].position, model.rods()[i].mass * gravity);
    load += col;
  }

  const Eigen::VectorXd t0 = Eigen::Map<const Eigen::VectorXd>(target.data(),
                                                               static_cast<Eigen::Index>(nc));
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd t = t0 - cod.solve(a * t0 + load);

  FormFindResult out;
  out.residual = (a * t + load).norm();
  out.tensions.assign(t.data(), t.data() + t.size());
  if (!(out.residual <= 1e-9))
    throw ParameterError("geometry admits no static equilibrium (residual " +
                         std::to_string(out.residual) + " N)");
  std::vector<double> rest(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const CableSpec& spec = s.cables()[c];
    if (!(t[static_cast<Eigen::Index>(c)] > 0.0))
      throw ParameterError("cable '" + spec.name + "' would be slack at equilibrium");
    const auto& cm = model.cables()[c];
    const double length = (model.point(pose, cm.b) - model.point(pose, cm.a)).norm();
    rest[c] = length - t[static_cast<Eigen::Index>(c)] / spec.stiffness_k;
    if (!(rest[c] > 0.0))
      throw ParameterError("cable '" + spec.name + "' needs a non-positive rest length");
  }
  out.structure = with_rest_lengths(s, rest);
  return out;
}

inline Structure build_elbow(const ElbowParams& p = {}) {
  check(p);
  namespace L = elbow_layout;
  const double side = p.mirrored ? -1.0 : 1.0;
  const double half_ol = 0.5 * p.olecranon_length;
  auto at = [&](double x, double y, double z) { return p.mount.apply(Vec3(x, side * y, z)); };

  Structure s;
  s = add_rod(s, {"humerus", at(0, 0, p.humerus_length), at(0, 0, 0), p.humerus_mass,
                  p.rod_radius});
  s = add_rod(s, {"olecranon", at(L::kOlecranonX, half_ol, -L::kOlecranonDrop),
                  at(L::kOlecranonX, -half_ol, -L::kOlecranonDrop), p.olecranon_mass,
                  p.rod_radius});
  s = add_rod(s, {"forearm", at(0, 0, -L::kForearmDrop),
                  at(p.forearm_length, 0, -L::kForearmDrop), p.forearm_mass, p.rod_radius});
  s = add_mount(s, {"mount_left", at(L::kSideMountX, L::kSideMountY, -L::kForearmDrop)});
  s = add_mount(s, {"mount_right", at(L::kSideMountX, -L::kSideMountY, -L::kForearmDrop)});
  s = add_mount(s, {"mount_base", at(0, 0, -L::kBaseMountDrop)});
  s = add_fixed(s, {"humerus", EndpointTag::A});
  s = add_fixed(s, {"humerus", EndpointTag::B});

  const Anchor shoulder = Anchor::rod("humerus", EndpointTag::A);
  const Anchor elbow = Anchor::rod("humerus", EndpointTag::B);
  const Anchor olec_l = Anchor::rod("olecranon", EndpointTag::A);
  const Anchor olec_r = Anchor::rod("olecranon", EndpointTag::B);
  const Anchor proximal = Anchor::rod("forearm", EndpointTag::A);
  const Anchor distal = Anchor::rod("forearm", EndpointTag::B);
  const Anchor left = Anchor::mount("mount_left");
  const Anchor right = Anchor::mount("mount_right");
  const Anchor base = Anchor::mount("mount_base");

  // Rest lengths are placeholders until form-finding.
  auto active = [&](std::string name, Anchor a, Anchor b) {
    const double len = (s.anchor_position(b) - s.anchor_position(a)).norm();
    s = add_cable(s, {std::move(name), a, b, p.active_k, p.damping, len, CableRole::Active,
                      len - p.active_range, len + p.active_range, p.motor_max_velocity,
                      p.motor_max_acceleration});
  };
  auto passive = [&](std::string name, Anchor a, Anchor b) {
    const double len = (s.anchor_position(b) - s.anchor_position(a)).norm();
    s = add_cable(s, passive_cable(std::move(name), a, b, p.passive_k, p.damping, len));
  };

  active("bicep", elbow, distal);
  active("tricep", base, distal);
  active("yaw_left", left, distal);
  active("yaw_right", right, distal);
  passive("sling_left", olec_l, proximal);
  passive("sling_right", olec_r, proximal);
  passive("collateral_left", left, proximal);
  passive("collateral_right", right, proximal);
  passive("suspension_left", shoulder, olec_l);
  passive("suspension_right", shoulder, olec_r);
  passive("brace_left", left, olec_l);
  passive("brace_right", right, olec_r);
  passive("capsule_upper", elbow, proximal);
  passive("capsule_lower", base, proximal);

  s = add_pair(s, {"pitch", "bicep", "tricep", 1.0});
  s = add_pair(s, {"yaw", "yaw_left", "yaw_right", 1.0});
  s = add_pair(s, {"sling", "sling_left", "sling_right", 1.0});
  s = add_pair(s, {"collateral", "collateral_left", "collateral_right", 1.0});
  s = add_pair(s, {"suspension", "suspension_left", "suspension_right", 1.0});
  s = add_pair(s, {"brace", "brace_left", "brace_right", 1.0});
  s = add_pair(s, {"capsule", "capsule_upper", "capsule_lower", 1.0});

  Structure solved =
      form_find(s, p.gravity, std::vector<double>(s.cables().size(), p.pretension)).structure;

  if (p.pretension_offset > 0.0) {
    std::vector<double> rest;
    for (const CableSpec& c : solved.cables())
      rest.push_back(c.is_active() ? c.rest_length - p.pretension_offset : c.rest_length);
    solved = with_rest_lengths(solved, rest);
  }

  const ValidationReport report = validate(solved);
  if (!report.passed())
    throw ParameterError("elbow geometry fails validation: " + report.violations[0].message);
  return solved;
}

// ---------------------------------------------------------------------------
// Joint angles

struct JointAngles {
  double pitch = 0.0;  // rad, positive toward the shoulder (flexion)
  double yaw = 0.0;    // rad, positive toward +y of the humerus frame
  bool degenerate = false;
};

// The end-effector is the distal (B) end of the rod named "forearm", or of
// the last rod when there is none.
inline std::size_t end_effector_rod(const Structure& s, std::string_view prefix = {}) {
  const std::string name = prefix.empty() ? "forearm" : std::string(prefix) + ".forearm";
  if (const auto i = s.rod_index(name)) return *i;
  if (s.rods().empty()) throw StructureError("structure has no rods");
  return s.rods().size() - 1;
}

inline Vec3 end_effector(const Model& m, const SimState& state) {
  return m.endpoint(state, end_effector_rod(m.structure()), EndpointTag::B);
}

// Pitch is measured in the plane spanned by the humerus axis and the
// reference forearm direction; yaw in the plane normal to the humerus axis.
// The frame is carried by the humerus, and both angles are zero at the
// reference pose.
class ElbowGauge {
 public:
  static constexpr double kDegenerate = 1e-9;

  // Reference pose = declared geometry.
  explicit ElbowGauge(const Structure& s, std::string_view prefix = {})
      : ElbowGauge(s, initial_state(s), prefix) {}

  ElbowGauge(const Structure& s, const SimState& reference, std::string_view prefix = {}) {
    const std::string pre = prefix.empty() ? "" : std::string(prefix) + ".";
    const auto h = s.rod_index(pre + "humerus");
    const auto f = s.rod_index(pre + "forearm");
    if (!h || !f) throw StructureError("structure has no humerus/forearm rods");
    humerus_ = *h;
    forearm_ = *f;
    const Model m(s);
    const Quat qh = reference.rods[humerus_].orientation;
    const Vec3 up = (m.endpoint(reference, humerus_, EndpointTag::A) -
                     m.endpoint(reference, humerus_, EndpointTag::B))
                        .normalized();
    Vec3 fwd = forearm_dir(m, reference);
    fwd -= fwd.dot(up) * up;
    if (!(fwd.norm() > kDegenerate))
      throw StructureError("forearm is parallel to the humerus in the reference pose");
    fwd.normalize();
    // Frame stored in humerus body coordinates.
    up_body_ = qh.conjugate() * up;
    fwd_body_ = qh.conjugate() * fwd;
    zero_ = raw(m, reference);
    last_ = {};
  }

  JointAngles measure(const Model& m, const SimState& s) {
    JointAngles r = raw(m, s);
    if (r.degenerate) {
      last_.degenerate = true;
      return last_;
    }
    r.pitch = wrap(r.pitch - zero_.pitch);
    r.yaw = wrap(r.yaw - zero_.yaw);
    last_ = r;
    return r;
  }

  std::size_t humerus() const { return humerus_; }
  std::size_t forearm() const { return forearm_; }

 private:
  Vec3 forearm_dir(const Model& m, const SimState& s) const {
    return (m.endpoint(s, forearm_, EndpointTag::B) - m.endpoint(s, forearm_, EndpointTag::A))
        .normalized();
  }

  JointAngles raw(const Model& m, const SimState& s) const {
    const Quat& qh = s.rods[humerus_].orientation;
    const Vec3 up = qh * up_body_;
    const Vec3 fwd = qh * fwd_body_;
    const Vec3 side = up.cross(fwd);
    const Vec3 d = forearm_dir(m, s);
    JointAngles r;
    const double du = d.dot(up), df = d.dot(fwd), ds = d.dot(side);
    if (std::hypot(du, df) < kDegenerate || std::hypot(ds, df) < kDegenerate) {
      r.degenerate = true;
      return r;
    }
    r.pitch = std::atan2(du, df);
    r.yaw = std::atan2(ds, df);
    return r;
  }

  static double wrap(double a) { return std::remainder(a, 2.0 * kPi); }

  std::size_t humerus_ = 0;
  std::size_t forearm_ = 0;
  Vec3 up_body_ = Vec3::UnitZ();
  Vec3 fwd_body_ = Vec3::UnitX();
  JointAngles zero_;
  JointAngles last_;
};

inline JointAngles measure_angles(const Structure& s, const SimState& state) {
  ElbowGauge gauge(s);
  return gauge.measure(Model(s), state);
}

inline bool is_elbow(const Structure& s) {
  return s.rod_index("humerus").has_value() && s.rod_index("forearm").has_value();
}

}  // namespace tenjoint
