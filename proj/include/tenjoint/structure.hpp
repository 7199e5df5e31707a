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

// Tensegrity structure declaration: rods (compression elements), cables
// (tension elements), world mount points, pinned rod endpoints and
// antagonistic pairings. Builder operations return new values; a Structure
// is never mutated in place once handed out.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tenjoint/error.hpp"
#include "tenjoint/geometry.hpp"

namespace tenjoint {

enum class EndpointTag { A, B };
enum class CableRole { Active, Passive };

inline char to_char(EndpointTag tag) { return tag == EndpointTag::A ? 'A' : 'B'; }

inline std::string_view to_string(CableRole role) {
  return role == CableRole::Active ? "active" : "passive";
}

// Names are case-sensitive and restricted to [A-Za-z0-9_.-]+.
inline bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
  });
}

struct RodSpec {
  std::string name;
  Vec3 endpoint_a = Vec3::Zero();
  Vec3 endpoint_b = Vec3::Zero();
  double mass = 0.0;    // kg
  double radius = 0.0;  // m

  double length() const { return (endpoint_b - endpoint_a).norm(); }
  const Vec3& endpoint(EndpointTag tag) const {
    return tag == EndpointTag::A ? endpoint_a : endpoint_b;
  }
  Vec3 center() const { return 0.5 * (endpoint_a + endpoint_b); }

  friend bool operator==(const RodSpec& l, const RodSpec& r) {
    return l.name == r.name && l.endpoint_a == r.endpoint_a &&
           l.endpoint_b == r.endpoint_b && l.mass == r.mass &&
           l.radius == r.radius;
  }
};

// A world-fixed attachment point (chassis, motor spool exit).
struct MountPoint {
  std::string name;
  Vec3 position = Vec3::Zero();

  friend bool operator==(const MountPoint& l, const MountPoint& r) {
    return l.name == r.name && l.position == r.position;
  }
};

// Cable attachment: a rod endpoint, or a mount point when `end` is empty.
struct Anchor {
  std::string body;
  std::optional<EndpointTag> end;

  static Anchor rod(std::string name, EndpointTag tag) {
    return {std::move(name), tag};
  }
  static Anchor mount(std::string name) { return {std::move(name), std::nullopt}; }

  bool is_mount() const { return !end.has_value(); }

  // `.tsg` spelling: "rod.A" or "@mount".
  std::string to_string() const {
    return is_mount() ? "@" + body : body + "." + to_char(*end);
  }

  friend bool operator==(const Anchor&, const Anchor&) = default;
};

struct CableSpec {
  std::string name;
  Anchor anchor_a;
  Anchor anchor_b;
  double stiffness_k = 0.0;  // N/m
  double damping_b = 0.0;    // N s/m
  double rest_length = 0.0;  // m
  CableRole role = CableRole::Passive;
  // Actuation envelope; ignored for passive cables.
  double min_length = 0.0;
  double max_length = 0.0;
  double max_velocity = 0.0;
  double max_acceleration = 0.0;

  bool is_active() const { return role == CableRole::Active; }

  friend bool operator==(const CableSpec&, const CableSpec&) = default;
};

// Passive cables are given min = max = rest and zero rate limits.
inline CableSpec passive_cable(std::string name, Anchor a, Anchor b, double k,
                               double damping, double rest) {
  return {std::move(name), std::move(a), std::move(b), k, damping, rest,
          CableRole::Passive, rest, rest, 0.0, 0.0};
}

struct FixedAnchor {
  std::string rod;
  EndpointTag end = EndpointTag::A;

  friend bool operator==(const FixedAnchor&, const FixedAnchor&) = default;
};

// Flexor shortens by delta while the extensor lengthens by ratio * delta.
struct AntagonisticPair {
  std::string label;
  std::string flexor;
  std::string extensor;
  double ratio = 1.0;

  friend bool operator==(const AntagonisticPair&, const AntagonisticPair&) = default;
};

class Structure;
Structure add_rod(Structure s, RodSpec rod);
Structure add_mount(Structure s, MountPoint mount);
Structure add_cable(Structure s, CableSpec cable);
Structure add_fixed(Structure s, FixedAnchor anchor);
Structure add_pair(Structure s, AntagonisticPair pair);

class Structure {
 public:
  const std::vector<RodSpec>& rods() const { return rods_; }
  const std::vector<CableSpec>& cables() const { return cables_; }
  const std::vector<MountPoint>& mounts() const { return mounts_; }
  const std::vector<FixedAnchor>& fixed_anchors() const { return fixed_; }
  const std::vector<AntagonisticPair>& pairs() const { return pairs_; }

  std::optional<std::size_t> rod_index(std::string_view name) const {
    return index_of(rods_, name);
  }
  std::optional<std::size_t> cable_index(std::string_view name) const {
    return index_of(cables_, name);
  }
  std::optional<std::size_t> mount_index(std::string_view name) const {
    return index_of(mounts_, name);
  }

  const RodSpec& rod(std::string_view name) const {
    return rods_.at(require(rod_index(name), "rod", name));
  }
  const CableSpec& cable(std::string_view name) const {
    return cables_.at(require(cable_index(name), "cable", name));
  }
  const MountPoint& mount(std::string_view name) const {
    return mounts_.at(require(mount_index(name), "mount", name));
  }

  const AntagonisticPair* find_pair(std::string_view label) const {
    auto it = std::find_if(pairs_.begin(), pairs_.end(),
                           [&](const auto& p) { return p.label == label; });
    return it == pairs_.end() ? nullptr : &*it;
  }

  bool is_fixed(std::string_view rod, EndpointTag end) const {
    return std::any_of(fixed_.begin(), fixed_.end(), [&](const FixedAnchor& f) {
      return f.rod == rod && f.end == end;
    });
  }

  bool resolves(const Anchor& a) const {
    return a.is_mount() ? mount_index(a.body).has_value()
                        : rod_index(a.body).has_value();
  }

  // Declared world position of an anchor.
  Vec3 anchor_position(const Anchor& a) const {
    if (a.is_mount()) return mount(a.body).position;
    return rod(a.body).endpoint(*a.end);
  }

  // Exact equality, including declaration order.
  friend bool operator==(const Structure&, const Structure&) = default;

 private:
  friend Structure add_rod(Structure, RodSpec);
  friend Structure add_mount(Structure, MountPoint);
  friend Structure add_cable(Structure, CableSpec);
  friend Structure add_fixed(Structure, FixedAnchor);
  friend Structure add_pair(Structure, AntagonisticPair);
  friend Structure transform(const Structure&, const Quat&, const Vec3&);
  friend Structure compose(const Structure&, const Structure&, std::string_view);
  friend Structure filter_by_prefix(const Structure&, std::string_view);
  friend Structure with_rest_lengths(Structure, const std::vector<double>&);

  template <typename T>
  static std::optional<std::size_t> index_of(const std::vector<T>& items,
                                             std::string_view name) {
    for (std::size_t i = 0; i < items.size(); ++i)
      if (items[i].name == name) return i;
    return std::nullopt;
  }

  static std::size_t require(std::optional<std::size_t> i, const char* kind,
                             std::string_view name) {
    if (!i) throw StructureError(std::string("unknown ") + kind + " '" +
                                 std::string(name) + "'");
    return *i;
  }

  std::vector<RodSpec> rods_;
  std::vector<CableSpec> cables_;
  std::vector<MountPoint> mounts_;
  std::vector<FixedAnchor> fixed_;
  std::vector<AntagonisticPair> pairs_;
};

namespace detail {

inline void require_name(std::string_view kind, std::string_view name) {
  if (!is_valid_name(name))
    throw StructureError(std::string(kind) + " name '" + std::string(name) +
                         "' is not a valid identifier");
}

inline bool body_name_taken(const Structure& s, std::string_view name) {
  return s.rod_index(name) || s.mount_index(name);
}

}  // namespace detail

inline Structure add_rod(Structure s, RodSpec rod) {
  detail::require_name("rod", rod.name);
  if (detail::body_name_taken(s, rod.name))
    throw StructureError("duplicate rod name '" + rod.name + "'");
  if (!all_finite(rod.endpoint_a) || !all_finite(rod.endpoint_b) ||
      !(rod.length() > 0.0))
    throw StructureError("degenerate rod '" + rod.name + "': zero length");
  if (!(rod.mass > 0.0) || !std::isfinite(rod.mass))
    throw StructureError("degenerate rod '" + rod.name + "': mass must be > 0");
  if (!(rod.radius > 0.0) || !std::isfinite(rod.radius))
    throw StructureError("degenerate rod '" + rod.name + "': radius must be > 0");
  s.rods_.push_back(std::move(rod));
  return s;
}

inline Structure add_mount(Structure s, MountPoint mount) {
  detail::require_name("mount", mount.name);
  if (detail::body_name_taken(s, mount.name))
    throw StructureError("duplicate mount name '" + mount.name + "'");
  if (!all_finite(mount.position))
    throw StructureError("mount '" + mount.name + "' has a non-finite position");
  s.mounts_.push_back(std::move(mount));
  return s;
}

inline Structure add_cable(Structure s, CableSpec c) {
  detail::require_name("cable", c.name);
  if (s.cable_index(c.name))
    throw StructureError("duplicate cable name '" + c.name + "'");
  for (const Anchor* a : {&c.anchor_a, &c.anchor_b}) {
    if (!s.resolves(*a))
      throw StructureError("cable '" + c.name + "' has dangling anchor " +
                           a->to_string());
  }
  if (c.anchor_a.body == c.anchor_b.body)
    throw StructureError("cable '" + c.name + "' must join two distinct bodies");
  if (c.anchor_a.is_mount() && c.anchor_b.is_mount())
    throw StructureError("cable '" + c.name + "' joins two mounts");
  if (!(c.stiffness_k > 0.0) || !std::isfinite(c.stiffness_k))
    throw StructureError("cable '" + c.name + "': stiffness must be > 0");
  if (!(c.damping_b >= 0.0) || !std::isfinite(c.damping_b))
    throw StructureError("cable '" + c.name + "': damping must be >= 0");
  if (!(c.rest_length > 0.0) || !std::isfinite(c.rest_length))
    throw StructureError("cable '" + c.name + "': rest length must be > 0");
  if (c.is_active()) {
    if (!(c.min_length <= c.max_length))
      throw StructureError("cable '" + c.name + "': limits min " +
                           std::to_string(c.min_length) + " > max " +
                           std::to_string(c.max_length));
    if (!(c.min_length > 0.0) || !(c.min_length <= c.rest_length) ||
        !(c.rest_length <= c.max_length))
      throw StructureError("cable '" + c.name +
                           "': limits must satisfy 0 < min <= rest <= max");
    if (!(c.max_velocity >= 0.0) || !(c.max_acceleration >= 0.0))
      throw StructureError("cable '" + c.name + "': rate limits must be >= 0");
  }
  s.cables_.push_back(std::move(c));
  return s;
}

inline Structure add_fixed(Structure s, FixedAnchor f) {
  if (!s.rod_index(f.rod))
    throw StructureError("fixed anchor references unknown rod '" + f.rod + "'");
  if (!s.is_fixed(f.rod, f.end)) s.fixed_.push_back(std::move(f));
  return s;
}

inline Structure add_pair(Structure s, AntagonisticPair p) {
  detail::require_name("pair", p.label);
  if (s.find_pair(p.label))
    throw StructureError("duplicate pair label '" + p.label + "'");
  const auto fi = s.cable_index(p.flexor);
  const auto ei = s.cable_index(p.extensor);
  if (!fi || !ei)
    throw StructureError("pair '" + p.label + "' references an unknown cable");
  if (p.flexor == p.extensor)
    throw StructureError("pair '" + p.label + "' needs two distinct cables");
  if (s.cables()[*fi].role != s.cables()[*ei].role)
    throw StructureError("pair '" + p.label + "' mixes active and passive cables");
  if (!(p.ratio > 0.0) || !std::isfinite(p.ratio))
    throw StructureError("pair '" + p.label + "': ratio must be > 0");
  s.pairs_.push_back(std::move(p));
  return s;
}

// Replaces every cable's rest length (index-aligned with cables()).
inline Structure with_rest_lengths(Structure s, const std::vector<double>& rest) {
  if (rest.size() != s.cables_.size())
    throw StructureError("rest-length vector size mismatch");
  for (std::size_t i = 0; i < rest.size(); ++i) {
    CableSpec& c = s.cables_[i];
    if (!(rest[i] > 0.0))
      throw StructureError("cable '" + c.name + "': rest length must be > 0");
    if (c.is_active()) {
      const double span_lo = c.rest_length - c.min_length;
      const double span_hi = c.max_length - c.rest_length;
      c.min_length = std::max(rest[i] - span_lo, 1e-6);
      c.max_length = rest[i] + span_hi;
    } else {
      c.min_length = c.max_length = rest[i];
    }
    c.rest_length = rest[i];
  }
  return s;
}

// Rigid motion of every rod endpoint and mount point.
inline Structure transform(const Structure& in, const Quat& rotation,
                           const Vec3& translation) {
  if (!(std::abs(rotation.norm() - 1.0) <= 1e-9))
    throw StructureError("transform rotation is not a unit quaternion");
  const Mat3 r = rotation.toRotationMatrix();
  Structure s = in;
  for (RodSpec& rod : s.rods_) {
    rod.endpoint_a = r * rod.endpoint_a + translation;
    rod.endpoint_b = r * rod.endpoint_b + translation;
  }
  for (MountPoint& m : s.mounts_) m.position = r * m.position + translation;
  return s;
}

// Union with every child name namespaced as "<prefix>.<name>".
inline Structure compose(const Structure& parent, const Structure& child,
                         std::string_view prefix) {
  detail::require_name("prefix", prefix);
  const std::string pre = std::string(prefix) + ".";
  auto rename = [&](const std::string& n) { return pre + n; };
  auto collide = [](const std::string& n) {
    throw StructureError("name collision after prefixing: '" + n + "'");
  };

  Structure s = parent;
  for (RodSpec r : child.rods_) {
    r.name = rename(r.name);
    if (detail::body_name_taken(s, r.name)) collide(r.name);
    s.rods_.push_back(std::move(r));
  }
  for (MountPoint m : child.mounts_) {
    m.name = rename(m.name);
    if (detail::body_name_taken(s, m.name)) collide(m.name);
    s.mounts_.push_back(std::move(m));
  }
  for (CableSpec c : child.cables_) {
    c.name = rename(c.name);
    if (s.cable_index(c.name)) collide(c.name);
    c.anchor_a.body = rename(c.anchor_a.body);
    c.anchor_b.body = rename(c.anchor_b.body);
    s.cables_.push_back(std::move(c));
  }
  for (FixedAnchor f : child.fixed_) {
    f.rod = rename(f.rod);
    s.fixed_.push_back(std::move(f));
  }
  for (AntagonisticPair p : child.pairs_) {
    p.label = rename(p.label);
    if (s.find_pair(p.label)) collide(p.label);
    p.flexor = rename(p.flexor);
    p.extensor = rename(p.extensor);
    s.pairs_.push_back(std::move(p));
  }
  return s;
}

// Everything named "<prefix>.*", with the prefix stripped. Inverse of compose
// for the child part.
inline Structure filter_by_prefix(const Structure& in, std::string_view prefix) {
  const std::string pre = std::string(prefix) + ".";
  auto has = [&](const std::string& n) { return n.rfind(pre, 0) == 0; };
  auto strip = [&](const std::string& n) { return n.substr(pre.size()); };

  Structure s;
  for (const RodSpec& r : in.rods_)
    if (has(r.name)) s.rods_.push_back({strip(r.name), r.endpoint_a, r.endpoint_b, r.mass, r.radius});
  for (const MountPoint& m : in.mounts_)
    if (has(m.name)) s.mounts_.push_back({strip(m.name), m.position});
  for (CableSpec c : in.cables_) {
    if (!has(c.name) || !has(c.anchor_a.body) || !has(c.anchor_b.body)) continue;
    c.name = strip(c.name);
    c.anchor_a.body = strip(c.anchor_a.body);
    c.anchor_b.body = strip(c.anchor_b.body);
    s.cables_.push_back(std::move(c));
  }
  for (const FixedAnchor& f : in.fixed_)
    if (has(f.rod)) s.fixed_.push_back({strip(f.rod), f.end});
  for (const AntagonisticPair& p : in.pairs_)
    if (has(p.label) && has(p.flexor) && has(p.extensor))
      s.pairs_.push_back({strip(p.label), strip(p.flexor), strip(p.extensor), p.ratio});
  return s;
}

// Equality ignoring declaration order.
inline bool set_equal(const Structure& a, const Structure& b) {
  auto by_name = [](auto v) {
    std::sort(v.begin(), v.end(),
              [](const auto& l, const auto& r) { return l.name < r.name; });
    return v;
  };
  auto fixed_key = [](std::vector<FixedAnchor> v) {
    std::sort(v.begin(), v.end(), [](const auto& l, const auto& r) {
      return std::pair(l.rod, l.end) < std::pair(r.rod, r.end);
    });
    return v;
  };
  auto pair_key = [](std::vector<AntagonisticPair> v) {
    std::sort(v.begin(), v.end(),
              [](const auto& l, const auto& r) { return l.label < r.label; });
    return v;
  };
  return by_name(a.rods()) == by_name(b.rods()) &&
         by_name(a.cables()) == by_name(b.cables()) &&
         by_name(a.mounts()) == by_name(b.mounts()) &&
         fixed_key(a.fixed_anchors()) == fixed_key(b.fixed_anchors()) &&
         pair_key(a.pairs()) == pair_key(b.pairs());
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  kCompressionContact,
  kDanglingAnchor,
  kDisconnected,
  kBadPair,
};

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kCompressionContact: return "compression contact";
    case ViolationKind::kDanglingAnchor: return "dangling anchor";
    case ViolationKind::kDisconnected: return "disconnected";
    case ViolationKind::kBadPair: return "bad pair wiring";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }
  bool has(ViolationKind k) const {
    return std::any_of(violations.begin(), violations.end(),
                       [k](const Violation& v) { return v.kind == k; });
  }
};

// Smallest surface gap between any two rods (axis distance minus radii).
// +infinity with fewer than two rods.
inline double min_rod_clearance(const std::vector<RodSpec>& rods,
                                const std::vector<Vec3>& a,
                                const std::vector<Vec3>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rods.size(); ++i)
    for (std::size_t j = i + 1; j < rods.size(); ++j)
      best = std::min(best, segment_distance(a[i], b[i], a[j], b[j]) -
                                rods[i].radius - rods[j].radius);
  return best;
}

inline ValidationReport validate(const Structure& s) {
  ValidationReport report;
  const auto& rods = s.rods();

  for (std::size_t i = 0; i < rods.size(); ++i)
    for (std::size_t j = i + 1; j < rods.size(); ++j) {
      const double d = segment_distance(rods[i].endpoint_a, rods[i].endpoint_b,
                                        rods[j].endpoint_a, rods[j].endpoint_b);
      if (!(d > rods[i].radius + rods[j].radius))
        report.violations.push_back(
            {ViolationKind::kCompressionContact,
             "rods '" + rods[i].name + "' and '" + rods[j].name +
                 "' touch (axis distance " + std::to_string(d) + " m)"});
    }

  for (const CableSpec& c : s.cables())
    for (const Anchor* a : {&c.anchor_a, &c.anchor_b})
      if (!s.resolves(*a))
        report.violations.push_back({ViolationKind::kDanglingAnchor,
                                     "cable '" + c.name + "' anchor " +
                                         a->to_string() + " does not resolve"});
  for (const FixedAnchor& f : s.fixed_anchors())
    if (!s.rod_index(f.rod))
      report.violations.push_back({ViolationKind::kDanglingAnchor,
                                   "fixed anchor on unknown rod '" + f.rod + "'"});

  // Union-find over rods plus one node standing for the world (all mounts).
  const std::size_t world = rods.size();
  std::vector<std::size_t> parent(rods.size() + 1);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto node = [&](const Anchor& a) -> std::optional<std::size_t> {
    if (a.is_mount()) return s.mount_index(a.body) ? std::optional(world) : std::nullopt;
    return s.rod_index(a.body);
  };
  bool world_used = false;
  for (const CableSpec& c : s.cables()) {
    const auto na = node(c.anchor_a);
    const auto nb = node(c.anchor_b);
    if (!na || !nb) continue;
    world_used = world_used || *na == world || *nb == world;
    parent[find(*na)] = find(*nb);
  }
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < rods.size(); ++i) roots.insert(find(i));
  if (world_used) roots.insert(find(world));
  if (roots.size() > 1)
    report.violations.push_back(
        {ViolationKind::kDisconnected,
         "rods form " + std::to_string(roots.size()) +
             " components joined by cables; expected one"});

  for (const AntagonisticPair& p : s.pairs()) {
    const auto fi = s.cable_index(p.flexor);
    const auto ei = s.cable_index(p.extensor);
    if (!fi || !ei || p.flexor == p.extensor ||
        s.cables()[*fi].role != s.cables()[*ei].role)
      report.violations.push_back(
          {ViolationKind::kBadPair, "pair '" + p.label + "' is miswired"});
  }
  return report;
}

}  // namespace tenjoint
