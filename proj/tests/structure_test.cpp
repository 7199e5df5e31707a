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

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "tenjoint/elbow.hpp"
#include "tenjoint/structure.hpp"
#include "tenjoint/tsg.hpp"

namespace tenjoint::structure_tests {
namespace {

RodSpec rod(std::string name, Vec3 a, Vec3 b, double mass = 0.05, double radius = 0.005) {
  return {std::move(name), a, b, mass, radius};
}

Structure two_rods() {
  Structure s;
  s = add_rod(s, rod("humerus", {0, 0, 0}, {0, 0, 0.3}));
  s = add_rod(s, rod("forearm", {0.05, 0, -0.05}, {0.3, 0, -0.05}));
  return s;
}

CableSpec active(std::string name, Anchor a, Anchor b, double rest, double lo, double hi) {
  return {std::move(name), std::move(a), std::move(b), 200.0, 2.0, rest,
          CableRole::Active, lo, hi, 0.1, 1.0};
}

TEST(AddRod, AddsNamedRod) {
  Structure s = add_rod(Structure{}, rod("humerus", {0, 0, 0}, {0, 0, 0.3}));
  ASSERT_EQ(s.rods().size(), 1u);
  EXPECT_EQ(s.rods()[0].name, "humerus");
  EXPECT_DOUBLE_EQ(s.rods()[0].length(), 0.3);
}

TEST(AddRod, RejectsDegenerateRods) {
  EXPECT_THROW(add_rod(Structure{}, rod("r", {1, 2, 3}, {1, 2, 3})), StructureError);
  EXPECT_THROW(add_rod(Structure{}, rod("r", {0, 0, 0}, {1, 0, 0}, 0.0)), StructureError);
  EXPECT_THROW(add_rod(Structure{}, rod("r", {0, 0, 0}, {1, 0, 0}, 1.0, -1.0)), StructureError);
}

TEST(AddRod, RejectsDuplicateName) {
  Structure s = add_rod(Structure{}, rod("humerus", {0, 0, 0}, {0, 0, 0.3}));
  EXPECT_THROW(add_rod(s, rod("humerus", {1, 0, 0}, {1, 0, 0.3})), StructureError);
}

TEST(AddRod, RejectsBadIdentifiers) {
  EXPECT_THROW(add_rod(Structure{}, rod("has space", {0, 0, 0}, {1, 0, 0})), StructureError);
  EXPECT_THROW(add_rod(Structure{}, rod("", {0, 0, 0}, {1, 0, 0})), StructureError);
  EXPECT_NO_THROW(add_rod(Structure{}, rod("Rod_1.a-b", {0, 0, 0}, {1, 0, 0})));
}

TEST(AddCable, AddsCable) {
  Structure s = add_cable(two_rods(), active("bicep", Anchor::rod("humerus", EndpointTag::B),
                                             Anchor::rod("forearm", EndpointTag::A), 0.10,
                                             0.05, 0.15));
  ASSERT_EQ(s.cables().size(), 1u);
  EXPECT_EQ(s.cables()[0].anchor_a.to_string(), "humerus.B");
}

TEST(AddCable, RejectsDanglingAnchor) {
  try {
    add_cable(two_rods(), passive_cable("c", Anchor::rod("radius", EndpointTag::A),
                                        Anchor::rod("forearm", EndpointTag::A), 100, 1, 0.1));
    FAIL() << "expected StructureError";
  } catch (const StructureError& e) {
    EXPECT_NE(std::string(e.what()).find("dangling"), std::string::npos);
  }
}

TEST(AddCable, RejectsInvertedLimits) {
  try {
    add_cable(two_rods(), active("c", Anchor::rod("humerus", EndpointTag::B),
                                 Anchor::rod("forearm", EndpointTag::A), 0.15, 0.2, 0.1));
    FAIL() << "expected StructureError";
  } catch (const StructureError& e) {
    EXPECT_NE(std::string(e.what()).find("limits"), std::string::npos);
  }
}

TEST(AddCable, RejectsNonPositiveStiffnessAndSameBody) {
  const Anchor a = Anchor::rod("humerus", EndpointTag::B);
  const Anchor b = Anchor::rod("forearm", EndpointTag::A);
  EXPECT_THROW(add_cable(two_rods(), passive_cable("c", a, b, 0.0, 1, 0.1)), StructureError);
  EXPECT_THROW(add_cable(two_rods(), passive_cable("c", a, b, 10, -1, 0.1)), StructureError);
  EXPECT_THROW(add_cable(two_rods(), passive_cable("c", a, Anchor::rod("humerus", EndpointTag::A),
                                                   10, 1, 0.1)),
               StructureError);
}

TEST(AddPair, RequiresDistinctCablesOfOneRole) {
  Structure s = two_rods();
  const Anchor hb = Anchor::rod("humerus", EndpointTag::B);
  const Anchor ha = Anchor::rod("humerus", EndpointTag::A);
  const Anchor fb = Anchor::rod("forearm", EndpointTag::B);
  s = add_cable(s, active("flex", hb, fb, 0.2, 0.1, 0.3));
  s = add_cable(s, active("ext", ha, fb, 0.4, 0.3, 0.5));
  s = add_cable(s, passive_cable("tie", ha, fb, 100, 1, 0.4));
  EXPECT_THROW(add_pair(s, {"p", "flex", "flex", 1.0}), StructureError);
  EXPECT_THROW(add_pair(s, {"p", "flex", "tie", 1.0}), StructureError);
  EXPECT_THROW(add_pair(s, {"p", "flex", "nope", 1.0}), StructureError);
  EXPECT_NO_THROW(add_pair(s, {"p", "flex", "ext", 1.0}));
}

TEST(Transform, QuarterTurnAboutZ) {
  Structure s = add_rod(Structure{}, rod("r", {1, 0, 0}, {0, 0, 0}));
  Structure t = transform(s, axis_angle(Vec3::UnitZ(), kPi / 2), Vec3::Zero());
  EXPECT_NEAR((t.rods()[0].endpoint_a - Vec3(0, 1, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(t.rods()[0].endpoint_b.norm(), 0.0, 1e-15);
}

TEST(Transform, IdentityIsBitIdentical) {
  const Structure s = build_elbow();
  EXPECT_EQ(transform(s, Quat::Identity(), Vec3::Zero()), s);
}

TEST(Transform, TranslationShiftsZOnly) {
  const Structure s = build_elbow();
  const Structure t = transform(s, Quat::Identity(), Vec3(0, 0, 1));
  for (std::size_t i = 0; i < s.rods().size(); ++i) {
    EXPECT_DOUBLE_EQ(t.rods()[i].endpoint_a.z(), s.rods()[i].endpoint_a.z() + 1.0);
    EXPECT_EQ(t.rods()[i].endpoint_a.x(), s.rods()[i].endpoint_a.x());
  }
  for (const CableSpec& c : s.cables()) {
    const double before = (s.anchor_position(c.anchor_b) - s.anchor_position(c.anchor_a)).norm();
    const double after = (t.anchor_position(c.anchor_b) - t.anchor_position(c.anchor_a)).norm();
    EXPECT_NEAR(after, before, 1e-12 * before);
  }
}

TEST(Transform, RejectsNonUnitQuaternion) {
  EXPECT_THROW(transform(two_rods(), Quat(2, 0, 0, 0), Vec3::Zero()), StructureError);
}

std::vector<Vec3> all_points(const Structure& s) {
  std::vector<Vec3> p;
  for (const RodSpec& r : s.rods()) {
    p.push_back(r.endpoint_a);
    p.push_back(r.endpoint_b);
  }
  for (const MountPoint& m : s.mounts()) p.push_back(m.position);
  return p;
}

TEST(TransformProperty, IsAnIsometry) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  const Structure s = build_elbow();
  const auto before = all_points(s);
  for (int trial = 0; trial < 200; ++trial) {
    const Quat q = Quat(n(rng), n(rng), n(rng), n(rng)).normalized();
    const Structure t = transform(s, q, Vec3(n(rng), n(rng), n(rng)) * 10.0);
    const auto after = all_points(t);
    for (std::size_t i = 0; i < before.size(); ++i)
      for (std::size_t j = i + 1; j < before.size(); ++j) {
        const double d0 = (before[i] - before[j]).norm();
        const double d1 = (after[i] - after[j]).norm();
        ASSERT_LE(std::abs(d1 - d0), 1e-12 * std::max(d0, 1.0)) << trial;
      }
  }
}

TEST(Compose, NamespacesChild) {
  Structure gripper = add_rod(Structure{}, rod("palm", {0.3, 0, -0.05}, {0.35, 0, -0.05}));
  const Structure s = compose(build_elbow(), gripper, "g");
  EXPECT_TRUE(s.rod_index("g.palm").has_value());
  EXPECT_TRUE(s.rod_index("humerus").has_value());
}

TEST(Compose, RejectsCollision) {
  const Structure elbow = build_elbow();
  const Structure once = compose(Structure{}, elbow, "e");
  EXPECT_THROW(compose(once, elbow, "e"), StructureError);
}

TEST(Compose, IntoEmptyRenames) {
  const Structure elbow = build_elbow();
  const Structure s = compose(Structure{}, elbow, "e");
  ASSERT_EQ(s.rods().size(), elbow.rods().size());
  for (std::size_t i = 0; i < s.rods().size(); ++i)
    EXPECT_EQ(s.rods()[i].name, "e." + elbow.rods()[i].name);
  EXPECT_EQ(s.cables()[0].anchor_a.to_string(), "e.humerus.B");
  ASSERT_NE(s.find_pair("e.pitch"), nullptr);
  EXPECT_EQ(s.find_pair("e.pitch")->flexor, "e.bicep");
}

TEST(ComposeProperty, FilterByPrefixRecoversChild) {
  const Structure elbow = build_elbow();
  Structure other = add_rod(Structure{}, rod("palm", {1, 0, 0}, {1.1, 0, 0}));
  other = add_rod(other, rod("finger", {1, 1, 0}, {1.1, 1, 0}));
  other = add_cable(other, passive_cable("tendon", Anchor::rod("palm", EndpointTag::B),
                                         Anchor::rod("finger", EndpointTag::A), 50, 0.1, 0.9));
  for (const Structure* child : {&elbow, static_cast<const Structure*>(&other)}) {
    const Structure s = compose(compose(Structure{}, other, "x"), *child, "child");
    EXPECT_EQ(filter_by_prefix(s, "child"), *child);
  }
}

TEST(Validate, ReferenceElbowPasses) {
  const ValidationReport r = validate(build_elbow());
  EXPECT_TRUE(r.passed()) << (r.passed() ? "" : r.violations[0].message);
}

TEST(Validate, FlagsCompressionContact) {
  Structure s;
  s = add_rod(s, rod("a", {0, 0, 0}, {1, 0, 0}));
  s = add_rod(s, rod("b", {1, 0, 0}, {1, 1, 0}));
  s = add_cable(s, passive_cable("c", Anchor::rod("a", EndpointTag::A),
                                 Anchor::rod("b", EndpointTag::B), 10, 1, 1.0));
  EXPECT_TRUE(validate(s).has(ViolationKind::kCompressionContact));
}

TEST(Validate, FlagsDisconnected) {
  Structure s;
  s = add_rod(s, rod("a", {0, 0, 0}, {1, 0, 0}));
  s = add_rod(s, rod("b", {0, 1, 0}, {1, 1, 0}));
  const ValidationReport r = validate(s);
  EXPECT_TRUE(r.has(ViolationKind::kDisconnected));
  EXPECT_FALSE(r.has(ViolationKind::kCompressionContact));
}

TEST(ValidateProperty, PassImpliesResolvedAnchorsAndClearance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int passed = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Structure s;
    const int nrods = 2 + trial % 3;
    for (int i = 0; i < nrods; ++i)
      s = add_rod(s, rod("r" + std::to_string(i), {u(rng), u(rng), u(rng)},
                         {u(rng), u(rng), u(rng)}, 0.1, 0.05));
    for (int i = 0; i + 1 < nrods; ++i)
      s = add_cable(s, passive_cable("c" + std::to_string(i),
                                     Anchor::rod("r" + std::to_string(i), EndpointTag::B),
                                     Anchor::rod("r" + std::to_string(i + 1), EndpointTag::A),
                                     10, 1, 0.5));
    if (!validate(s).passed()) continue;
    ++passed;
    for (const CableSpec& c : s.cables()) {
      EXPECT_TRUE(s.resolves(c.anchor_a));
      EXPECT_TRUE(s.resolves(c.anchor_b));
    }
    for (std::size_t i = 0; i < s.rods().size(); ++i)
      for (std::size_t j = i + 1; j < s.rods().size(); ++j)
        for (EndpointTag ei : {EndpointTag::A, EndpointTag::B})
          for (EndpointTag ej : {EndpointTag::A, EndpointTag::B})
            EXPECT_GT((s.rods()[i].endpoint(ei) - s.rods()[j].endpoint(ej)).norm(),
                      s.rods()[i].radius + s.rods()[j].radius);
  }
  EXPECT_GT(passed, 50);
}

TEST(BuildOrderProperty, SetEqualUnderPermutation) {
  const Structure ref = build_elbow();
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto rods = ref.rods();
    auto cables = ref.cables();
    auto pairs = ref.pairs();
    std::shuffle(rods.begin(), rods.end(), rng);
    std::shuffle(cables.begin(), cables.end(), rng);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    Structure s;
    for (const MountPoint& m : ref.mounts()) s = add_mount(s, m);
    for (const RodSpec& r : rods) s = add_rod(s, r);
    for (const CableSpec& c : cables) s = add_cable(s, c);
    for (const FixedAnchor& f : ref.fixed_anchors()) s = add_fixed(s, f);
    for (const AntagonisticPair& p : pairs) s = add_pair(s, p);
    EXPECT_TRUE(set_equal(s, ref));
  }
}

TEST(Tsg, RoundTripIsExact) {
  const Structure s = build_elbow();
  EXPECT_EQ(parse_tsg(to_tsg(s, "header line")), s);
}

TEST(Tsg, ParsesCommentsAndAnyDeclarationOrder) {
  const Structure s = parse_tsg(R"(# two rods
cable c a.B b.A 100 1 0.2 passive   # trailing comment
rod a 0 0 0 0 0 1 0.1 0.01
rod b 0 0 -0.5 1 0 -0.5 0.1 0.01
fix a.A
)");
  EXPECT_EQ(s.rods().size(), 2u);
  EXPECT_EQ(s.cables().size(), 1u);
  EXPECT_TRUE(s.is_fixed("a", EndpointTag::A));
}

TEST(Tsg, MalformedNumberReportsLine) {
  try {
    parse_tsg("rod a 0 0 0 0 0 1 0.1 0.01\nrod b 0 0 x 1 0 0 0.1 0.01\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_FALSE(e.rejected());
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Tsg, DanglingAnchorIsRejectedDeclaration) {
  try {
    parse_tsg("rod a 0 0 0 0 0 1 0.1 0.01\ncable bad a.A ghost.B 10 1 0.5 passive\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_TRUE(e.rejected());
    EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
  }
}

TEST(Tsg, ActiveCableNeedsLimits) {
  EXPECT_THROW(parse_tsg("rod a 0 0 0 0 0 1 0.1 0.01\nrod b 1 0 0 1 0 1 0.1 0.01\n"
                         "cable c a.A b.A 10 1 0.5 active\n"),
               ParseError);
}

TEST(Tsg, UnknownDirective) {
  EXPECT_THROW(parse_tsg("spring x\n"), ParseError);
}

}  // namespace
}  // namespace tenjoint::structure_tests
