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

// `.tsg` structure files. One declaration per line, whitespace separated,
// `#` starts a comment:
//
//   rod   <name> <ax> <ay> <az> <bx> <by> <bz> <mass> <radius>
//   mount <name> <x> <y> <z>
//   cable <name> <anchor> <anchor> <k> <b> <rest> <active|passive>
//         [<min> <max> <vmax> <amax>]
//   fix   <rod>.<A|B>
//   pair  <label> <flexor> <extensor> [<ratio>]
//
// An anchor is `<rod>.<A|B>` or `@<mount>`. Rods and mounts may be declared
// anywhere in the file; cables, fixes and pairs resolve against the whole file.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tenjoint/error.hpp"
#include "tenjoint/structure.hpp"
#include "tenjoint/text.hpp"

namespace tenjoint {

namespace detail {

struct TsgLine {
  int number = 0;
  std::vector<std::string> tokens;
};

inline double tsg_number(const TsgLine& l, std::size_t i, const char* what) {
  const auto v = text::parse_double(l.tokens.at(i));
  if (!v)
    throw ParseError(std::string("malformed number for ") + what + ": '" +
                         l.tokens[i] + "'",
                     l.number);
  return *v;
}

inline Anchor tsg_anchor(const TsgLine& l, std::size_t i) {
  const std::string& tok = l.tokens.at(i);
  if (!tok.empty() && tok.front() == '@') {
    if (!is_valid_name(std::string_view(tok).substr(1)))
      throw ParseError("malformed mount reference '" + tok + "'", l.number);
    return Anchor::mount(tok.substr(1));
  }
  const auto dot = tok.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 2 != tok.size() ||
      (tok.back() != 'A' && tok.back() != 'B'))
    throw ParseError("malformed anchor '" + tok + "' (expected <rod>.<A|B> or @<mount>)",
                     l.number);
  return Anchor::rod(tok.substr(0, dot), tok.back() == 'A' ? EndpointTag::A : EndpointTag::B);
}

inline void tsg_arity(const TsgLine& l, std::size_t lo, std::size_t hi) {
  const std::size_t n = l.tokens.size();
  if (n < lo || n > hi)
    throw ParseError("'" + l.tokens[0] + "' expects " + std::to_string(lo - 1) +
                         (hi != lo ? "-" + std::to_string(hi - 1) : std::string()) +
                         " fields, got " + std::to_string(n - 1),
                     l.number);
}

template <typename Fn>
void at_line(const TsgLine& l, Fn&& fn) {
  try {
    fn();
  } catch (const StructureError& e) {
    throw ParseError(e.what(), l.number, true);
  }
}

}  // namespace detail

inline Structure parse_tsg(std::string_view source) {
  using detail::TsgLine;
  std::vector<TsgLine> rods, mounts, cables, fixes, pairs;

  std::istringstream in{std::string(source)};
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream words(raw);
    TsgLine line{number, {}};
    for (std::string w; words >> w;) line.tokens.push_back(w);
    if (line.tokens.empty()) continue;
    const std::string& kw = line.tokens[0];
    if (kw == "rod") rods.push_back(std::move(line));
    else if (kw == "mount") mounts.push_back(std::move(line));
    else if (kw == "cable") cables.push_back(std::move(line));
    else if (kw == "fix") fixes.push_back(std::move(line));
    else if (kw == "pair") pairs.push_back(std::move(line));
    else throw ParseError("unknown directive '" + kw + "'", number);
  }

  Structure s;
  for (const TsgLine& l : rods) {
    detail::tsg_arity(l, 10, 10);
    RodSpec r{l.tokens[1],
              {detail::tsg_number(l, 2, "ax"), detail::tsg_number(l, 3, "ay"),
               detail::tsg_number(l, 4, "az")},
              {detail::tsg_number(l, 5, "bx"), detail::tsg_number(l, 6, "by"),
               detail::tsg_number(l, 7, "bz")},
              detail::tsg_number(l, 8, "mass"),
              detail::tsg_number(l, 9, "radius")};
    detail::at_line(l, [&] { s = add_rod(std::move(s), std::move(r)); });
  }
  for (const TsgLine& l : mounts) {
    detail::tsg_arity(l, 5, 5);
    MountPoint m{l.tokens[1],
                 {detail::tsg_number(l, 2, "x"), detail::tsg_number(l, 3, "y"),
                  detail::tsg_number(l, 4, "z")}};
    detail::at_line(l, [&] { s = add_mount(std::move(s), std::move(m)); });
  }
  for (const TsgLine& l : cables) {
    if (l.tokens.size() != 8 && l.tokens.size() != 12)
      throw ParseError("'cable' expects 7 or 11 fields, got " +
                           std::to_string(l.tokens.size() - 1),
                       l.number);
    CableSpec c;
    c.name = l.tokens[1];
    c.anchor_a = detail::tsg_anchor(l, 2);
    c.anchor_b = detail::tsg_anchor(l, 3);
    c.stiffness_k = detail::tsg_number(l, 4, "k");
    c.damping_b = detail::tsg_number(l, 5, "b");
    c.rest_length = detail::tsg_number(l, 6, "rest");
    if (l.tokens[7] == "active") c.role = CableRole::Active;
    else if (l.tokens[7] == "passive") c.role = CableRole::Passive;
    else throw ParseError("role must be 'active' or 'passive', got '" + l.tokens[7] + "'", l.number);
    if (l.tokens.size() == 12) {
      c.min_length = detail::tsg_number(l, 8, "min");
      c.max_length = detail::tsg_number(l, 9, "max");
      c.max_velocity = detail::tsg_number(l, 10, "vmax");
      c.max_acceleration = detail::tsg_number(l, 11, "amax");
    } else if (c.is_active()) {
      throw ParseError("active cable '" + c.name + "' needs <min> <max> <vmax> <amax>", l.number);
    } else {
      c.min_length = c.max_length = c.rest_length;
    }
    detail::at_line(l, [&] { s = add_cable(std::move(s), std::move(c)); });
  }
  for (const TsgLine& l : fixes) {
    detail::tsg_arity(l, 2, 2);
    const Anchor a = detail::tsg_anchor(l, 1);
    if (a.is_mount()) throw ParseError("'fix' takes a rod endpoint", l.number);
    detail::at_line(l, [&] { s = add_fixed(std::move(s), {a.body, *a.end}); });
  }
  for (const TsgLine& l : pairs) {
    detail::tsg_arity(l, 4, 5);
    AntagonisticPair p{l.tokens[1], l.tokens[2], l.tokens[3], 1.0};
    if (l.tokens.size() == 5) p.ratio = detail::tsg_number(l, 4, "ratio");
    detail::at_line(l, [&] { s = add_pair(std::move(s), std::move(p)); });
  }
  return s;
}

// Canonical text. Numbers use the shortest exact representation, so
// parse_tsg(to_tsg(s)) == s.
inline std::string to_tsg(const Structure& s, std::string_view header = {}) {
  using text::format_exact;
  std::string out;
  if (!header.empty()) {
    std::istringstream h{std::string(header)};
    for (std::string line; std::getline(h, line);) out += "# " + line + "\n";
  }
  auto vec = [](const Vec3& v) {
    return format_exact(v.x()) + " " + format_exact(v.y()) + " " + format_exact(v.z());
  };
  for (const RodSpec& r : s.rods())
    out += "rod " + r.name + " " + vec(r.endpoint_a) + " " + vec(r.endpoint_b) + " " +
           format_exact(r.mass) + " " + format_exact(r.radius) + "\n";
  for (const MountPoint& m : s.mounts()) out += "mount " + m.name + " " + vec(m.position) + "\n";
  for (const CableSpec& c : s.cables()) {
    out += "cable " + c.name + " " + c.anchor_a.to_string() + " " + c.anchor_b.to_string() +
           " " + format_exact(c.stiffness_k) + " " + format_exact(c.damping_b) + " " +
           format_exact(c.rest_length) + " " + std::string(to_string(c.role));
    if (c.is_active() || c.min_length != c.rest_length || c.max_length != c.rest_length ||
        c.max_velocity != 0.0 || c.max_acceleration != 0.0)
      out += " " + format_exact(c.min_length) + " " + format_exact(c.max_length) + " " +
             format_exact(c.max_velocity) + " " + format_exact(c.max_acceleration);
    out += "\n";
  }
  for (const FixedAnchor& f : s.fixed_anchors())
    out += "fix " + f.rod + "." + to_char(f.end) + "\n";
  for (const AntagonisticPair& p : s.pairs()) {
    out += "pair " + p.label + " " + p.flexor + " " + p.extensor;
    if (p.ratio != 1.0) out += " " + format_exact(p.ratio);
    out += "\n";
  }
  return out;
}

// Throws Error when the file cannot be read.
inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path + "'");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error("write failed for '" + path + "'");
}

inline Structure load_tsg(const std::string& path) { return parse_tsg(read_text_file(path)); }

}  // namespace tenjoint
