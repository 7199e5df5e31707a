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

// Per-step recording, settling, compliance probes, CSV export and run
// summaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tenjoint/dynamics.hpp"
#include "tenjoint/elbow.hpp"
#include "tenjoint/error.hpp"
#include "tenjoint/text.hpp"
#include "tenjoint/tsg.hpp"

namespace tenjoint {

struct TelemetryRow {
  double time = 0.0;
  Vec3 end_effector = Vec3::Zero();
  double pitch = 0.0;
  double yaw = 0.0;
  std::vector<double> lengths;
  std::vector<double> rests;
  std::vector<double> tensions;
  double energy = 0.0;
  // Not exported; NaN after a CSV round trip.
  double min_clearance = std::numeric_limits<double>::quiet_NaN();
};

struct RunMetadata {
  std::string structure_hash;
  double dt = 0.0;
  Vec3 gravity = Vec3::Zero();
  std::string policy;
};

struct TelemetryRecord {
  std::vector<std::string> cables;
  std::vector<TelemetryRow> rows;
  RunMetadata meta;

  bool empty() const { return rows.empty(); }
};

// FNV-1a over the canonical .tsg text, as 16 hex digits.
inline std::string structure_hash(const Structure& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : to_tsg(s)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

inline TelemetryRow sample(const Model& m, const SimState& s, const SimConfig& config,
                           ElbowGauge* gauge) {
  TelemetryRow row;
  row.time = s.time;
  row.end_effector = end_effector(m, s);
  if (gauge) {
    const JointAngles a = gauge->measure(m, s);
    row.pitch = a.pitch;
    row.yaw = a.yaw;
  }
  for (const CableState& c : cable_states(m, s)) {
    row.lengths.push_back(c.current_length);
    row.tensions.push_back(c.tension);
  }
  row.rests = s.rest_lengths;
  row.energy = total_energy(m, s, config);
  row.min_clearance = min_rod_clearance(m, s);
  return row;
}

inline TelemetryRecord empty_record(const Structure& s, const SimConfig& config,
                                    std::string policy) {
  TelemetryRecord r;
  for (const CableSpec& c : s.cables()) r.cables.push_back(c.name);
  r.meta = {structure_hash(s), config.dt, config.gravity, std::move(policy)};
  return r;
}

// ---------------------------------------------------------------------------
// Settling and probing

struct SettleOptions {
  double tolerance = 1e-4;  // m/s, max endpoint speed
  double timeout = 30.0;    // s simulated
};

struct SettleResult {
  SimState state;
  bool settled = false;
  double elapsed = 0.0;
};

// Passive simulation (rest lengths held) until every rod endpoint moves
// slower than the tolerance, both in the returned state and one step later.
// The look-ahead keeps a state that is momentarily at rest under an
// unbalanced load from passing.
inline SettleResult settle(const Model& m, const SimState& start, const SimConfig& config,
                           const SettleOptions& opts = {},
                           std::span<const PointLoad> loads = {}) {
  config.check();
  SettleResult r{start, false, 0.0};
  const auto max_steps = static_cast<long>(std::ceil(opts.timeout / config.dt - 1e-9));
  bool calm = max_endpoint_speed(m, r.state) < opts.tolerance;
  for (long i = 0;; ++i) {
    SimState next = step(m, r.state, std::span<const double>{}, config, loads);
    const bool next_calm = max_endpoint_speed(m, next) < opts.tolerance;
    if (calm && next_calm) {
      r.settled = true;
      break;
    }
    if (i >= max_steps) break;
    r.state = std::move(next);
    r.elapsed = static_cast<double>(i + 1) * config.dt;
    calm = next_calm;
  }
  return r;
}

struct ProbeResult {
  Vec3 force = Vec3::Zero();
  Vec3 displacement = Vec3::Zero();  // loaded minus unloaded end-effector
  double restoration_error = 0.0;    // |released - unloaded|, m
  bool loaded_settled = false;
  bool released_settled = false;
  SimState loaded;
  SimState released;

  static constexpr double kRestoreTolerance = 1e-3;
  bool restored() const { return released_settled && restoration_error <= kRestoreTolerance; }
};

// Constant force at the end-effector, re-settle, then release and re-settle.
inline ProbeResult probe_compliance(const Model& m, const SimState& settled, const Vec3& force,
                                    const SimConfig& config, const SettleOptions& opts = {}) {
  if (!all_finite(force)) throw ParameterError("probe force must be finite");
  if (!(max_endpoint_speed(m, settled) < opts.tolerance))
    throw ParameterError("probe requires a settled input state");
  const std::size_t ee = end_effector_rod(m.structure());
  const PointLoad load{m.structure().rods()[ee].name, EndpointTag::B, force};
  const Vec3 origin = end_effector(m, settled);

  ProbeResult r;
  r.force = force;
  SettleResult loaded = settle(m, settled, config, opts, std::span<const PointLoad>(&load, 1));
  r.loaded_settled = loaded.settled;
  r.displacement = end_effector(m, loaded.state) - origin;
  r.loaded = loaded.state;
  SettleResult released = settle(m, loaded.state, config, opts);
  r.released_settled = released.settled;
  r.restoration_error = (end_effector(m, released.state) - origin).norm();
  r.released = released.state;
  return r;
}

// ---------------------------------------------------------------------------
// CSV

inline std::vector<std::string> csv_header(const TelemetryRecord& r) {
  std::vector<std::string> h{"time", "ee_x", "ee_y", "ee_z", "pitch", "yaw"};
  for (const std::string& c : r.cables) {
    h.push_back(c + ".length");
    h.push_back(c + ".rest");
    h.push_back(c + ".tension");
  }
  h.push_back("energy");
  return h;
}

namespace detail {

inline std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string q = "\"";
  for (char c : f) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// Splits one RFC 4180 record starting at `pos`; advances past its line break.
inline std::vector<std::string> csv_record(std::string_view text, std::size_t& pos, int line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          fields.back() += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      return fields;
    } else {
      fields.back() += c;
    }
    ++pos;
  }
  if (quoted) throw ParseError("unterminated quoted field", line);
  return fields;
}

}  // namespace detail

// Header plus one row per sample; 9 significant digits, CRLF line endings.
inline std::string export_csv(const TelemetryRecord& r) {
  if (r.empty()) throw Error("telemetry record is empty");
  const std::size_t nc = r.cables.size();
  std::string out;
  const auto header = csv_header(r);
  for (std::size_t i = 0; i < header.size(); ++i)
    out += (i ? "," : "") + detail::csv_field(header[i]);
  out += "\r\n";
  auto num = [&](double v) { out += text::format_sig(v, 9); };
  for (const TelemetryRow& row : r.rows) {
    if (row.lengths.size() != nc || row.rests.size() != nc || row.tensions.size() != nc)
      throw Error("telemetry row width does not match cable list");
    num(row.time);
    for (double v : {row.end_effector.x(), row.end_effector.y(), row.end_effector.z(),
                     row.pitch, row.yaw}) {
      out += ',';
      num(v);
    }
    for (std::size_t c = 0; c < nc; ++c) {
      for (double v : {row.lengths[c], row.rests[c], row.tensions[c]}) {
        out += ',';
        num(v);
      }
    }
    out += ',';
    num(row.energy);
    out += "\r\n";
  }
  return out;
}

inline void export_csv(const TelemetryRecord& r, const std::string& path) {
  write_text_file(path, export_csv(r));
}

// Inverse of export_csv (metadata is not part of the file).
inline TelemetryRecord parse_csv(std::string_view text) {
  TelemetryRecord r;
  std::size_t pos = 0;
  int line = 1;
  if (text.empty()) throw ParseError("empty CSV", 0);
  const auto header = detail::csv_record(text, pos, line);
  const std::vector<std::string> fixed{"time", "ee_x", "ee_y", "ee_z", "pitch", "yaw"};
  if (header.size() < fixed.size() + 1 || (header.size() - fixed.size() - 1) % 3 != 0 ||
      !std::equal(fixed.begin(), fixed.end(), header.begin()) || header.back() != "energy")
    throw ParseError("unexpected telemetry header", line);
  const std::size_t nc = (header.size() - fixed.size() - 1) / 3;
  for (std::size_t c = 0; c < nc; ++c) {
    const std::string& f = header[fixed.size() + 3 * c];
    const auto dot = f.rfind(".length");
    if (dot == std::string::npos || dot + 7 != f.size())
      throw ParseError("unexpected column '" + f + "'", line);
    const std::string name = f.substr(0, dot);
    if (header[fixed.size() + 3 * c + 1] != name + ".rest" ||
        header[fixed.size() + 3 * c + 2] != name + ".tension")
      throw ParseError("cable columns for '" + name + "' are out of order", line);
    r.cables.push_back(name);
  }
  while (pos < text.size()) {
    ++line;
    const auto fields = detail::csv_record(text, pos, line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line);
    std::vector<double> v;
    for (const std::string& f : fields) {
      const auto d = text::parse_double(f);
      if (!d) throw ParseError("malformed number '" + f + "'", line);
      v.push_back(*d);
    }
    TelemetryRow row;
    row.time = v[0];
    row.end_effector = Vec3(v[1], v[2], v[3]);
    row.pitch = v[4];
    row.yaw = v[5];
    for (std::size_t c = 0; c < nc; ++c) {
      row.lengths.push_back(v[6 + 3 * c]);
      row.rests.push_back(v[7 + 3 * c]);
      row.tensions.push_back(v[8 + 3 * c]);
    }
    row.energy = v.back();
    r.rows.push_back(std::move(row));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Analysis

struct Summary {
  std::size_t samples = 0;
  double duration = 0.0;
  double pitch_min = 0.0, pitch_max = 0.0;
  double yaw_min = 0.0, yaw_max = 0.0;
  double pitch_range = 0.0;
  double yaw_range = 0.0;
  std::vector<double> max_tension;  // per cable
  double energy_drift = 0.0;        // last minus first
  double min_clearance = std::numeric_limits<double>::infinity();
  double ee_excursion = 0.0;  // max distance from the first sample
};

inline Summary summarize(const TelemetryRecord& r) {
  if (r.empty()) throw Error("telemetry record is empty");
  Summary s;
  const TelemetryRow& first = r.rows.front();
  s.samples = r.rows.size();
  s.duration = r.rows.back().time - first.time;
  s.pitch_min = s.pitch_max = first.pitch;
  s.yaw_min = s.yaw_max = first.yaw;
  s.max_tension.assign(r.cables.size(), 0.0);
  for (const TelemetryRow& row : r.rows) {
    s.pitch_min = std::min(s.pitch_min, row.pitch);
    s.pitch_max = std::max(s.pitch_max, row.pitch);
    s.yaw_min = std::min(s.yaw_min, row.yaw);
    s.yaw_max = std::max(s.yaw_max, row.yaw);
    for (std::size_t c = 0; c < s.max_tension.size(); ++c)
      s.max_tension[c] = std::max(s.max_tension[c], row.tensions[c]);
    if (!std::isnan(row.min_clearance)) s.min_clearance = std::min(s.min_clearance, row.min_clearance);
    s.ee_excursion = std::max(s.ee_excursion, (row.end_effector - first.end_effector).norm());
  }
  s.pitch_range = s.pitch_max - s.pitch_min;
  s.yaw_range = s.yaw_max - s.yaw_min;
  s.energy_drift = r.rows.back().energy - first.energy;
  return s;
}

// Unit normal of the least-squares plane through the points (sign chosen
// with non-negative z).
inline Vec3 fit_plane_normal(const std::vector<Vec3>& points) {
  if (points.size() < 3) throw Error("plane fit needs at least 3 points");
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Mat3 scatter = Mat3::Zero();
  for (const Vec3& p : points) scatter += (p - mean) * (p - mean).transpose();
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  Vec3 n = eig.eigenvectors().col(0).normalized();
  return n.z() < 0.0 ? Vec3(-n) : n;
}

// Twice the mean spacing of crossings of the series mean (both directions),
// with linear interpolation. nullopt with fewer than three crossings.
inline std::optional<double> estimate_period(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size() || t.size() < 3) return std::nullopt;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  std::vector<double> crossings;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double a = y[i - 1] - mean, b = y[i] - mean;
    if ((a < 0.0) != (b < 0.0)) crossings.push_back(t[i - 1] + (t[i] - t[i - 1]) * (a / (a - b)));
  }
  if (crossings.size() < 3) return std::nullopt;
  return 2.0 * (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

inline std::vector<Vec3> end_effector_path(const TelemetryRecord& r) {
  std::vector<Vec3> out;
  out.reserve(r.rows.size());
  for (const TelemetryRow& row : r.rows) out.push_back(row.end_effector);
  return out;
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x, y;
};

inline std::string svg_panel(const std::string& title, const std::vector<Series>& series,
                             double ox, double oy, double w, double h) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto f = [](double v) { return text::format_sig(v, 6); };
  std::string out = "<rect x=\"" + f(ox) + "\" y=\"" + f(oy) + "\" width=\"" + f(w) +
                    "\" height=\"" + f(h) + "\" fill=\"none\" stroke=\"#888\"/>\n";
  out += "<text x=\"" + f(ox + 4) + "\" y=\"" + f(oy - 6) + "\" font-size=\"12\">" + title +
         " [" + f(y0) + ", " + f(y1) + "]</text>\n";
  double ly = oy + 14;
  for (const Series& s : series) {
    const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 2000);
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); i += stride) {
      const double px = ox + (s.x[i] - x0) / (x1 - x0) * w;
      const double py = oy + h - (s.y[i] - y0) / (y1 - y0) * h;
      out += f(px) + "," + f(py) + " ";
    }
    out += "\"/>\n<text x=\"" + f(ox + w - 60) + "\" y=\"" + f(ly) + "\" font-size=\"11\" fill=\"" +
           s.color + "\">" + s.label + "</text>\n";
    ly += 14;
  }
  return out;
}

}  // namespace detail

// End-effector path (x-z and x-y) and pitch/yaw against time.
inline std::string plot_svg(const TelemetryRecord& r) {
  if (r.empty()) throw Error("telemetry record is empty");
  detail::Series xz{"x-z", "#1f77b4", {}, {}}, xy{"x-y", "#d62728", {}, {}};
  detail::Series pitch{"pitch", "#1f77b4", {}, {}}, yaw{"yaw", "#d62728", {}, {}};
  for (const TelemetryRow& row : r.rows) {
    xz.x.push_back(row.end_effector.x());
    xz.y.push_back(row.end_effector.z());
    xy.x.push_back(row.end_effector.x());
    xy.y.push_back(row.end_effector.y());
    pitch.x.push_back(row.time);
    pitch.y.push_back(row.pitch * 180.0 / kPi);
    yaw.x.push_back(row.time);
    yaw.y.push_back(row.yaw * 180.0 / kPi);
  }
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"720\">\n";
  out += detail::svg_panel("end-effector x-z (m)", {xz}, 40, 30, 400, 300);
  out += detail::svg_panel("end-effector x-y (m)", {xy}, 520, 30, 400, 300);
  out += detail::svg_panel("pitch / yaw (deg) vs time", {pitch, yaw}, 40, 390, 880, 300);
  out += "</svg>\n";
  return out;
}

}  // namespace tenjoint
