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

// Command implementations behind the `tenjoint` executable. Each returns the
// process exit code: 0 success, 1 validation or physics failure, 2 usage or
// file errors.

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tenjoint/controllers.hpp"
#include "tenjoint/elbow.hpp"
#include "tenjoint/telemetry.hpp"
#include "tenjoint/text.hpp"
#include "tenjoint/tsg.hpp"

namespace tenjoint::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kGeometryVersion = "reference elbow geometry v1";

// Thrown for malformed invocations; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunManifest {
  std::string structure_path;
  std::string policy = "none";
  double dt = 1e-3;
  double duration = 1.0;
  Vec3 gravity{0.0, 0.0, -9.81};
  std::string output_dir;
  bool seedless = true;  // the simulator has no random state
  SettleOptions settle;
};

inline std::string default_output_dir() {
  const char* env = std::getenv("TENJOINT_OUT");
  return env && *env ? std::string(env) : std::string("tenjoint-out");
}

// `none`, `script:<path>`, or `<pair>:amp=<m>,period=<s>`.
inline Policy parse_policy(const std::string& spec, const Structure& s) {
  if (spec == "none") return null_policy();
  const auto colon = spec.find(':');
  if (colon == std::string::npos || colon == 0)
    throw UsageError("policy must be 'none', 'script:<path>' or '<pair>:amp=..,period=..'");
  const std::string name = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (name == "script") {
    if (rest.empty()) throw UsageError("script policy needs a path");
    return script_policy(s, parse_schedule_csv(read_text_file(rest)), spec);
  }
  std::optional<double> amp, period;
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto end = std::min(rest.find(',', pos), rest.size());
    const std::string kv = rest.substr(pos, end - pos);
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("policy parameter '" + kv + "' is not key=value");
    const std::string key = kv.substr(0, eq);
    const auto value = text::parse_double(kv.substr(eq + 1));
    if (!value) throw UsageError("policy parameter '" + key + "' is not a number");
    if (key == "amp") amp = value;
    else if (key == "period") period = value;
    else throw UsageError("unknown policy parameter '" + key + "'");
    pos = end + 1;
  }
  if (!amp || !period) throw UsageError("pair policy needs amp and period");
  if (!s.find_pair(name)) throw UsageError("structure has no pair '" + name + "'");
  try {
    return periodic_pair_policy(s, name, *amp, *period);
  } catch (const PolicyError& e) {
    throw UsageError(e.what());
  }
}

// Loads and validates; on failure writes the reason to `err` and returns the
// exit code through `code`.
inline std::optional<Structure> load_checked(const std::string& path, std::ostream& err,
                                             int& code) {
  std::string source;
  try {
    source = read_text_file(path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    code = kExitUsage;
    return std::nullopt;
  }
  Structure s;
  try {
    s = parse_tsg(source);
  } catch (const ParseError& e) {
    err << path << ": " << e.what() << "\n";
    code = e.rejected() ? kExitFailure : kExitUsage;
    return std::nullopt;
  }
  const ValidationReport report = validate(s);
  if (!report.passed()) {
    for (const Violation& v : report.violations)
      err << path << ": " << to_string(v.kind) << ": " << v.message << "\n";
    code = kExitFailure;
    return std::nullopt;
  }
  code = kExitOk;
  return s;
}

inline int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  const auto s = load_checked(path, err, code);
  if (!s) return code;
  out << "ok: " << s->rods().size() << " rods, " << s->cables().size() << " cables, "
      << s->pairs().size() << " pairs\n";
  return kExitOk;
}

inline nlohmann::ordered_json vec_json(const Vec3& v) {
  return nlohmann::ordered_json::array({v.x(), v.y(), v.z()});
}

inline int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  if (!(manifest.dt > 0.0) || !(manifest.duration > 0.0) || !all_finite(manifest.gravity)) {
    err << "error: dt and duration must be > 0 and gravity finite\n";
    return kExitUsage;
  }
  int code = kExitOk;
  const auto s = load_checked(manifest.structure_path, err, code);
  if (!s) return code;

  Policy policy;
  try {
    policy = parse_policy(manifest.policy, *s);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const SimConfig config{manifest.dt, manifest.gravity};
  const Model model(*s);
  TelemetryRecord record;
  SettleResult settled;
  try {
    settled = settle(model, initial_state(*s), config, manifest.settle);
    if (!settled.settled)
      err << "warning: structure did not settle within " << manifest.settle.timeout << " s\n";
    SimState start = settled.state;
    start.time = 0.0;
    record = run_policy(model, start, policy, config, {manifest.duration, true});
  } catch (const DivergenceError& e) {
    err << "error: simulation diverged: " << e.what() << "\n";
    return kExitFailure;
  } catch (const PolicyError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }

  const Summary sum = summarize(record);
  nlohmann::ordered_json j;
  j["manifest"] = {{"structure", manifest.structure_path},
                   {"policy", manifest.policy},
                   {"dt", manifest.dt},
                   {"duration", manifest.duration},
                   {"gravity", vec_json(manifest.gravity)},
                   {"seedless", manifest.seedless}};
  j["structure_hash"] = record.meta.structure_hash;
  j["settled"] = settled.settled;
  j["settle_time_s"] = settled.elapsed;
  j["samples"] = sum.samples;
  j["pitch_range_deg"] = sum.pitch_range * 180.0 / kPi;
  j["yaw_range_deg"] = sum.yaw_range * 180.0 / kPi;
  j["pitch_range_rad"] = sum.pitch_range;
  j["yaw_range_rad"] = sum.yaw_range;
  j["energy_drift_j"] = sum.energy_drift;
  j["min_rod_clearance_m"] = sum.min_clearance;
  j["end_effector_excursion_m"] = sum.ee_excursion;
  nlohmann::ordered_json tensions = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < record.cables.size(); ++c)
    tensions[record.cables[c]] = sum.max_tension[c];
  j["max_tension_n"] = tensions;

  const std::string text = j.dump(2) + "\n";
  try {
    const std::filesystem::path dir(manifest.output_dir);
    std::filesystem::create_directories(dir);
    export_csv(record, (dir / "telemetry.csv").string());
    write_text_file((dir / "summary.json").string(), text);
    write_text_file((dir / "plot.svg").string(), plot_svg(record));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  out << text;
  return kExitOk;
}

inline int cmd_probe(const std::string& path, const Vec3& force, const SimConfig& config,
                     const SettleOptions& opts, std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  const auto s = load_checked(path, err, code);
  if (!s) return code;
  try {
    config.check();
    if (!all_finite(force)) throw UsageError("force must be finite");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const Model model(*s);
    const SettleResult base = settle(model, initial_state(*s), config, opts);
    if (!base.settled) {
      err << "error: structure did not settle before probing\n";
      return kExitFailure;
    }
    const ProbeResult r = probe_compliance(model, base.state, force, config, opts);
    using text::format_sig;
    out << "force_n: " << format_sig(force.x(), 9) << " " << format_sig(force.y(), 9) << " "
        << format_sig(force.z(), 9) << "\n";
    out << "displacement_m: " << format_sig(r.displacement.x(), 9) << " "
        << format_sig(r.displacement.y(), 9) << " " << format_sig(r.displacement.z(), 9) << "\n";
    out << "displacement_mm: " << format_sig(r.displacement.norm() * 1e3, 9) << "\n";
    out << "restoration_error_m: " << format_sig(r.restoration_error, 9) << "\n";
    out << "restored: " << (r.restored() ? "yes" : "no") << "\n";
    if (!r.loaded_settled) err << "warning: loaded state did not settle\n";
    return r.restored() ? kExitOk : kExitFailure;
  } catch (const DivergenceError& e) {
    err << "error: simulation diverged: " << e.what() << "\n";
    return kExitFailure;
  }
}

inline int cmd_emit_elbow(const ElbowParams& params, const std::string& path, std::ostream& out,
                          std::ostream& err) {
  try {
    check(params);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  Structure s;
  try {
    s = build_elbow(params);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  try {
    write_text_file(path, to_tsg(s, std::string("tenjoint ") + kGeometryVersion));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  out << "wrote " << path << " (" << s.rods().size() << " rods, " << s.cables().size()
      << " cables, " << s.pairs().size() << " pairs)\n";
  return kExitOk;
}

}  // namespace tenjoint::cli
