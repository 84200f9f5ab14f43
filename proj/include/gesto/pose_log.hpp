// Copyright 2026 The Gesto Authors.
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

#include <gesto/error.hpp>
#include <gesto/stroke_pipeline.hpp>
#include <gesto/types.hpp>

#include "json.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

// JSON Lines readers and writers for pose logs and wall-scan samples.
//
//   pose log:  {"t":0.016,"p":[x,y,z],"q":[w,x,y,z],"pressed":true,"tool":"spray"}
//   scan:      [x,y,z]
//
// Blank lines are ignored. Every failure is a ParseError naming the line.

namespace gesto {

namespace detail {

inline ParseError json_line_error(std::size_t line, const nlohmann::json::parse_error& e) {
  return ParseError(line, e.byte == 0 ? 1 : e.byte, e.what());
}

inline Vec3 read_vec3(const nlohmann::json& j, std::size_t line, const char* field) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(line, 1, std::string("'") + field + "' must be an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) {
      throw ParseError(line, 1, std::string("'") + field + "' must contain numbers");
    }
    v(i) = j[i].get<double>();
  }
  if (!is_finite(v)) throw ParseError(line, 1, std::string("'") + field + "' is not finite");
  return v;
}

inline bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace detail

inline std::vector<PoseSample> read_pose_log(std::istream& in) {
  std::vector<PoseSample> samples;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (detail::blank(text)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw detail::json_line_error(line, e);
    }
    if (!j.is_object()) throw ParseError(line, 1, "pose sample must be an object");
    for (const char* key : {"t", "p", "q", "pressed", "tool"}) {
      if (!j.contains(key)) throw ParseError(line, 1, std::string("missing field '") + key + "'");
    }
    PoseSample s;
    if (!j["t"].is_number() || !std::isfinite(j["t"].get<double>())) {
      throw ParseError(line, 1, "'t' must be a finite number");
    }
    s.t = j["t"].get<double>();
    s.position = detail::read_vec3(j["p"], line, "p");
    const auto& q = j["q"];
    if (!q.is_array() || q.size() != 4 || !q[0].is_number() || !q[1].is_number() ||
        !q[2].is_number() || !q[3].is_number()) {
      throw ParseError(line, 1, "'q' must be an array of 4 numbers [w,x,y,z]");
    }
    s.orientation = Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                         q[3].get<double>());
    if (std::abs(s.orientation.norm() - 1.0) > kUnitQuatTolerance) {
      throw ParseError(line, 1, "'q' is not a unit quaternion");
    }
    if (!j["pressed"].is_boolean()) throw ParseError(line, 1, "'pressed' must be a boolean");
    s.pressed = j["pressed"].get<bool>();
    const auto& tool = j["tool"];
    if (tool == "spray") {
      s.tool = Tool::kSpray;
    } else if (tool == "drip") {
      s.tool = Tool::kDripMop;
    } else {
      throw ParseError(line, 1, "'tool' must be \"spray\" or \"drip\"");
    }
    if (!samples.empty() && !(s.t > samples.back().t)) {
      throw ParseError(line, 1, "timestamps must be strictly increasing");
    }
    samples.push_back(s);
  }
  return samples;
}

inline std::vector<PoseSample> parse_pose_log(const std::string& text) {
  std::istringstream in(text);
  return read_pose_log(in);
}

inline void write_pose_log(std::ostream& out, std::span<const PoseSample> samples) {
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["t"] = s.t;
    j["p"] = {s.position.x(), s.position.y(), s.position.z()};
    j["q"] = {s.orientation.w(), s.orientation.x(), s.orientation.y(), s.orientation.z()};
    j["pressed"] = s.pressed;
    j["tool"] = tool_name(s.tool);
    out << j.dump() << '\n';
  }
}

inline std::vector<Vec3> read_scan_samples(std::istream& in) {
  std::vector<Vec3> samples;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (detail::blank(text)) continue;
    try {
      samples.push_back(detail::read_vec3(nlohmann::json::parse(text), line, "sample"));
    } catch (const nlohmann::json::parse_error& e) {
      throw detail::json_line_error(line, e);
    }
  }
  return samples;
}

}  // namespace gesto
