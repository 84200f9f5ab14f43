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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <cmath>
#include <string_view>

namespace gesto {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Quat = Eigen::Quaterniond;

enum class Tool : std::uint8_t { kSpray = 0, kDripMop = 1 };

inline std::string_view tool_name(Tool tool) {
  return tool == Tool::kSpray ? "spray" : "drip";
}

struct Rgba {
  float r = 1.0f;
  float g = 1.0f;
  float b = 1.0f;
  float a = 1.0f;

  bool operator==(const Rgba&) const = default;
};

// The volatile store keeps the narrowing: GCC 11 at -O3 folds a vectorized
// double -> float -> double pair back into the original doubles.
inline double to_f32(double x) {
  volatile float narrowed = static_cast<float>(x);
  return static_cast<double>(narrowed);
}

inline Vec3 to_f32(const Vec3& v) { return {to_f32(v.x()), to_f32(v.y()), to_f32(v.z())}; }

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

}  // namespace gesto
