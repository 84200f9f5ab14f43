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
#include <gesto/types.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace gesto {

/// One tracked sample of the handheld device.
struct PoseSample {
  double t = 0.0;                    // seconds since session start
  Vec3 position = Vec3::Zero();      // world frame, meters
  Quat orientation = Quat::Identity();
  bool pressed = false;
  Tool tool = Tool::kSpray;
};

inline constexpr double kUnitQuatTolerance = 1e-6;

/// Paint emitter location in the device frame.
class NibOffset {
 public:
  static constexpr double kMaxMagnitude = 0.5;

  NibOffset() = default;
  explicit NibOffset(const Vec3& offset) : offset_(offset) {
    if (!is_finite(offset) || offset.norm() > kMaxMagnitude) {
      throw Error(Errc::kParameter, "nib offset must be finite and at most 0.5 m");
    }
  }

  const Vec3& offset() const { return offset_; }

 private:
  Vec3 offset_{0.0, 0.08, 0.0};
};

struct Centerline {
  std::vector<Vec3> points;
  std::vector<double> timestamps;
  std::vector<double> pressure;
  Tool tool = Tool::kSpray;

  std::size_t size() const { return points.size(); }

  bool operator==(const Centerline&) const = default;
};

/// Throws kInvalidInput unless the parallel arrays agree and are non-empty.
inline void check_centerline(const Centerline& line) {
  if (line.points.empty()) throw Error(Errc::kInvalidInput, "centerline is empty");
  if (line.timestamps.size() != line.points.size() ||
      line.pressure.size() != line.points.size()) {
    throw Error(Errc::kInvalidInput, "centerline arrays differ in length");
  }
  for (std::size_t i = 0; i < line.points.size(); ++i) {
    if (!is_finite(line.points[i]) || !std::isfinite(line.timestamps[i])) {
      throw Error(Errc::kInvalidInput, "non-finite centerline point");
    }
    if (!(line.pressure[i] >= 0.0 && line.pressure[i] <= 1.0)) {
      throw Error(Errc::kInvalidInput, "pressure outside [0, 1]");
    }
  }
}

inline double arc_length(const Centerline& line) {
  double total = 0.0;
  for (std::size_t i = 1; i < line.points.size(); ++i) {
    total += (line.points[i] - line.points[i - 1]).norm();
  }
  return total;
}

inline Vec3 nib_position(const PoseSample& pose, const NibOffset& offset) {
  const double norm = pose.orientation.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitQuatTolerance) {
    throw Error(Errc::kInvalidPose, "orientation is not a unit quaternion");
  }
  return pose.position + pose.orientation._transformVector(offset.offset());
}

/// Splits the stream into one centerline per maximal pressed run, breaking a
/// run wherever the tool changes. Pressure starts at 1 for every point.
inline std::vector<Centerline> segment_strokes(std::span<const PoseSample> stream,
                                               const NibOffset& offset) {
  std::vector<Centerline> lines;
  bool open = false;
  for (const auto& pose : stream) {
    if (!pose.pressed) {
      open = false;
      continue;
    }
    if (!open || lines.back().tool != pose.tool) {
      lines.emplace_back();
      lines.back().tool = pose.tool;
      open = true;
    }
    auto& line = lines.back();
    line.points.push_back(nib_position(pose, offset));
    line.timestamps.push_back(pose.t);
    line.pressure.push_back(1.0);
  }
  return lines;
}

namespace detail {

inline constexpr double kCoincident = 1e-9;

inline void append_sample(Centerline& out, const Centerline& in, std::size_t seg,
                          double s, const Vec3& point) {
  out.points.push_back(point);
  out.timestamps.push_back(in.timestamps[seg] +
                           s * (in.timestamps[seg + 1] - in.timestamps[seg]));
  out.pressure.push_back(in.pressure[seg] + s * (in.pressure[seg + 1] - in.pressure[seg]));
}

inline void append_input(Centerline& out, const Centerline& in, std::size_t i) {
  out.points.push_back(in.points[i]);
  out.timestamps.push_back(in.timestamps[i]);
  out.pressure.push_back(in.pressure[i]);
}

}  // namespace detail

/// Walks the polyline placing each output point at straight-line distance
/// exactly `min_spacing` from the previous one. The first and last input
/// points are kept bit-exact; the final gap may be shorter than the spacing.
/// Timestamps and pressure are interpolated linearly along each segment.
inline Centerline resample(const Centerline& line, double min_spacing) {
  if (!(min_spacing > 0.0) || !std::isfinite(min_spacing)) {
    throw Error(Errc::kParameter, "min_spacing must be positive");
  }
  check_centerline(line);

  Centerline out;
  out.tool = line.tool;
  const std::size_t n = line.points.size();
  const Vec3& last = line.points.back();
  detail::append_input(out, line, 0);
  if (n == 1 || arc_length(line) <= detail::kCoincident) return out;

  const double h2 = min_spacing * min_spacing;
  Vec3 cur = line.points.front();
  std::size_t seg = 0;
  bool on_segment = true;  // cur lies on segment `seg`
  while (seg + 1 < n) {
    const Vec3& a = line.points[seg];
    const Vec3 d = line.points[seg + 1] - a;
    const double dd = d.squaredNorm();
    if (dd == 0.0) {
      ++seg;
      on_segment = false;
      continue;
    }
    const Vec3 f = a - cur;
    const double c = f.squaredNorm() - h2;
    double root = 0.0;
    // A segment start that sits on the sphere (up to rounding) is the hit;
    // otherwise a sharp fold right after it could be skipped.
    if (on_segment || c < -1e-12 * h2) {
      // Larger root of |a + s d - cur|^2 = h^2: where the segment leaves the sphere.
      const double b = 2.0 * f.dot(d);
      const double disc = std::max(b * b - 4.0 * dd * c, 0.0);
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      root = q == 0.0 ? 0.0 : std::max(q / dd, c / q);
    }
    if (root > 1.0) {
      ++seg;
      on_segment = false;
      continue;
    }
    const Vec3 point = a + root * d;
    if (seg + 2 == n && (point - last).norm() <= detail::kCoincident) break;
    detail::append_sample(out, line, seg, root, point);
    cur = point;
    on_segment = true;
    if (root >= 1.0) {
      ++seg;
      on_segment = false;
    }
  }

  if ((out.points.back() - last).norm() <= detail::kCoincident) {
    if (out.points.size() == 1) return out;
    out.points.back() = last;
    out.timestamps.back() = line.timestamps.back();
    out.pressure.back() = line.pressure.back();
  } else {
    detail::append_input(out, line, n - 1);
  }
  return out;
}

/// Centered moving average of positions. Near the ends the window shrinks
/// symmetrically, so endpoints are fixed and straight runs stay straight.
inline Centerline smooth(const Centerline& line, int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(Errc::kParameter, "smoothing window must be a positive odd integer");
  }
  check_centerline(line);
  Centerline out = line;
  const auto n = static_cast<std::ptrdiff_t>(line.points.size());
  const std::ptrdiff_t half_window = window / 2;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t half = std::min({half_window, i, n - 1 - i});
    Vec3 sum = Vec3::Zero();
    for (std::ptrdiff_t j = i - half; j <= i + half; ++j) sum += line.points[j];
    out.points[i] = half == 0 ? line.points[i] : Vec3(sum / static_cast<double>(2 * half + 1));
  }
  return out;
}

}  // namespace gesto
