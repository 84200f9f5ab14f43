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

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace gesto {

struct CanvasConfig {
  double bounds_padding = 0.05;  // meters added around the scanned extent
  double lift = 0.001;           // Canvas2D strokes sit this far in front of the wall
};

struct CanvasBounds {
  double u_min = 0.0;
  double u_max = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;

  bool operator==(const CanvasBounds&) const = default;
};

/// Registered wall: {x : normal . x == offset}, with an in-plane (u, v) frame
/// whose origin is offset * normal.
struct CanvasPlane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  Vec3 u_axis = Vec3::UnitX();
  Vec3 v_axis = Vec3::UnitY();
  CanvasBounds bounds{-1.0, 1.0, -1.0, 1.0};
  double fit_rms = 0.0;

  Vec3 origin() const { return offset * normal; }
  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }

  bool operator==(const CanvasPlane&) const = default;
};

enum class DrawMode : std::uint8_t { kCanvas2D = 0, kFree3D = 1 };

/// Throws kInvalidInput when the frame is not orthonormal or bounds are empty.
inline void check_canvas(const CanvasPlane& plane) {
  constexpr double kTol = 1e-6;
  const bool finite = is_finite(plane.normal) && is_finite(plane.u_axis) &&
                      is_finite(plane.v_axis) && std::isfinite(plane.offset) &&
                      std::isfinite(plane.fit_rms);
  if (!finite || std::abs(plane.normal.norm() - 1.0) > kTol ||
      std::abs(plane.u_axis.norm() - 1.0) > kTol ||
      std::abs(plane.v_axis.norm() - 1.0) > kTol ||
      std::abs(plane.u_axis.dot(plane.v_axis)) > kTol ||
      std::abs(plane.u_axis.dot(plane.normal)) > kTol ||
      std::abs(plane.v_axis.dot(plane.normal)) > kTol) {
    throw Error(Errc::kInvalidInput, "canvas frame is not orthonormal");
  }
  if (!(plane.bounds.u_min < plane.bounds.u_max) || !(plane.bounds.v_min < plane.bounds.v_max)) {
    throw Error(Errc::kInvalidInput, "canvas bounds are empty");
  }
  if (!(plane.fit_rms >= 0.0)) throw Error(Errc::kInvalidInput, "negative fit_rms");
}

/// Horizontal in-plane axis for a wall; falls back to world x for floors and
/// ceilings where up x normal vanishes.
inline Vec3 canvas_u_axis(const Vec3& normal) {
  const Vec3 up_cross = Vec3::UnitY().cross(normal);
  if (up_cross.norm() > 1e-3) return up_cross.normalized();
  return Vec3::UnitX().cross(normal).normalized();
}

struct CanvasProjection {
  Vec2 uv;
  Vec3 world;
  double distance = 0.0;
};

inline CanvasProjection project_to_canvas(const Vec3& point, const CanvasPlane& plane) {
  CanvasProjection out;
  out.distance = plane.signed_distance(point);
  out.world = point - out.distance * plane.normal;
  const Vec3 rel = out.world - plane.origin();
  out.uv = Vec2(rel.dot(plane.u_axis), rel.dot(plane.v_axis));
  return out;
}

/// Total-least-squares plane through the sample centroid.
///
/// The normal is the covariance eigenvector with the smallest eigenvalue. With
/// a view direction the normal is oriented to face the viewer
/// (normal . view_dir < 0); otherwise the first of its z, y, x components that
/// is not ~0 is made positive. Throws kDegenerateScan for fewer than three
/// samples or a collinear set, and kScanTooNoisy when fit_rms > max_rms.
inline CanvasPlane fit_plane(std::span<const Vec3> samples, double max_rms,
                             const std::optional<Vec3>& view_dir = std::nullopt,
                             const CanvasConfig& config = {}) {
  if (samples.size() < 3) {
    throw Error(Errc::kDegenerateScan, "need at least 3 samples");
  }
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : samples) {
    if (!is_finite(p)) throw Error(Errc::kInvalidInput, "non-finite scan sample");
    centroid += p;
  }
  centroid /= static_cast<double>(samples.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : samples) {
    const Vec3 d = p - centroid;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(samples.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Vec3 eig = solver.eigenvalues();  // ascending
  const double scale = std::max(eig(2), std::numeric_limits<double>::min());
  if (eig(2) <= 1e-24 || eig(1) <= 1e-12 * scale) {
    throw Error(Errc::kDegenerateScan, "scan samples are coincident or collinear");
  }

  Vec3 normal = solver.eigenvectors().col(0).normalized();
  bool flip = false;
  if (view_dir) {
    flip = normal.dot(*view_dir) > 0.0;
  } else {
    for (int axis : {2, 1, 0}) {
      if (std::abs(normal(axis)) > 1e-9) {
        flip = normal(axis) < 0.0;
        break;
      }
    }
  }
  if (flip) normal = -normal;

  CanvasPlane plane;
  plane.normal = normal;
  plane.offset = normal.dot(centroid);
  plane.u_axis = canvas_u_axis(normal);
  plane.v_axis = normal.cross(plane.u_axis).normalized();

  double sum_sq = 0.0;
  double u_min = std::numeric_limits<double>::infinity();
  double u_max = -u_min;
  double v_min = u_min;
  double v_max = -u_min;
  for (const auto& p : samples) {
    const auto proj = project_to_canvas(p, plane);
    sum_sq += proj.distance * proj.distance;
    u_min = std::min(u_min, proj.uv.x());
    u_max = std::max(u_max, proj.uv.x());
    v_min = std::min(v_min, proj.uv.y());
    v_max = std::max(v_max, proj.uv.y());
  }
  const double pad = config.bounds_padding;
  plane.bounds = {u_min - pad, u_max + pad, v_min - pad, v_max + pad};
  plane.fit_rms = std::sqrt(sum_sq / static_cast<double>(samples.size()));
  if (plane.fit_rms > max_rms) {
    throw Error(Errc::kScanTooNoisy, "fit rms " + std::to_string(plane.fit_rms) +
                                         " exceeds " + std::to_string(max_rms));
  }
  return plane;
}

/// Canvas2D flattens the stroke onto the wall and lifts it by config.lift
/// along the normal; Free3D returns the stroke unchanged.
inline Centerline constrain_stroke(const Centerline& line, const CanvasPlane* plane,
                                   DrawMode mode, const CanvasConfig& config = {}) {
  if (mode == DrawMode::kFree3D) return line;
  if (plane == nullptr) {
    throw Error(Errc::kMode, "Canvas2D drawing requires a registered canvas");
  }
  Centerline out = line;
  for (auto& p : out.points) {
    p = project_to_canvas(p, *plane).world + config.lift * plane->normal;
  }
  return out;
}

inline Centerline constrain_stroke(const Centerline& line, const std::optional<CanvasPlane>& plane,
                                   DrawMode mode, const CanvasConfig& config = {}) {
  return constrain_stroke(line, plane ? &*plane : nullptr, mode, config);
}

/// Spray pressure: 1 at the wall falling linearly to 0 at spray_range. Without
/// a canvas, and for the drip mop, pressure stays 1.
inline Centerline apply_pressure(const Centerline& line, const CanvasPlane* plane,
                                 double spray_range) {
  Centerline out = line;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    double pressure = 1.0;
    if (line.tool == Tool::kSpray && plane != nullptr) {
      const double dist = std::abs(plane->signed_distance(line.points[i]));
      pressure = std::clamp(1.0 - dist / spray_range, 0.0, 1.0);
    }
    out.pressure[i] = pressure;
  }
  return out;
}

}  // namespace gesto
