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

#include <gesto/canvas.hpp>
#include <gesto/error.hpp>
#include <gesto/rng.hpp>
#include <gesto/stroke_pipeline.hpp>
#include <gesto/types.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace gesto {

struct BrushParams {
  Tool tool = Tool::kSpray;
  double base_width = 0.02;
  Rgba color;
  double spray_cone_half_angle = 15.0 * std::numbers::pi / 180.0;
  double spray_range = 1.0;
  double drip_probability = 0.3;
  double drip_max_length = 0.15;

  bool operator==(const BrushParams&) const = default;
};

inline void check_brush(const BrushParams& p) {
  auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!(p.base_width > 0.0) || !std::isfinite(p.base_width)) {
    throw Error(Errc::kParameter, "base_width must be positive");
  }
  if (!in01(p.color.r) || !in01(p.color.g) || !in01(p.color.b) || !in01(p.color.a)) {
    throw Error(Errc::kParameter, "color channels must lie in [0, 1]");
  }
  if (!(p.spray_cone_half_angle > 0.0) ||
      !(p.spray_cone_half_angle <= std::numbers::pi / 4 + 1e-7)) {
    throw Error(Errc::kParameter, "spray cone half-angle must lie in (0, pi/4]");
  }
  if (!(p.spray_range > 0.0) || !std::isfinite(p.spray_range)) {
    throw Error(Errc::kParameter, "spray_range must be positive");
  }
  if (!in01(p.drip_probability)) {
    throw Error(Errc::kParameter, "drip_probability must lie in [0, 1]");
  }
  if (!(p.drip_max_length >= 0.0) || !std::isfinite(p.drip_max_length)) {
    throw Error(Errc::kParameter, "drip_max_length must be non-negative");
  }
}

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
  std::vector<Rgba> colors;
  std::vector<std::uint32_t> indices;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return indices.size() / 3; }
  bool empty() const { return vertices.empty(); }

  bool operator==(const TriangleMesh&) const = default;
};

struct DripSeed {
  Vec3 anchor = Vec3::Zero();
  double length = 0.0;
  double width = 0.0;

  bool operator==(const DripSeed&) const = default;
};

/// Every drip-model constant in one place.
struct DripConfig {
  std::size_t candidate_stride = 4;  // every k-th centerline point is a candidate
  double length_min_fraction = 0.3;  // of drip_max_length
  double length_max_fraction = 1.0;
  double start_width_fraction = 0.4;  // of base_width
  double end_width_fraction = 0.15;
  double plane_tolerance = 1e-4;
  Vec3 gravity{0.0, -1.0, 0.0};
};

namespace detail {

inline std::vector<std::size_t> distinct_points(const Centerline& line) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < line.points.size(); ++i) {
    if (keep.empty() || (line.points[i] - line.points[keep.back()]).norm() > 1e-12) {
      keep.push_back(i);
    }
  }
  return keep;
}

/// Unit tangents: one-sided at the ends, central differences inside.
inline std::vector<Vec3> tangents(const std::vector<Vec3>& pts) {
  const std::size_t n = pts.size();
  std::vector<Vec3> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    Vec3 t = pts[hi] - pts[lo];
    if (t.norm() <= 1e-12) t = pts[std::min(i + 1, n - 1)] - pts[i];
    if (t.norm() <= 1e-12) t = pts[i] - pts[i - 1];
    out[i] = t.normalized();
  }
  return out;
}

inline Vec3 any_perpendicular(const Vec3& v) {
  const Vec3 a = v.cwiseAbs();
  Vec3 axis = Vec3::UnitX();
  if (a.y() <= a.x() && a.y() <= a.z()) {
    axis = Vec3::UnitY();
  } else if (a.z() <= a.x() && a.z() <= a.y()) {
    axis = Vec3::UnitZ();
  }
  return (axis - axis.dot(v) * v).normalized();
}

}  // namespace detail

/// Flat strip facing `facing_normal`: 2N vertices and 2(N-1) triangles with
/// counter-clockwise winding seen from the facing side. Point i spans
/// base_width * pressure_i across side_i = normalize(tangent_i x facing_normal).
inline TriangleMesh tessellate_ribbon(const Centerline& line, const BrushParams& params,
                                      const Vec3& facing_normal) {
  TriangleMesh mesh;
  const auto keep = detail::distinct_points(line);
  if (keep.size() < 2) return mesh;

  std::vector<Vec3> pts;
  pts.reserve(keep.size());
  for (auto i : keep) pts.push_back(line.points[i]);
  const auto tangents = detail::tangents(pts);
  const Vec3 facing = facing_normal.normalized();

  const std::size_t n = pts.size();
  mesh.vertices.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    Vec3 side = tangents[k].cross(facing);
    side = side.norm() > 1e-12 ? side.normalized() : detail::any_perpendicular(facing);
    const double half = 0.5 * params.base_width * line.pressure[keep[k]];
    mesh.vertices.push_back(pts[k] + half * side);
    mesh.vertices.push_back(pts[k] - half * side);
  }
  mesh.normals.assign(mesh.vertices.size(), facing);
  mesh.colors.assign(mesh.vertices.size(), params.color);
  mesh.indices.reserve(6 * (n - 1));
  for (std::uint32_t k = 0; k + 1 < n; ++k) {
    const std::uint32_t r0 = 2 * k, l0 = 2 * k + 1, r1 = 2 * k + 2, l1 = 2 * k + 3;
    mesh.indices.insert(mesh.indices.end(), {r0, r1, l0, r1, l1, l0});
  }
  return mesh;
}

/// Regular `sides`-gon swept along the centerline with parallel-transported
/// frames; N * sides vertices, 2 (N-1) sides triangles, no end caps.
inline TriangleMesh tessellate_tube(const Centerline& line, const BrushParams& params,
                                    int sides) {
  if (sides < 3) throw Error(Errc::kParameter, "tube needs at least 3 sides");
  TriangleMesh mesh;
  const auto keep = detail::distinct_points(line);
  if (keep.size() < 2) return mesh;

  std::vector<Vec3> pts;
  for (auto i : keep) pts.push_back(line.points[i]);
  const auto tangents = detail::tangents(pts);
  const std::size_t n = pts.size();
  const auto ring = static_cast<std::size_t>(sides);

  std::vector<double> cos_table(ring), sin_table(ring);
  for (std::size_t j = 0; j < ring; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / sides;
    cos_table[j] = std::cos(theta);
    sin_table[j] = std::sin(theta);
  }

  mesh.vertices.reserve(n * ring);
  mesh.normals.reserve(n * ring);
  Vec3 frame_n = detail::any_perpendicular(tangents[0]);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      const Quat turn = Quat::FromTwoVectors(tangents[k - 1], tangents[k]);
      frame_n = turn._transformVector(frame_n);
      // Re-orthogonalize against drift.
      frame_n = (frame_n - frame_n.dot(tangents[k]) * tangents[k]).normalized();
    }
    const Vec3 frame_b = tangents[k].cross(frame_n);
    const double radius = 0.5 * params.base_width * line.pressure[keep[k]];
    for (std::size_t j = 0; j < ring; ++j) {
      const Vec3 radial = cos_table[j] * frame_n + sin_table[j] * frame_b;
      mesh.vertices.push_back(pts[k] + radius * radial);
      mesh.normals.push_back(radial.normalized());
    }
  }
  mesh.colors.assign(mesh.vertices.size(), params.color);
  mesh.indices.reserve(6 * (n - 1) * ring);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t j = 0; j < ring; ++j) {
      const auto a = static_cast<std::uint32_t>(k * ring + j);
      const auto b = static_cast<std::uint32_t>(k * ring + (j + 1) % ring);
      const auto c = static_cast<std::uint32_t>((k + 1) * ring + j);
      const auto d = static_cast<std::uint32_t>((k + 1) * ring + (j + 1) % ring);
      mesh.indices.insert(mesh.indices.end(), {a, b, d, a, d, c});
    }
  }
  return mesh;
}

struct SprayEllipse {
  Vec3 center;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  Vec3 major_axis_dir;
};

/// Footprint of the spray cone on the canvas, or nothing when the nozzle ray
/// misses the wall, points away from it, or the wall is out of range.
inline std::optional<SprayEllipse> spray_footprint(const Vec3& nib, const Vec3& device_forward,
                                                   const CanvasPlane& plane,
                                                   const BrushParams& params) {
  const double cos_inc = plane.normal.dot(device_forward);
  if (std::abs(cos_inc) < 1e-6) return std::nullopt;
  const double dist = -plane.signed_distance(nib) / cos_inc;
  if (dist < 0.0 || dist > params.spray_range) return std::nullopt;

  SprayEllipse out;
  out.center = nib + dist * device_forward;
  out.semi_minor = dist * std::tan(params.spray_cone_half_angle);
  out.semi_major = out.semi_minor / std::max(std::abs(cos_inc), 0.1);
  const Vec3 in_plane = device_forward - cos_inc * plane.normal;
  out.major_axis_dir = in_plane.norm() > 1e-9 ? Vec3(in_plane.normalized()) : plane.u_axis;
  return out;
}

/// Gravity projected into the canvas, or nothing for a horizontal canvas.
inline std::optional<Vec3> drip_direction(const CanvasPlane& plane, const DripConfig& config = {}) {
  const Vec3 g = config.gravity - config.gravity.dot(plane.normal) * plane.normal;
  if (g.norm() < 1e-9) return std::nullopt;
  return g.normalized();
}

/// Two-point centerline running down the wall from the seed anchor. Pressure
/// carries the taper, so rendering with base_width = seed.width narrows the
/// drip from start_width to end_width.
inline Centerline drip_centerline(const DripSeed& seed, const Vec3& direction, double t,
                                  const DripConfig& config = {}) {
  Centerline line;
  line.tool = Tool::kDripMop;
  line.points = {seed.anchor, seed.anchor + seed.length * direction};
  line.timestamps = {t, t};
  line.pressure = {1.0, config.end_width_fraction / config.start_width_fraction};
  return line;
}

struct DripResult {
  std::vector<DripSeed> seeds;
  std::vector<Centerline> lines;
};

/// Stochastic gravity drips along a drip-mop stroke lying on the canvas.
///
/// Candidates are centerline points 0, k, 2k, ... (k = candidate_stride).
/// For each candidate in order one uniform draw u accepts it when
/// u < drip_probability; an accepted candidate takes a second draw for its
/// length, drip_max_length * lerp(length_min_fraction, length_max_fraction, u).
inline DripResult drip_simulate(const Centerline& line, const CanvasPlane& plane,
                                const BrushParams& params, std::uint64_t rng_seed,
                                const DripConfig& config = {}) {
  if (params.tool != Tool::kDripMop) {
    throw Error(Errc::kParameter, "drip simulation needs the drip mop tool");
  }
  check_centerline(line);
  for (const auto& p : line.points) {
    if (std::abs(plane.signed_distance(p)) > config.plane_tolerance) {
      throw Error(Errc::kInvalidInput, "drip stroke does not lie on the canvas");
    }
  }
  DripResult result;
  const auto direction = drip_direction(plane, config);
  if (!direction) return result;

  Xorshift64Star rng(rng_seed);
  const double span = config.length_max_fraction - config.length_min_fraction;
  for (std::size_t i = 0; i < line.points.size(); i += config.candidate_stride) {
    if (!(rng.uniform() < params.drip_probability)) continue;
    DripSeed seed;
    seed.anchor = project_to_canvas(line.points[i], plane).world;
    seed.length = params.drip_max_length * (config.length_min_fraction + span * rng.uniform());
    seed.width = config.start_width_fraction * params.base_width;
    result.lines.push_back(drip_centerline(seed, *direction, line.timestamps[i], config));
    result.seeds.push_back(seed);
  }
  return result;
}

/// Ribbons for stored drip seeds, lifted `lift` meters off the wall.
inline TriangleMesh render_drips(std::span<const DripSeed> seeds, const CanvasPlane& plane,
                                 const BrushParams& params, double lift,
                                 const DripConfig& config = {});

inline TriangleMesh merge_meshes(std::span<const TriangleMesh> meshes) {
  if (meshes.size() == 1) return meshes.front();
  TriangleMesh out;
  for (const auto& m : meshes) {
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
    out.normals.insert(out.normals.end(), m.normals.begin(), m.normals.end());
    out.colors.insert(out.colors.end(), m.colors.begin(), m.colors.end());
    for (auto idx : m.indices) out.indices.push_back(base + idx);
  }
  return out;
}

inline TriangleMesh render_drips(std::span<const DripSeed> seeds, const CanvasPlane& plane,
                                 const BrushParams& params, double lift,
                                 const DripConfig& config) {
  const auto direction = drip_direction(plane, config);
  if (!direction) return {};
  std::vector<TriangleMesh> parts;
  parts.reserve(seeds.size());
  for (const auto& seed : seeds) {
    DripSeed lifted = seed;
    lifted.anchor += lift * plane.normal;
    BrushParams drip_params = params;
    drip_params.base_width = seed.width;
    parts.push_back(tessellate_ribbon(drip_centerline(lifted, *direction, 0.0, config),
                                      drip_params, plane.normal));
  }
  return merge_meshes(parts);
}

}  // namespace gesto
