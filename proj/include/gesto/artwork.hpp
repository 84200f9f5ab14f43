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

#include <gesto/brush_mesh.hpp>
#include <gesto/canvas.hpp>
#include <gesto/error.hpp>
#include <gesto/stroke_pipeline.hpp>
#include <gesto/types.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace gesto {

/// 128-bit artwork identifier. Canonical text is the 36-character lowercase
/// 8-4-4-4-12 hex form.
struct ArtworkId {
  std::array<std::uint8_t, 16> bytes{};

  static ArtworkId random() {
    static thread_local std::mt19937_64 gen{std::random_device{}()};
    ArtworkId id;
    for (int half = 0; half < 2; ++half) {
      const std::uint64_t word = gen();
      for (int i = 0; i < 8; ++i) id.bytes[half * 8 + i] = static_cast<std::uint8_t>(word >> (8 * i));
    }
    return id;
  }

  static ArtworkId from_words(std::uint64_t hi, std::uint64_t lo) {
    ArtworkId id;
    for (int i = 0; i < 8; ++i) {
      id.bytes[i] = static_cast<std::uint8_t>(hi >> (56 - 8 * i));
      id.bytes[8 + i] = static_cast<std::uint8_t>(lo >> (56 - 8 * i));
    }
    return id;
  }

  std::string to_string() const {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    s.reserve(36);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      if (i == 4 || i == 6 || i == 8 || i == 10) s.push_back('-');
      s.push_back(kHex[bytes[i] >> 4]);
      s.push_back(kHex[bytes[i] & 0xF]);
    }
    return s;
  }

  static std::optional<ArtworkId> parse(std::string_view text) {
    if (text.size() != 36) return std::nullopt;
    ArtworkId id;
    std::size_t out = 0;
    for (std::size_t i = 0; i < text.size();) {
      if (i == 8 || i == 13 || i == 18 || i == 23) {
        if (text[i] != '-') return std::nullopt;
        ++i;
        continue;
      }
      auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
      };
      const int hi = nibble(text[i]);
      const int lo = nibble(text[i + 1]);
      if (hi < 0 || lo < 0) return std::nullopt;
      id.bytes[out++] = static_cast<std::uint8_t>(hi << 4 | lo);
      i += 2;
    }
    return id;
  }

  auto operator<=>(const ArtworkId&) const = default;
};

struct Stroke {
  std::uint64_t id = 0;
  Centerline centerline;
  BrushParams brush;
  DrawMode mode = DrawMode::kFree3D;
  std::vector<DripSeed> drips;

  bool operator==(const Stroke&) const = default;
};

/// World position of a model point p is translation + scale * rotation(p).
struct PlacementTransform {
  Vec3 translation = Vec3::Zero();
  Quat rotation = Quat::Identity();
  double scale = 1.0;

  Vec3 apply(const Vec3& p) const { return translation + scale * rotation._transformVector(p); }

  bool operator==(const PlacementTransform& o) const {
    return translation == o.translation && rotation.coeffs() == o.rotation.coeffs() &&
           scale == o.scale;
  }
};

inline void check_placement(const PlacementTransform& placement) {
  if (!is_finite(placement.translation) || !(placement.scale > 0.0) ||
      !std::isfinite(placement.scale) ||
      !(std::abs(placement.rotation.norm() - 1.0) <= kUnitQuatTolerance)) {
    throw Error(Errc::kInvalidInput,
                "placement needs finite translation, positive scale and a unit rotation");
  }
}

inline constexpr std::size_t kMaxAuthorBytes = 64;
inline constexpr std::size_t kMaxTitleBytes = 256;

class Artwork;
Artwork add_stroke(const Artwork& artwork, Stroke stroke);

/// Named collection of strokes plus a placement. Strokes are reachable only
/// through add_stroke, which keeps ids unique and stroke data quantized to
/// float32 so the binary encoding round-trips exactly.
class Artwork {
 public:
  ArtworkId artwork_id;
  std::string author;
  std::string title;
  std::int64_t created_at = 0;
  std::optional<CanvasPlane> canvas;
  PlacementTransform placement;

  const std::vector<Stroke>& strokes() const { return strokes_; }

  const Stroke* find_stroke(std::uint64_t id) const {
    auto it = std::find_if(strokes_.begin(), strokes_.end(),
                           [id](const Stroke& s) { return s.id == id; });
    return it == strokes_.end() ? nullptr : &*it;
  }

  bool operator==(const Artwork&) const = default;

 private:
  friend Artwork add_stroke(const Artwork& artwork, Stroke stroke);
  std::vector<Stroke> strokes_;
};

inline void check_artwork_header(const Artwork& artwork) {
  if (artwork.author.size() > kMaxAuthorBytes) {
    throw Error(Errc::kInvalidInput, "author exceeds 64 bytes");
  }
  if (artwork.title.size() > kMaxTitleBytes) {
    throw Error(Errc::kInvalidInput, "title exceeds 256 bytes");
  }
  if (artwork.created_at < 0) throw Error(Errc::kInvalidInput, "created_at is negative");
  if (artwork.canvas) check_canvas(*artwork.canvas);
  check_placement(artwork.placement);
}

/// Rounds every stroke scalar to the nearest float32, the precision at which
/// strokes are stored.
inline Stroke quantize_stroke(Stroke s) {
  for (auto& p : s.centerline.points) p = to_f32(p);
  for (auto& t : s.centerline.timestamps) t = to_f32(t);
  for (auto& w : s.centerline.pressure) w = to_f32(w);
  s.brush.base_width = to_f32(s.brush.base_width);
  s.brush.spray_cone_half_angle = to_f32(s.brush.spray_cone_half_angle);
  s.brush.spray_range = to_f32(s.brush.spray_range);
  s.brush.drip_probability = to_f32(s.brush.drip_probability);
  s.brush.drip_max_length = to_f32(s.brush.drip_max_length);
  for (auto& d : s.drips) {
    d.anchor = to_f32(d.anchor);
    d.length = to_f32(d.length);
    d.width = to_f32(d.width);
  }
  return s;
}

/// Appends a stroke. Throws kConflict for a duplicate id and kInvalidInput or
/// kMode for a stroke that cannot be part of this artwork.
inline Artwork add_stroke(const Artwork& artwork, Stroke stroke) {
  if (artwork.find_stroke(stroke.id) != nullptr) {
    throw Error(Errc::kConflict, "stroke id " + std::to_string(stroke.id) + " already present");
  }
  stroke = quantize_stroke(std::move(stroke));
  stroke.centerline.tool = stroke.brush.tool;
  check_centerline(stroke.centerline);
  check_brush(stroke.brush);
  if (stroke.mode == DrawMode::kCanvas2D && !artwork.canvas) {
    throw Error(Errc::kMode, "Canvas2D stroke in an artwork without a canvas");
  }
  if (!stroke.drips.empty() &&
      (stroke.brush.tool != Tool::kDripMop || stroke.mode != DrawMode::kCanvas2D)) {
    throw Error(Errc::kInvalidInput, "only Canvas2D drip-mop strokes carry drips");
  }
  for (const auto& d : stroke.drips) {
    if (!is_finite(d.anchor) || !(d.length >= 0.0) || !std::isfinite(d.length) ||
        !(d.width >= 0.0) || !std::isfinite(d.width)) {
      throw Error(Errc::kInvalidInput, "invalid drip seed");
    }
  }
  Artwork out = artwork;
  out.strokes_.push_back(std::move(stroke));
  return out;
}

inline Artwork gesture_drag(const Artwork& artwork, const Vec3& delta) {
  if (!is_finite(delta)) throw Error(Errc::kParameter, "drag delta must be finite");
  Artwork out = artwork;
  out.placement.translation += delta;
  return out;
}

/// Scales the placed artwork about a world-space pivot:
/// p -> pivot + factor * (p - pivot).
inline Artwork gesture_scale(const Artwork& artwork, double factor, const Vec3& pivot) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(Errc::kParameter, "scale factor must be positive and finite");
  }
  if (!is_finite(pivot)) throw Error(Errc::kParameter, "pivot must be finite");
  Artwork out = artwork;
  out.placement.translation = pivot + factor * (artwork.placement.translation - pivot);
  out.placement.scale = artwork.placement.scale * factor;
  return out;
}

struct RenderConfig {
  int tube_sides = 8;
  CanvasConfig canvas;
  DripConfig drips;
};

/// Model-space mesh for one stroke: a wall-facing ribbon plus drips in
/// Canvas2D, a tube in Free3D.
inline TriangleMesh render_stroke(const Stroke& stroke, const CanvasPlane* canvas,
                                  const RenderConfig& config = {}) {
  if (stroke.mode == DrawMode::kFree3D) {
    return tessellate_tube(stroke.centerline, stroke.brush, config.tube_sides);
  }
  if (canvas == nullptr) throw Error(Errc::kMode, "Canvas2D stroke without a canvas");
  std::vector<TriangleMesh> parts;
  parts.push_back(tessellate_ribbon(stroke.centerline, stroke.brush, canvas->normal));
  if (!stroke.drips.empty()) {
    parts.push_back(render_drips(stroke.drips, *canvas, stroke.brush, config.canvas.lift,
                                 config.drips));
  }
  return merge_meshes(parts);
}

inline TriangleMesh transform_mesh(TriangleMesh mesh, const PlacementTransform& placement) {
  for (auto& v : mesh.vertices) v = placement.apply(v);
  for (auto& n : mesh.normals) n = placement.rotation._transformVector(n).normalized();
  return mesh;
}

/// World-space mesh of the whole artwork, strokes in insertion order.
inline TriangleMesh render_artwork(const Artwork& artwork, const RenderConfig& config = {}) {
  std::vector<TriangleMesh> parts;
  const CanvasPlane* canvas = artwork.canvas ? &*artwork.canvas : nullptr;
  for (const auto& stroke : artwork.strokes()) {
    parts.push_back(render_stroke(stroke, canvas, config));
  }
  return transform_mesh(merge_meshes(parts), artwork.placement);
}

}  // namespace gesto
