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

#include <gesto/artwork.hpp>
#include <gesto/brush_mesh.hpp>
#include <gesto/canvas.hpp>
#include <gesto/stroke_pipeline.hpp>

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gesto {

struct PipelineConfig {
  NibOffset nib;
  double min_spacing = 0.005;
  int smoothing_window = 3;
  DrawMode mode = DrawMode::kCanvas2D;
  std::optional<CanvasPlane> canvas;
  BrushParams brush;  // tool is taken from each stroke
  std::uint64_t seed = 0;
  RenderConfig render;
};

/// pose stream -> strokes: segment, pressure, resample, smooth, constrain,
/// and drips for Canvas2D drip-mop strokes. Stroke ids are 1, 2, ... in
/// stream order and stroke k draws its drips with seed + k.
inline std::vector<Stroke> build_strokes(std::span<const PoseSample> poses,
                                         const PipelineConfig& config) {
  if (config.mode == DrawMode::kCanvas2D && !config.canvas) {
    throw Error(Errc::kMode, "Canvas2D replay requires a registered canvas");
  }
  const CanvasPlane* canvas = config.canvas ? &*config.canvas : nullptr;
  std::vector<Stroke> strokes;
  std::uint64_t next_id = 1;
  for (auto& raw : segment_strokes(poses, config.nib)) {
    Stroke stroke;
    stroke.id = next_id++;
    stroke.mode = config.mode;
    stroke.brush = config.brush;
    stroke.brush.tool = raw.tool;
    check_brush(stroke.brush);

    Centerline line = apply_pressure(raw, canvas, stroke.brush.spray_range);
    line = smooth(resample(line, config.min_spacing), config.smoothing_window);
    stroke.centerline = constrain_stroke(line, canvas, config.mode, config.render.canvas);

    if (config.mode == DrawMode::kCanvas2D && raw.tool == Tool::kDripMop) {
      CanvasConfig flat = config.render.canvas;
      flat.lift = 0.0;
      const Centerline on_wall = constrain_stroke(line, canvas, config.mode, flat);
      stroke.drips = drip_simulate(on_wall, *canvas, stroke.brush, config.seed + stroke.id,
                                   config.render.drips)
                         .seeds;
    }
    strokes.push_back(std::move(stroke));
  }
  return strokes;
}

inline Artwork build_artwork(std::span<const PoseSample> poses, const PipelineConfig& config,
                             Artwork base = {}) {
  base.canvas = config.canvas;
  for (auto& stroke : build_strokes(poses, config)) base = add_stroke(base, std::move(stroke));
  return base;
}

struct ReplayStats {
  std::size_t strokes = 0;
  std::size_t vertices = 0;
  std::size_t triangles = 0;
  double arc_length = 0.0;

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["strokes"] = strokes;
    j["vertices"] = vertices;
    j["triangles"] = triangles;
    j["arc_length_m"] = arc_length;
    return j.dump();
  }
};

struct ReplayResult {
  Artwork artwork;
  TriangleMesh mesh;
  ReplayStats stats;
};

inline ReplayResult replay(std::span<const PoseSample> poses, const PipelineConfig& config) {
  ReplayResult result;
  result.artwork = build_artwork(poses, config);
  result.mesh = render_artwork(result.artwork, config.render);
  result.stats.strokes = result.artwork.strokes().size();
  result.stats.vertices = result.mesh.vertex_count();
  result.stats.triangles = result.mesh.triangle_count();
  for (const auto& s : result.artwork.strokes()) result.stats.arc_length += arc_length(s.centerline);
  return result;
}

}  // namespace gesto
