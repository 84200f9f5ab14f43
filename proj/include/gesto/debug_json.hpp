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
#include <gesto/error.hpp>
#include <gesto/gstb.hpp>

#include "json.hpp"

#include <string>
#include <string_view>

// Human-readable mirror of a GSTB payload. Field order follows the binary
// layout. Stroke scalars are float32 values widened to double and printed as
// the shortest decimal that round-trips the double, so text -> binary is
// exact.

namespace gesto {

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson vec_json(const Vec3& v) { return ojson::array({v.x(), v.y(), v.z()}); }

inline std::string_view mode_name(DrawMode mode) {
  return mode == DrawMode::kCanvas2D ? "canvas2d" : "free3d";
}

class JsonReader {
 public:
  explicit JsonReader(const nlohmann::json& root) : root_(root) {}

  const nlohmann::json& at(const nlohmann::json& obj, const std::string& key,
                           const std::string& path) const {
    if (!obj.is_object() || !obj.contains(key)) {
      throw Error(Errc::kParse, "missing required field '" + key + "' at " + path);
    }
    return obj[key];
  }

  double number(const nlohmann::json& obj, const std::string& key, const std::string& path) const {
    const auto& v = at(obj, key, path);
    if (!v.is_number()) throw Error(Errc::kParse, "field '" + key + "' at " + path + " must be a number");
    return v.get<double>();
  }

  std::string string(const nlohmann::json& obj, const std::string& key,
                     const std::string& path) const {
    const auto& v = at(obj, key, path);
    if (!v.is_string()) throw Error(Errc::kParse, "field '" + key + "' at " + path + " must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const nlohmann::json& v, std::size_t n, const std::string& path) const {
    if (!v.is_array() || v.size() != n) {
      throw Error(Errc::kParse, path + " must be an array of " + std::to_string(n) + " numbers");
    }
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw Error(Errc::kParse, path + " must contain only numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  Vec3 vec3(const nlohmann::json& obj, const std::string& key, const std::string& path) const {
    const auto xs = numbers(at(obj, key, path), 3, path + "/" + key);
    return {xs[0], xs[1], xs[2]};
  }

  const nlohmann::json& root() const { return root_; }

 private:
  const nlohmann::json& root_;
};

inline ParseError text_error(std::string_view text, std::size_t byte, const std::string& what) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return ParseError(line, column, what);
}

}  // namespace detail

inline std::string to_debug_json(const Artwork& artwork) {
  using detail::ojson;
  ojson j;
  j["format"] = "GSTB";
  j["version"] = gstb::kVersion;
  j["artwork_id"] = artwork.artwork_id.to_string();
  j["created_at"] = artwork.created_at;
  j["author"] = artwork.author;
  j["title"] = artwork.title;
  if (artwork.canvas) {
    const auto& c = *artwork.canvas;
    j["canvas"] = {{"normal", detail::vec_json(c.normal)},
                   {"offset", c.offset},
                   {"u_axis", detail::vec_json(c.u_axis)},
                   {"v_axis", detail::vec_json(c.v_axis)},
                   {"bounds", ojson::array({c.bounds.u_min, c.bounds.u_max, c.bounds.v_min,
                                            c.bounds.v_max})},
                   {"fit_rms", c.fit_rms}};
  } else {
    j["canvas"] = nullptr;
  }
  j["strokes"] = ojson::array();
  for (const auto& s : artwork.strokes()) {
    ojson stroke;
    stroke["id"] = s.id;
    stroke["tool"] = tool_name(s.brush.tool);
    stroke["mode"] = detail::mode_name(s.mode);
    const auto& b = s.brush;
    stroke["brush"] = {
        {"base_width", b.base_width},
        {"color", ojson::array({static_cast<double>(b.color.r), static_cast<double>(b.color.g),
                                static_cast<double>(b.color.b), static_cast<double>(b.color.a)})},
        {"spray_cone_half_angle", b.spray_cone_half_angle},
        {"spray_range", b.spray_range},
        {"drip_probability", b.drip_probability},
        {"drip_max_length", b.drip_max_length}};
    ojson points = ojson::array();
    const auto& line = s.centerline;
    for (std::size_t i = 0; i < line.points.size(); ++i) {
      const auto& p = line.points[i];
      points.push_back(ojson::array({p.x(), p.y(), p.z(), line.timestamps[i], line.pressure[i]}));
    }
    stroke["points"] = std::move(points);
    ojson drips = ojson::array();
    for (const auto& d : s.drips) {
      drips.push_back(
          ojson::array({d.anchor.x(), d.anchor.y(), d.anchor.z(), d.length, d.width}));
    }
    stroke["drips"] = std::move(drips);
    j["strokes"].push_back(std::move(stroke));
  }
  const auto& p = artwork.placement;
  j["placement"] = {
      {"translation", detail::vec_json(p.translation)},
      {"rotation", ojson::array({p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z()})},
      {"scale", p.scale}};
  return j.dump(2) + "\n";
}

/// Inverse of to_debug_json. Syntax errors are ParseErrors with line and
/// column; missing or mistyped fields name the field and its JSON path.
inline Artwork from_debug_json(std::string_view text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw detail::text_error(text, e.byte, e.what());
  }
  detail::JsonReader r(root);
  if (!root.is_object()) throw Error(Errc::kParse, "document must be a JSON object");
  if (r.string(root, "format", "/") != "GSTB") throw Error(Errc::kFormat, "format is not GSTB");
  const double version = r.number(root, "version", "/");
  if (version != gstb::kVersion) {
    throw Error(Errc::kVersion, "unsupported GSTB version " + std::to_string(version));
  }

  Artwork artwork;
  const auto id = ArtworkId::parse(r.string(root, "artwork_id", "/"));
  if (!id) throw Error(Errc::kParse, "field 'artwork_id' is not a canonical id");
  artwork.artwork_id = *id;
  const auto& created = r.at(root, "created_at", "/");
  if (!created.is_number_integer()) throw Error(Errc::kParse, "field 'created_at' must be an integer");
  artwork.created_at = created.get<std::int64_t>();
  artwork.author = r.string(root, "author", "/");
  artwork.title = r.string(root, "title", "/");

  const auto& canvas = r.at(root, "canvas", "/");
  if (!canvas.is_null()) {
    CanvasPlane c;
    c.normal = r.vec3(canvas, "normal", "/canvas");
    c.offset = r.number(canvas, "offset", "/canvas");
    c.u_axis = r.vec3(canvas, "u_axis", "/canvas");
    c.v_axis = r.vec3(canvas, "v_axis", "/canvas");
    const auto b = r.numbers(r.at(canvas, "bounds", "/canvas"), 4, "/canvas/bounds");
    c.bounds = {b[0], b[1], b[2], b[3]};
    c.fit_rms = r.number(canvas, "fit_rms", "/canvas");
    check_canvas(c);
    artwork.canvas = c;
  }

  const auto& strokes = r.at(root, "strokes", "/");
  if (!strokes.is_array()) throw Error(Errc::kParse, "field 'strokes' must be an array");
  for (std::size_t k = 0; k < strokes.size(); ++k) {
    const auto& js = strokes[k];
    const std::string path = "/strokes/" + std::to_string(k);
    Stroke s;
    const auto& id_field = r.at(js, "id", path);
    if (!id_field.is_number_unsigned()) {
      throw Error(Errc::kParse, "field 'id' at " + path + " must be an unsigned integer");
    }
    s.id = id_field.get<std::uint64_t>();
    const auto tool = r.string(js, "tool", path);
    if (tool != "spray" && tool != "drip") throw Error(Errc::kParse, "unknown tool at " + path);
    s.brush.tool = tool == "spray" ? Tool::kSpray : Tool::kDripMop;
    const auto mode = r.string(js, "mode", path);
    if (mode != "canvas2d" && mode != "free3d") throw Error(Errc::kParse, "unknown mode at " + path);
    s.mode = mode == "canvas2d" ? DrawMode::kCanvas2D : DrawMode::kFree3D;

    const auto& jb = r.at(js, "brush", path);
    const std::string bpath = path + "/brush";
    s.brush.base_width = r.number(jb, "base_width", bpath);
    const auto color = r.numbers(r.at(jb, "color", bpath), 4, bpath + "/color");
    s.brush.color = {static_cast<float>(color[0]), static_cast<float>(color[1]),
                     static_cast<float>(color[2]), static_cast<float>(color[3])};
    s.brush.spray_cone_half_angle = r.number(jb, "spray_cone_half_angle", bpath);
    s.brush.spray_range = r.number(jb, "spray_range", bpath);
    s.brush.drip_probability = r.number(jb, "drip_probability", bpath);
    s.brush.drip_max_length = r.number(jb, "drip_max_length", bpath);

    const auto& points = r.at(js, "points", path);
    if (!points.is_array()) throw Error(Errc::kParse, "field 'points' at " + path + " must be an array");
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto xs = r.numbers(points[i], 5, path + "/points/" + std::to_string(i));
      s.centerline.points.emplace_back(xs[0], xs[1], xs[2]);
      s.centerline.timestamps.push_back(xs[3]);
      s.centerline.pressure.push_back(xs[4]);
    }
    const auto& drips = r.at(js, "drips", path);
    if (!drips.is_array()) throw Error(Errc::kParse, "field 'drips' at " + path + " must be an array");
    for (std::size_t i = 0; i < drips.size(); ++i) {
      const auto xs = r.numbers(drips[i], 5, path + "/drips/" + std::to_string(i));
      s.drips.push_back({Vec3(xs[0], xs[1], xs[2]), xs[3], xs[4]});
    }
    artwork = add_stroke(artwork, std::move(s));
  }

  const auto& jp = r.at(root, "placement", "/");
  artwork.placement.translation = r.vec3(jp, "translation", "/placement");
  const auto q = r.numbers(r.at(jp, "rotation", "/placement"), 4, "/placement/rotation");
  artwork.placement.rotation = Quat(q[0], q[1], q[2], q[3]);
  artwork.placement.scale = r.number(jp, "scale", "/placement");
  check_artwork_header(artwork);
  return artwork;
}

}  // namespace gesto
