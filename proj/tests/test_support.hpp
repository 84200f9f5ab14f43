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

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace gesto::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(GESTO_FIXTURE_DIR) / name;
}

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 gen{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() /
            ("gesto-test-" + std::to_string(gen()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

/// Runs a shell command, capturing stdout (stderr is merged when asked).
inline CommandResult run_command(const std::string& cmd, bool merge_stderr = false) {
  CommandResult result;
  const std::string full = merge_stderr ? cmd + " 2>&1" : cmd + " 2>/dev/null";
  FILE* pipe = ::popen(full.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline Vec3 random_vec(std::mt19937_64& gen, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return {d(gen), d(gen), d(gen)};
}

inline Quat random_rotation(std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quat q(n(gen), n(gen), n(gen), n(gen));
  q.normalize();
  return q;
}

/// Random walk with steps well above 1e-12 so no consecutive points coincide.
inline Centerline random_centerline(std::mt19937_64& gen, std::size_t n, double step = 0.02) {
  Centerline line;
  Vec3 p = random_vec(gen, -1.0, 1.0);
  std::uniform_real_distribution<double> pressure(0.2, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    line.points.push_back(p);
    line.timestamps.push_back(static_cast<double>(i) / 60.0);
    line.pressure.push_back(pressure(gen));
    Vec3 dir = random_vec(gen, -1.0, 1.0);
    if (dir.norm() < 1e-3) dir = Vec3::UnitX();
    p += step * dir.normalized();
  }
  return line;
}

/// Random plane-aligned canvas (not a fitted one).
inline CanvasPlane random_canvas(std::mt19937_64& gen) {
  CanvasPlane plane;
  plane.normal = random_vec(gen, -1.0, 1.0).normalized();
  plane.offset = std::uniform_real_distribution<double>(-2.0, 2.0)(gen);
  plane.u_axis = canvas_u_axis(plane.normal);
  plane.v_axis = plane.normal.cross(plane.u_axis).normalized();
  plane.bounds = {-1.0, 1.0, -1.0, 1.0};
  return plane;
}

inline std::string random_utf8(std::mt19937_64& gen, std::size_t max_bytes) {
  static const std::array<std::string, 6> pieces = {"a", "Z", "7", " ", "\xC3\xA9", "\xE2\x9C\x93"};
  std::string s;
  const std::size_t target = std::uniform_int_distribution<std::size_t>(0, max_bytes)(gen);
  while (true) {
    const auto& piece = pieces[gen() % pieces.size()];
    if (s.size() + piece.size() > target) break;
    s += piece;
  }
  return s;
}

/// Artwork with random header, optional canvas, strokes, drips and placement.
inline Artwork random_artwork(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Artwork a;
  a.artwork_id = ArtworkId::from_words(gen(), gen());
  a.author = random_utf8(gen, kMaxAuthorBytes);
  a.title = random_utf8(gen, kMaxTitleBytes);
  a.created_at = static_cast<std::int64_t>(gen() >> 20);
  if (gen() % 2 == 0) a.canvas = random_canvas(gen);
  a.placement.translation = random_vec(gen, -5.0, 5.0);
  a.placement.rotation = random_rotation(gen);
  a.placement.scale = 0.1 + 3.0 * unit(gen);

  const std::size_t strokes = gen() % 5;
  for (std::size_t k = 0; k < strokes; ++k) {
    Stroke s;
    s.id = gen();
    s.brush.tool = gen() % 2 == 0 ? Tool::kSpray : Tool::kDripMop;
    s.brush.base_width = 0.001 + 0.1 * unit(gen);
    s.brush.color = {static_cast<float>(unit(gen)), static_cast<float>(unit(gen)),
                     static_cast<float>(unit(gen)), static_cast<float>(unit(gen))};
    s.brush.spray_cone_half_angle = 0.01 + 0.7 * unit(gen);
    s.brush.spray_range = 0.1 + unit(gen);
    s.brush.drip_probability = unit(gen);
    s.brush.drip_max_length = 0.3 * unit(gen);
    s.mode = a.canvas && gen() % 2 == 0 ? DrawMode::kCanvas2D : DrawMode::kFree3D;
    s.centerline = random_centerline(gen, 1 + gen() % 30);
    if (s.mode == DrawMode::kCanvas2D && s.brush.tool == Tool::kDripMop) {
      const std::size_t drips = gen() % 4;
      for (std::size_t d = 0; d < drips; ++d) {
        s.drips.push_back({project_to_canvas(random_vec(gen, -1, 1), *a.canvas).world,
                           0.2 * unit(gen), 0.01 * unit(gen)});
      }
    }
    a = add_stroke(a, std::move(s));
  }
  return a;
}

inline Stroke simple_stroke(std::uint64_t id, std::size_t n = 4) {
  Stroke s;
  s.id = id;
  for (std::size_t i = 0; i < n; ++i) {
    s.centerline.points.emplace_back(0.1 * static_cast<double>(i), 0.05 * static_cast<double>(i % 2), 0.0);
    s.centerline.timestamps.push_back(static_cast<double>(i) / 60.0);
    s.centerline.pressure.push_back(1.0);
  }
  return s;
}

}  // namespace gesto::testing
