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
#include <gesto/error.hpp>

#include "json.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace gesto {

namespace detail {

inline void append_float(std::string& out, double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<float>(value));
  out.append(buf.data(), end);
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

}  // namespace detail

/// Wavefront OBJ with positions, normals and 1-based `f v//vn` faces.
/// Vertex colors follow as a comment block of `#vc r g b a` lines, one per
/// vertex, which ordinary OBJ readers skip.
inline std::string to_obj(const TriangleMesh& mesh) {
  std::string out;
  out += "# gesto mesh\n";
  out += "# vertices " + std::to_string(mesh.vertex_count()) + " triangles " +
         std::to_string(mesh.triangle_count()) + "\n";
  auto triple = [&out](const char* tag, const Vec3& v) {
    out += tag;
    for (int i = 0; i < 3; ++i) {
      out += ' ';
      detail::append_float(out, v(i));
    }
    out += '\n';
  };
  for (const auto& v : mesh.vertices) triple("v", v);
  for (const auto& n : mesh.normals) triple("vn", n);
  for (std::size_t t = 0; t + 2 < mesh.indices.size(); t += 3) {
    out += 'f';
    for (std::size_t k = 0; k < 3; ++k) {
      const auto i = std::to_string(mesh.indices[t + k] + 1);
      out += ' ' + i + "//" + i;
    }
    out += '\n';
  }
  out += "# vertex colors\n";
  for (const auto& c : mesh.colors) {
    out += "#vc";
    for (float ch : {c.r, c.g, c.b, c.a}) {
      out += ' ';
      detail::append_float(out, ch);
    }
    out += '\n';
  }
  return out;
}

/// Binary glTF 2.0: one mesh with POSITION, NORMAL and COLOR_0 (float VEC4)
/// attributes and uint32 indices, all in a single little-endian buffer.
inline std::vector<std::uint8_t> to_glb(const TriangleMesh& mesh) {
  nlohmann::ordered_json gltf;
  gltf["asset"] = {{"version", "2.0"}, {"generator", "gesto"}};
  gltf["scene"] = 0;

  std::vector<std::uint8_t> bin;
  if (mesh.empty()) {
    gltf["scenes"] = nlohmann::ordered_json::array({{{"nodes", nlohmann::ordered_json::array()}}});
  } else {
    const auto n = static_cast<std::uint32_t>(mesh.vertex_count());
    const auto idx = static_cast<std::uint32_t>(mesh.indices.size());
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const auto& v : mesh.vertices) {
      const Vec3 f = to_f32(v);
      lo = lo.cwiseMin(f);
      hi = hi.cwiseMax(f);
      for (int i = 0; i < 3; ++i) detail::put_f32(bin, v(i));
    }
    for (const auto& v : mesh.normals) {
      for (int i = 0; i < 3; ++i) detail::put_f32(bin, v(i));
    }
    for (const auto& c : mesh.colors) {
      for (float ch : {c.r, c.g, c.b, c.a}) detail::put_f32(bin, ch);
    }
    for (auto i : mesh.indices) detail::put_u32(bin, i);

    const std::uint32_t pos_len = 12 * n, nrm_len = 12 * n, col_len = 16 * n, idx_len = 4 * idx;
    using oj = nlohmann::ordered_json;
    gltf["scenes"] = oj::array({{{"nodes", {0}}}});
    gltf["nodes"] = oj::array({{{"mesh", 0}}});
    oj primitive = {{"attributes", {{"POSITION", 0}, {"NORMAL", 1}, {"COLOR_0", 2}}},
                    {"indices", 3},
                    {"mode", 4}};
    gltf["meshes"] = oj::array({{{"primitives", oj::array({primitive})}}});
    gltf["buffers"] = oj::array({{{"byteLength", bin.size()}}});
    gltf["bufferViews"] = oj::array({
        {{"buffer", 0}, {"byteOffset", 0}, {"byteLength", pos_len}, {"target", 34962}},
        {{"buffer", 0}, {"byteOffset", pos_len}, {"byteLength", nrm_len}, {"target", 34962}},
        {{"buffer", 0}, {"byteOffset", pos_len + nrm_len}, {"byteLength", col_len}, {"target", 34962}},
        {{"buffer", 0}, {"byteOffset", pos_len + nrm_len + col_len}, {"byteLength", idx_len}, {"target", 34963}},
    });
    gltf["accessors"] = oj::array({
        {{"bufferView", 0}, {"componentType", 5126}, {"count", n}, {"type", "VEC3"},
         {"min", {lo.x(), lo.y(), lo.z()}}, {"max", {hi.x(), hi.y(), hi.z()}}},
        {{"bufferView", 1}, {"componentType", 5126}, {"count", n}, {"type", "VEC3"}},
        {{"bufferView", 2}, {"componentType", 5126}, {"count", n}, {"type", "VEC4"}},
        {{"bufferView", 3}, {"componentType", 5125}, {"count", idx}, {"type", "SCALAR"}},
    });
  }

  std::string json = gltf.dump();
  while (json.size() % 4 != 0) json.push_back(' ');
  while (bin.size() % 4 != 0) bin.push_back(0);

  std::vector<std::uint8_t> out;
  const std::uint32_t total =
      12 + 8 + static_cast<std::uint32_t>(json.size()) +
      (bin.empty() ? 0 : 8 + static_cast<std::uint32_t>(bin.size()));
  detail::put_u32(out, 0x46546C67);  // "glTF"
  detail::put_u32(out, 2);
  detail::put_u32(out, total);
  detail::put_u32(out, static_cast<std::uint32_t>(json.size()));
  detail::put_u32(out, 0x4E4F534A);  // JSON
  out.insert(out.end(), json.begin(), json.end());
  if (!bin.empty()) {
    detail::put_u32(out, static_cast<std::uint32_t>(bin.size()));
    detail::put_u32(out, 0x004E4942);  // BIN
    out.insert(out.end(), bin.begin(), bin.end());
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(Errc::kIo, "failed writing " + path.string());
}

inline void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

/// Writes OBJ for a .obj path and binary glTF for .glb.
inline void export_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".obj") {
    write_file(path, to_obj(mesh));
  } else if (ext == ".glb") {
    write_file(path, to_glb(mesh));
  } else {
    throw Error(Errc::kParameter, "mesh output must end in .obj or .glb");
  }
}

}  // namespace gesto
