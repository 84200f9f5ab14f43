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

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

// GSTB version 1. All integers and floats are little-endian.
//
//   magic "GSTB" | u16 version | section* (u8 tag, u32 length, payload)
//
// Sections appear in this order; only the canvas is optional:
//   1 header     artwork id (16 raw bytes), i64 created_at,
//                u16 + author bytes, u16 + title bytes
//   2 canvas     f64 normal[3], offset, u[3], v[3], u_min, u_max, v_min,
//                v_max, fit_rms
//   3 strokes    u32 count, then per stroke:
//                u64 id, u8 tool, u8 mode, f32 base_width, f32 rgba[4],
//                f32 cone_half_angle, spray_range, drip_probability,
//                drip_max_length, u32 n, n x f32 (x, y, z, t, pressure),
//                u32 m, m x f32 (anchor x, y, z, length, width)
//   4 placement  f64 translation[3], rotation (w, x, y, z), scale

namespace gesto::gstb {

inline constexpr std::uint16_t kVersion = 1;
inline constexpr char kMagic[4] = {'G', 'S', 'T', 'B'};

enum Tag : std::uint8_t { kHeader = 1, kCanvas = 2, kStrokes = 3, kPlacement = 4 };

namespace detail {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v), 8); }
  void f32(double v) { put(std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void vec3_f64(const Vec3& v) { f64(v.x()), f64(v.y()), f64(v.z()); }
  void vec3_f32(const Vec3& v) { f32(v.x()), f32(v.y()), f32(v.z()); }
  void string16(const std::string& s) {
    u16(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }

  std::size_t size() const { return out_.size(); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

  void section(Tag tag, const Writer& body) {
    u8(tag);
    u32(static_cast<std::uint32_t>(body.out_.size()));
    bytes(body.out_.data(), body.out_.size());
  }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> data, std::size_t pos, std::size_t end)
      : data_(data), pos_(pos), end_(end) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return end_ - pos_; }

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1, "u8")); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2, "u16")); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4, "u32")); }
  std::uint64_t u64() { return get(8, "u64"); }
  std::int64_t i64() { return static_cast<std::int64_t>(get(8, "i64")); }
  double f32() {
    return static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(get(4, "f32"))));
  }
  double f64() { return std::bit_cast<double>(get(8, "f64")); }
  Vec3 vec3_f64() {
    Vec3 v;
    v.x() = f64(), v.y() = f64(), v.z() = f64();
    return v;
  }
  Vec3 vec3_f32() {
    Vec3 v;
    v.x() = f32(), v.y() = f32(), v.z() = f32();
    return v;
  }
  std::string string16() {
    const std::size_t n = u16();
    need(n, "string");
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void raw(std::uint8_t* out, std::size_t n) {
    need(n, "bytes");
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
  }

  void need(std::size_t n, const char* what) const {
    if (n > remaining()) {
      throw CorruptionError(pos_, std::string("truncated ") + what);
    }
  }

 private:
  std::uint64_t get(int n, const char* what) {
    need(static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_;
  std::size_t end_;
};

inline constexpr std::size_t kPointBytes = 5 * 4;
inline constexpr std::size_t kDripBytes = 5 * 4;
inline constexpr std::size_t kMinStrokeBytes = 8 + 2 + 4 * 9 + 4 + 4;

inline Stroke read_stroke(Reader& r) {
  Stroke s;
  s.id = r.u64();
  const std::size_t tool_at = r.pos();
  const auto tool = r.u8();
  const auto mode = r.u8();
  if (tool > 1) throw CorruptionError(tool_at, "unknown tool");
  if (mode > 1) throw CorruptionError(tool_at + 1, "unknown draw mode");
  s.brush.tool = static_cast<Tool>(tool);
  s.mode = static_cast<DrawMode>(mode);
  s.brush.base_width = r.f32();
  s.brush.color.r = static_cast<float>(r.f32());
  s.brush.color.g = static_cast<float>(r.f32());
  s.brush.color.b = static_cast<float>(r.f32());
  s.brush.color.a = static_cast<float>(r.f32());
  s.brush.spray_cone_half_angle = r.f32();
  s.brush.spray_range = r.f32();
  s.brush.drip_probability = r.f32();
  s.brush.drip_max_length = r.f32();

  const std::size_t n = r.u32();
  if (n == 0) throw CorruptionError(r.pos() - 4, "stroke without points");
  r.need(n * kPointBytes, "stroke points");
  auto& line = s.centerline;
  line.tool = s.brush.tool;
  line.points.resize(n);
  line.timestamps.resize(n);
  line.pressure.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    line.points[i] = r.vec3_f32();
    line.timestamps[i] = r.f32();
    line.pressure[i] = r.f32();
  }
  const std::size_t m = r.u32();
  r.need(m * kDripBytes, "drip seeds");
  s.drips.resize(m);
  for (auto& d : s.drips) {
    d.anchor = r.vec3_f32();
    d.length = r.f32();
    d.width = r.f32();
  }
  return s;
}

}  // namespace detail

/// Canonical encoding; structurally equal artworks give identical bytes.
inline std::vector<std::uint8_t> encode(const Artwork& artwork) {
  check_artwork_header(artwork);
  detail::Writer out;
  out.bytes(kMagic, 4);
  out.u16(kVersion);

  detail::Writer header;
  header.bytes(artwork.artwork_id.bytes.data(), artwork.artwork_id.bytes.size());
  header.i64(artwork.created_at);
  header.string16(artwork.author);
  header.string16(artwork.title);
  out.section(kHeader, header);

  if (artwork.canvas) {
    const auto& c = *artwork.canvas;
    detail::Writer canvas;
    canvas.vec3_f64(c.normal);
    canvas.f64(c.offset);
    canvas.vec3_f64(c.u_axis);
    canvas.vec3_f64(c.v_axis);
    canvas.f64(c.bounds.u_min);
    canvas.f64(c.bounds.u_max);
    canvas.f64(c.bounds.v_min);
    canvas.f64(c.bounds.v_max);
    canvas.f64(c.fit_rms);
    out.section(kCanvas, canvas);
  }

  detail::Writer strokes;
  strokes.u32(static_cast<std::uint32_t>(artwork.strokes().size()));
  for (const auto& s : artwork.strokes()) {
    strokes.u64(s.id);
    strokes.u8(static_cast<std::uint8_t>(s.brush.tool));
    strokes.u8(static_cast<std::uint8_t>(s.mode));
    strokes.f32(s.brush.base_width);
    strokes.f32(s.brush.color.r);
    strokes.f32(s.brush.color.g);
    strokes.f32(s.brush.color.b);
    strokes.f32(s.brush.color.a);
    strokes.f32(s.brush.spray_cone_half_angle);
    strokes.f32(s.brush.spray_range);
    strokes.f32(s.brush.drip_probability);
    strokes.f32(s.brush.drip_max_length);
    const auto& line = s.centerline;
    strokes.u32(static_cast<std::uint32_t>(line.points.size()));
    for (std::size_t i = 0; i < line.points.size(); ++i) {
      strokes.vec3_f32(line.points[i]);
      strokes.f32(line.timestamps[i]);
      strokes.f32(line.pressure[i]);
    }
    strokes.u32(static_cast<std::uint32_t>(s.drips.size()));
    for (const auto& d : s.drips) {
      strokes.vec3_f32(d.anchor);
      strokes.f32(d.length);
      strokes.f32(d.width);
    }
  }
  out.section(kStrokes, strokes);

  detail::Writer placement;
  const auto& p = artwork.placement;
  placement.vec3_f64(p.translation);
  placement.f64(p.rotation.w());
  placement.f64(p.rotation.x());
  placement.f64(p.rotation.y());
  placement.f64(p.rotation.z());
  placement.f64(p.scale);
  out.section(kPlacement, placement);
  return out.take();
}

/// Decodes any byte sequence into an artwork or a typed error: kFormat for a
/// wrong magic, kVersion for an unknown version, CorruptionError (with the
/// byte offset) for anything truncated, trailing, or invalid.
inline Artwork decode(std::span<const std::uint8_t> bytes) {
  const std::size_t prefix = std::min<std::size_t>(bytes.size(), 4);
  if (prefix > 0 && std::memcmp(bytes.data(), kMagic, prefix) != 0) {
    throw Error(Errc::kFormat, "bad magic, not a GSTB payload");
  }
  detail::Reader top(bytes, 0, bytes.size());
  top.need(4, "magic");
  top.u32();
  const std::uint16_t version = top.u16();
  if (version != kVersion) {
    throw Error(Errc::kVersion, "unsupported GSTB version " + std::to_string(version));
  }

  Artwork artwork;
  bool seen_header = false;
  bool seen_strokes = false;
  bool seen_placement = false;
  int last_tag = 0;
  while (top.remaining() > 0) {
    const std::size_t section_at = top.pos();
    const auto tag = top.u8();
    const std::size_t len = top.u32();
    top.need(len, "section");
    if (tag < kHeader || tag > kPlacement || tag <= last_tag) {
      throw CorruptionError(section_at, "unexpected section tag " + std::to_string(tag));
    }
    if (tag != kHeader && !seen_header) {
      throw CorruptionError(section_at, "header section missing");
    }
    if (tag == kPlacement && !seen_strokes) {
      throw CorruptionError(section_at, "strokes section missing");
    }
    last_tag = tag;
    const std::size_t body_at = top.pos();
    detail::Reader r(bytes, body_at, body_at + len);

    try {
      switch (tag) {
        case kHeader: {
          r.raw(artwork.artwork_id.bytes.data(), artwork.artwork_id.bytes.size());
          artwork.created_at = r.i64();
          artwork.author = r.string16();
          artwork.title = r.string16();
          seen_header = true;
          break;
        }
        case kCanvas: {
          CanvasPlane c;
          c.normal = r.vec3_f64();
          c.offset = r.f64();
          c.u_axis = r.vec3_f64();
          c.v_axis = r.vec3_f64();
          c.bounds.u_min = r.f64();
          c.bounds.u_max = r.f64();
          c.bounds.v_min = r.f64();
          c.bounds.v_max = r.f64();
          c.fit_rms = r.f64();
          check_canvas(c);
          artwork.canvas = c;
          break;
        }
        case kStrokes: {
          const std::size_t count = r.u32();
          r.need(count * detail::kMinStrokeBytes, "strokes");
          for (std::size_t i = 0; i < count; ++i) {
            const std::size_t stroke_at = r.pos();
            Stroke s = detail::read_stroke(r);
            try {
              artwork = add_stroke(artwork, std::move(s));
            } catch (const CorruptionError&) {
              throw;
            } catch (const Error& e) {
              throw CorruptionError(stroke_at, e.what());
            }
          }
          seen_strokes = true;
          break;
        }
        case kPlacement: {
          auto& p = artwork.placement;
          p.translation = r.vec3_f64();
          const double w = r.f64(), x = r.f64(), y = r.f64(), z = r.f64();
          p.rotation = Quat(w, x, y, z);
          p.scale = r.f64();
          seen_placement = true;
          break;
        }
      }
    } catch (const CorruptionError&) {
      throw;
    } catch (const Error& e) {
      throw CorruptionError(body_at, e.what());
    }
    if (r.remaining() != 0) {
      throw CorruptionError(r.pos(), "section length does not match its contents");
    }
    top = detail::Reader(bytes, body_at + len, bytes.size());
  }
  if (!seen_header || !seen_strokes || !seen_placement) {
    throw CorruptionError(bytes.size(), "truncated payload, required section missing");
  }
  try {
    check_artwork_header(artwork);
  } catch (const Error& e) {
    throw CorruptionError(6, e.what());
  }
  return artwork;
}

inline Artwork decode(const std::vector<std::uint8_t>& bytes) {
  return decode(std::span<const std::uint8_t>(bytes));
}

inline Artwork decode(std::string_view bytes) {
  return decode(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

}  // namespace gesto::gstb
