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

// gesto: replay pose logs, export meshes, pack and inspect GSTB artworks, and
// move them to and from an artwork service.
//
// Exit codes: 0 ok, 2 parse/usage/format error, 3 degenerate scan,
// 4 write failure, 5 service error (any non-2xx response).

#include <gesto/canvas.hpp>
#include <gesto/debug_json.hpp>
#include <gesto/gstb.hpp>
#include <gesto/mesh_export.hpp>
#include <gesto/pipeline.hpp>
#include <gesto/pose_log.hpp>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum Exit : int {
  kOk = 0,
  kParseFailure = 2,
  kScanFailure = 3,
  kWriteFailure = 4,
  kServiceFailure = 5,
};

struct ExitError {
  int code;
  std::string message;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ExitError{kParseFailure, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_number(const std::string& key, const std::string& text) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ExitError{kParseFailure, "--brush " + key + ": not a number: " + text};
  }
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  return out;
}

// width=0.1 color=r,g,b[,a] cone=<degrees> range=<m> drip_p=<p> drip_max=<m>
gesto::BrushParams parse_brush(const std::vector<std::string>& pairs) {
  gesto::BrushParams brush;
  for (const auto& pair : pairs) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw ExitError{kParseFailure, "--brush expects key=value: " + pair};
    const auto key = pair.substr(0, eq);
    const auto value = pair.substr(eq + 1);
    if (key == "width") {
      brush.base_width = parse_number(key, value);
    } else if (key == "color") {
      const auto c = parse_list(key, value);
      if (c.size() != 3 && c.size() != 4) throw ExitError{kParseFailure, "--brush color needs 3 or 4 values"};
      brush.color = {static_cast<float>(c[0]), static_cast<float>(c[1]), static_cast<float>(c[2]),
                     c.size() == 4 ? static_cast<float>(c[3]) : 1.0f};
    } else if (key == "cone") {
      brush.spray_cone_half_angle = parse_number(key, value) * std::numbers::pi / 180.0;
    } else if (key == "range") {
      brush.spray_range = parse_number(key, value);
    } else if (key == "drip_p") {
      brush.drip_probability = parse_number(key, value);
    } else if (key == "drip_max") {
      brush.drip_max_length = parse_number(key, value);
    } else {
      throw ExitError{kParseFailure, "unknown --brush key: " + key};
    }
  }
  try {
    gesto::check_brush(brush);
  } catch (const gesto::Error& e) {
    throw ExitError{kParseFailure, e.what()};
  }
  return brush;
}

struct PipelineOptions {
  std::string poses;
  std::string mode = "3d";
  std::string scan;
  std::vector<std::string> brush;
  std::uint64_t seed = 0;
  double spacing = 0.005;
  int window = 3;
  int sides = 8;
  double max_rms = 0.02;
  std::vector<double> nib{0.0, 0.08, 0.0};

  void add_to(CLI::App* cmd) {
    cmd->add_option("--poses", poses, "pose log (JSON Lines)")->required();
    cmd->add_option("--mode", mode, "2d draws on the scanned wall, 3d in free space")
        ->check(CLI::IsMember({"2d", "3d"}));
    cmd->add_option("--scan", scan, "wall scan samples (JSON Lines of [x,y,z])");
    cmd->add_option("--brush", brush, "brush settings as key=value");
    cmd->add_option("--seed", seed, "drip seed");
    cmd->add_option("--spacing", spacing, "resample spacing in meters");
    cmd->add_option("--window", window, "smoothing window (odd)");
    cmd->add_option("--sides", sides, "tube sides in 3d mode");
    cmd->add_option("--max-rms", max_rms, "largest accepted scan fit rms in meters");
    cmd->add_option("--nib", nib, "nib offset x y z in the device frame")->expected(3);
  }
};

struct LoadedPipeline {
  std::string pose_text;
  std::vector<gesto::PoseSample> poses;
  gesto::PipelineConfig config;
};

LoadedPipeline load_pipeline(const PipelineOptions& opt) {
  LoadedPipeline out;
  auto& cfg = out.config;
  cfg.mode = opt.mode == "2d" ? gesto::DrawMode::kCanvas2D : gesto::DrawMode::kFree3D;
  if (cfg.mode == gesto::DrawMode::kCanvas2D && opt.scan.empty()) {
    throw ExitError{kParseFailure, "usage: --mode 2d requires --scan FILE"};
  }
  out.pose_text = read_text(opt.poses);
  try {
    out.poses = gesto::parse_pose_log(out.pose_text);
    cfg.nib = gesto::NibOffset(gesto::Vec3(opt.nib[0], opt.nib[1], opt.nib[2]));
  } catch (const gesto::Error& e) {
    throw ExitError{kParseFailure, opt.poses + ": " + e.what()};
  }
  if (!opt.scan.empty()) {
    std::vector<gesto::Vec3> samples;
    try {
      std::istringstream in(read_text(opt.scan));
      samples = gesto::read_scan_samples(in);
    } catch (const gesto::Error& e) {
      throw ExitError{kParseFailure, opt.scan + ": " + e.what()};
    }
    try {
      cfg.canvas = gesto::fit_plane(samples, opt.max_rms);
    } catch (const gesto::Error& e) {
      throw ExitError{kScanFailure, opt.scan + ": " + e.what()};
    }
  }
  cfg.brush = parse_brush(opt.brush);
  cfg.seed = opt.seed;
  cfg.min_spacing = opt.spacing;
  cfg.smoothing_window = opt.window;
  cfg.render.tube_sides = opt.sides;
  if (!(opt.spacing > 0.0) || opt.window < 1 || opt.window % 2 == 0 || opt.sides < 3) {
    throw ExitError{kParseFailure, "--spacing must be > 0, --window odd and >= 1, --sides >= 3"};
  }
  return out;
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  try {
    gesto::write_file(path, bytes);
  } catch (const gesto::Error& e) {
    throw ExitError{kWriteFailure, e.what()};
  }
}

int run_replay(const PipelineOptions& opt, const std::string& out_path) {
  const auto loaded = load_pipeline(opt);
  const auto ext = std::filesystem::path(out_path).extension();
  if (ext != ".obj" && ext != ".glb") throw ExitError{kParseFailure, "--out must end in .obj or .glb"};
  gesto::ReplayResult result;
  try {
    result = gesto::replay(loaded.poses, loaded.config);
  } catch (const gesto::Error& e) {
    throw ExitError{kParseFailure, e.what()};
  }
  try {
    gesto::export_mesh(result.mesh, out_path);
  } catch (const gesto::Error& e) {
    throw ExitError{kWriteFailure, e.what()};
  }
  std::cout << result.stats.to_json() << '\n';
  return kOk;
}

gesto::ArtworkId derive_id(const LoadedPipeline& loaded, const std::string& title,
                           const std::string& author) {
  auto fnv = [](std::uint64_t h, std::string_view s) {
    for (unsigned char c : s) h = (h ^ c) * 0x100000001B3ULL;
    return (h ^ 0xFF) * 0x100000001B3ULL;
  };
  std::uint64_t hi = 0xCBF29CE484222325ULL;
  std::uint64_t lo = 0x84222325CBF29CE4ULL;
  for (std::string_view part : {std::string_view(loaded.pose_text), std::string_view(title),
                                std::string_view(author),
                                std::string_view(std::to_string(loaded.config.seed))}) {
    hi = fnv(hi, part);
    lo = fnv(lo, part);
  }
  return gesto::ArtworkId::from_words(gesto::Xorshift64Star::splitmix64(hi),
                                      gesto::Xorshift64Star::splitmix64(lo));
}

int run_pack(const PipelineOptions& opt, const std::string& title, const std::string& author,
             const std::string& id_text, std::int64_t created_at, const std::string& out_path) {
  const auto loaded = load_pipeline(opt);
  gesto::Artwork base;
  base.title = title;
  base.author = author;
  base.created_at = created_at;
  if (id_text.empty()) {
    base.artwork_id = derive_id(loaded, title, author);
  } else {
    const auto id = gesto::ArtworkId::parse(id_text);
    if (!id) throw ExitError{kParseFailure, "--id must be a canonical 36-character id"};
    base.artwork_id = *id;
  }
  std::vector<std::uint8_t> bytes;
  try {
    bytes = gesto::gstb::encode(gesto::build_artwork(loaded.poses, loaded.config, base));
  } catch (const gesto::Error& e) {
    throw ExitError{kParseFailure, e.what()};
  }
  write_bytes(out_path, bytes);
  std::cout << base.artwork_id.to_string() << '\n';
  return kOk;
}

int run_inspect(const std::string& path) {
  const auto bytes = read_text(path);
  try {
    std::cout << gesto::to_debug_json(gesto::gstb::decode(bytes));
  } catch (const gesto::Error& e) {
    throw ExitError{kParseFailure, path + ": " + e.what()};
  }
  return kOk;
}

httplib::Client make_client(const std::string& server) {
  httplib::Client client(server);
  client.set_connection_timeout(5);
  client.set_read_timeout(30);
  return client;
}

void require_ok(const httplib::Result& res, const std::string& what) {
  if (!res) {
    throw ExitError{kServiceFailure, what + ": " + httplib::to_string(res.error())};
  }
  if (res->status < 200 || res->status >= 300) {
    throw ExitError{kServiceFailure, what + ": HTTP " + std::to_string(res->status) + " " + res->body};
  }
}

httplib::Headers auth(const std::string& token) {
  if (token.empty()) return {};
  return {{"Authorization", "Bearer " + token}};
}

int run_login(const std::string& server, const std::string& author) {
  auto client = make_client(server);
  const auto res = client.Post("/v1/sessions", nlohmann::json{{"author", author}}.dump(),
                               "application/json");
  require_ok(res, "login");
  std::cout << nlohmann::json::parse(res->body).at("token").get<std::string>() << '\n';
  return kOk;
}

int run_push(const std::string& server, const std::string& token, const std::string& path) {
  const auto bytes = read_text(path);
  auto client = make_client(server);
  const auto res = client.Post("/v1/artworks", auth(token), bytes, "application/octet-stream");
  require_ok(res, "push");
  std::cout << nlohmann::json::parse(res->body).at("artwork_id").get<std::string>() << '\n';
  return kOk;
}

int run_pull(const std::string& server, const std::string& token, const std::string& id,
             const std::string& out_path) {
  auto client = make_client(server);
  const auto res = client.Get("/v1/artworks/" + id, auth(token));
  require_ok(res, "pull");
  write_bytes(out_path, std::vector<std::uint8_t>(res->body.begin(), res->body.end()));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gesto: embodied graffiti engine tools"};
  app.require_subcommand(1);

  PipelineOptions replay_opt;
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "replay a pose log into a mesh");
  replay_opt.add_to(replay);
  replay->add_option("--out", replay_out, "mesh output (.obj or .glb)")->required();

  PipelineOptions pack_opt;
  std::string pack_out, title, author, id_text;
  std::int64_t created_at = 0;
  auto* pack = app.add_subcommand("pack", "build a GSTB artwork from a pose log");
  pack_opt.add_to(pack);
  pack->add_option("--title", title, "artwork title");
  pack->add_option("--author", author, "artwork author");
  pack->add_option("--id", id_text, "artwork id (default: derived from the inputs)");
  pack->add_option("--created-at", created_at, "creation time, UTC seconds");
  pack->add_option("--out", pack_out, "output .gstb")->required();

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "print a GSTB file as debug JSON");
  inspect->add_option("file", inspect_path, "GSTB file")->required();

  std::string server, token, login_author;
  auto* login = app.add_subcommand("login", "open a session and print its token");
  login->add_option("--server", server, "service URL")->required();
  login->add_option("--author", login_author, "author name")->required();

  std::string push_path;
  auto* push = app.add_subcommand("push", "upload a GSTB file");
  push->add_option("--server", server, "service URL")->required();
  push->add_option("--token", token, "session token")->required();
  push->add_option("file", push_path, "GSTB file")->required();

  std::string pull_id, pull_out;
  auto* pull = app.add_subcommand("pull", "download an artwork");
  pull->add_option("--server", server, "service URL")->required();
  pull->add_option("--token", token, "session token");
  pull->add_option("id", pull_id, "artwork id")->required();
  pull->add_option("--out", pull_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParseFailure;
  }

  try {
    if (*replay) return run_replay(replay_opt, replay_out);
    if (*pack) return run_pack(pack_opt, title, author, id_text, created_at, pack_out);
    if (*inspect) return run_inspect(inspect_path);
    if (*login) return run_login(server, login_author);
    if (*push) return run_push(server, token, push_path);
    if (*pull) return run_pull(server, token, pull_id, pull_out);
  } catch (const ExitError& e) {
    std::cerr << "gesto: " << e.message << '\n';
    return e.code;
  }
  return kOk;
}
