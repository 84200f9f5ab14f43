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

// Acceptance run: one PASS/FAIL line per release criterion, exit status 1 if
// any criterion fails.

#include <gesto/gstb.hpp>
#include <gesto/pipeline.hpp>
#include <gesto/store.hpp>

#include "contract_rng.hpp"
#include "plane_oracle.hpp"
#include "service_harness.hpp"
#include "test_support.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace gesto {
namespace {

using namespace gesto::testing;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

// 1. Replay determinism and speed on the golden fixtures.
Outcome pipeline_determinism() {
  TempDir dir;
  const std::string wall = " --mode 2d --scan " + fixture("wall_z0.jsonl").string();
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"line_x.jsonl", wall + " --brush width=0.1 --spacing 0.1"},
      {"unpressed.jsonl", ""},
      {"spray_wave.jsonl", wall},
      {"drip_tag.jsonl", wall + " --seed 42"},
      {"free_helix.jsonl", " --mode 3d"},
  };
  double slowest = 0.0;
  for (const auto& [name, args] : runs) {
    for (const char* ext : {".obj", ".glb"}) {
      std::string mesh[2], stats[2];
      for (int k = 0; k < 2; ++k) {
        const auto out = dir.path() / (name + std::to_string(k) + ext);
        const auto t0 = Clock::now();
        const auto r = run_command(std::string(GESTO_CLI) + " replay --poses " +
                                   fixture(name).string() + args + " --out " + out.string());
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        slowest = std::max(slowest, secs);
        if (r.exit_code != 0) return fail(name + " exited " + std::to_string(r.exit_code));
        if (secs >= 1.0) return fail(name + " took " + std::to_string(secs) + " s");
        mesh[k] = slurp(out);
        stats[k] = r.out;
      }
      if (mesh[0] != mesh[1]) return fail(name + std::string(ext) + " mesh differs between runs");
      if (stats[0] != stats[1]) return fail(name + " stats differ between runs");
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "5 fixtures x 2 formats identical; slowest run %.3f s", slowest);
  return {true, buf};
}

// 2. Exact vertex/triangle counts.
Outcome tessellation_counts() {
  std::mt19937_64 gen(1001);
  std::uniform_int_distribution<std::size_t> count(2, 200);
  std::uniform_int_distribution<int> sides_dist(3, 16);
  std::size_t violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = count(gen);
    const auto line = random_centerline(gen, n);
    const Vec3 facing = random_vec(gen, -1, 1).normalized();
    const int sides = sides_dist(gen);
    BrushParams brush;
    const auto ribbon = tessellate_ribbon(line, brush, facing);
    const auto tube = tessellate_tube(line, brush, sides);
    const auto s = static_cast<std::size_t>(sides);
    if (ribbon.vertex_count() != 2 * n || ribbon.triangle_count() != 2 * (n - 1)) ++violations;
    if (tube.vertex_count() != n * s || tube.triangle_count() != 2 * (n - 1) * s) ++violations;
  }
  if (violations > 0) return fail(std::to_string(violations) + " count violations");
  return {true, "1000 centerlines, N in [2,200], 0 violations"};
}

// 3. Plane fit against the Jacobi oracle.
Outcome plane_fit_oracle() {
  std::mt19937_64 gen(1003);
  std::uniform_real_distribution<double> span(-1.0, 1.0), jitter(-0.01, 0.01), offset(-3.0, 3.0);
  double worst_angle = 0.0, worst_offset = 0.0, worst_exact_rms = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 normal = random_vec(gen, -1, 1).normalized();
    const Vec3 u = canvas_u_axis(normal);
    const Vec3 v = normal.cross(u);
    const double d = offset(gen);
    std::vector<Vec3> noisy, exact;
    for (int i = 0; i < 200; ++i) {
      const Vec3 base = d * normal + span(gen) * u + span(gen) * v;
      exact.push_back(base);
      noisy.push_back(base + jitter(gen) * normal);
    }
    CanvasPlane fit;
    try {
      fit = fit_plane(noisy, 0.02);
    } catch (const Error& e) {
      return fail(std::string("fit_plane threw: ") + e.what());
    }
    const auto oracle = jacobi_plane(noisy);
    const double sign = fit.normal.dot(oracle.normal) < 0 ? -1.0 : 1.0;
    const double cosang = std::clamp(fit.normal.dot(sign * oracle.normal), -1.0, 1.0);
    worst_angle = std::max(worst_angle, std::acos(cosang) * 180.0 / std::numbers::pi);
    worst_offset = std::max(worst_offset, std::abs(fit.offset - sign * oracle.offset));
    worst_exact_rms = std::max(worst_exact_rms, fit_plane(exact, 0.02).fit_rms);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "100 planes: max normal angle %.2e deg, max offset diff %.2e m, exact rms %.2e",
                worst_angle, worst_offset, worst_exact_rms);
  const bool ok = worst_angle <= 0.5 && worst_offset <= 0.01 && worst_exact_rms < 1e-9;
  return {ok, buf};
}

// 4. Canvas2D strokes sit 0.001 m in front of the wall.
Outcome canvas_constraint() {
  std::mt19937_64 gen(1004);
  double worst = 0.0;
  std::size_t points = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const CanvasPlane canvas = random_canvas(gen);
    std::vector<PoseSample> poses;
    const std::size_t n = 2 + gen() % 80;
    Vec3 p = canvas.origin() + 0.1 * canvas.normal + random_vec(gen, -0.5, 0.5);
    for (std::size_t i = 0; i < n; ++i) {
      PoseSample s;
      s.t = static_cast<double>(i) / 60.0;
      s.position = p;
      s.orientation = random_rotation(gen);
      s.pressed = true;
      s.tool = gen() % 2 == 0 ? Tool::kSpray : Tool::kDripMop;
      poses.push_back(s);
      p += random_vec(gen, -0.02, 0.02);
    }
    PipelineConfig config;
    config.mode = DrawMode::kCanvas2D;
    config.canvas = canvas;
    config.brush.spray_range = 5.0;
    const auto artwork = build_artwork(poses, config);
    for (const auto& stroke : build_strokes(poses, config)) {
      for (const auto& q : stroke.centerline.points) {
        worst = std::max(worst, std::abs(canvas.signed_distance(q) - 0.001));
        ++points;
      }
    }
    // Stored (float32) strokes too.
    for (const auto& stroke : artwork.strokes()) {
      for (const auto& q : stroke.centerline.points) {
        worst = std::max(worst, std::abs(canvas.signed_distance(q) - 0.001));
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu points, max |distance - 0.001| = %.2e m", points, worst);
  return {worst <= 1e-6, buf};
}

// 5. Binary round-trip and fuzzing.
Outcome serialization_laws() {
  std::mt19937_64 gen(1005);
  std::vector<std::vector<std::uint8_t>> seeds;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_artwork(gen);
    const auto bytes = gstb::encode(a);
    if (!(gstb::decode(bytes) == a)) return fail("round-trip mismatch at trial " + std::to_string(trial));
    if (trial < 16) seeds.push_back(bytes);
  }
  std::size_t typed = 0, accepted = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    auto b = seeds[gen() % seeds.size()];
    switch (gen() % 3) {
      case 0:
        b.resize(gen() % 256);
        for (auto& x : b) x = static_cast<std::uint8_t>(gen());
        break;
      case 1:
        for (int k = 0, m = 1 + static_cast<int>(gen() % 8); k < m; ++k) {
          b[gen() % b.size()] ^= static_cast<std::uint8_t>(1u << (gen() % 8));
        }
        break;
      default:
        b.resize(gen() % (b.size() + 1));
        break;
    }
    try {
      gstb::decode(b);
      ++accepted;
    } catch (const Error&) {
      ++typed;
    } catch (const std::exception& e) {
      return fail(std::string("untyped exception: ") + e.what());
    }
  }
  return {true, "1000 round-trips exact; 10000 fuzzed inputs: " + std::to_string(typed) +
                    " typed errors, " + std::to_string(accepted) + " valid, 0 crashes"};
}

// 6. Service byte identity, same-id race, crash injection.
Outcome service_round_trip() {
  TempDir dir;
  {
    RunningService svc(dir.path());
    const auto token = svc.login("acceptance");
    if (token.empty()) return fail("login failed");
    std::mt19937_64 gen(1006);
    auto cli = svc.client();
    for (int i = 0; i < 50; ++i) {
      const auto bytes = gstb::encode(random_artwork(gen));
      const std::string body(bytes.begin(), bytes.end());
      const auto id = gstb::decode(bytes).artwork_id.to_string();
      auto res = cli.Post("/v1/artworks", bearer(token), body, "application/octet-stream");
      if (!res || res->status != 201) return fail("POST " + std::to_string(i) + " failed");
      auto got = cli.Get("/v1/artworks/" + id);
      if (!got || got->status != 200 || got->body != body) return fail("GET " + id + " differs");
    }

    Artwork same = add_stroke(Artwork{}, simple_stroke(1));
    same.artwork_id = ArtworkId::from_words(0xACCE, 0x7);
    const auto same_bytes = gstb::encode(same);
    const std::string same_body(same_bytes.begin(), same_bytes.end());
    std::atomic<int> created{0}, conflicts{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&] {
        auto c = svc.client();
        auto res = c.Post("/v1/artworks", bearer(token), same_body, "application/octet-stream");
        if (res && res->status == 201) created++;
        if (res && res->status == 409) conflicts++;
      });
    }
    for (auto& th : threads) th.join();
    if (created != 1 || conflicts != 7) {
      return fail("same-id race gave " + std::to_string(created.load()) + " x 201, " +
                  std::to_string(conflicts.load()) + " x 409");
    }
  }

  const auto payload = gstb::encode(random_artwork(*std::make_unique<std::mt19937_64>(9)));
  std::vector<std::string> points;
  {
    TempDir probe_dir;
    StoreOptions probe;
    probe.write_chunk = (payload.size() + 14) / 15;
    probe.fault_hook = [&](std::string_view p) { points.emplace_back(p); };
    ArtworkStore store(probe_dir.path(), probe);
    ArtworkRecord rec;
    store.put(rec, payload);
  }
  if (points.size() != 20) return fail("expected 20 injection points, saw " + std::to_string(points.size()));
  for (const auto& point : points) {
    TempDir crash_dir;
    StoreOptions options;
    options.write_chunk = (payload.size() + 14) / 15;
    options.fault_hook = [&](std::string_view p) {
      if (p == point) throw std::runtime_error("crash");
    };
    try {
      ArtworkStore store(crash_dir.path(), options);
      store.put(ArtworkRecord{}, payload);
      return fail("no crash at " + point);
    } catch (const std::runtime_error&) {
    }
    ArtworkStore recovered(crash_dir.path());
    const auto got = recovered.get(ArtworkId{});
    if (got && *got != payload) return fail("partial payload readable after crash at " + point);
    if (got.has_value() != (point == "after-index")) return fail("unexpected state after " + point);
  }
  return {true, "50 POST/GET identical; 8-way race -> 1x201 + 7x409; 20 crash points clean"};
}

// 7. Drip model.
Outcome drip_model() {
  BrushParams brush;
  brush.tool = Tool::kDripMop;
  brush.base_width = 0.04;
  brush.drip_probability = 0.3;
  brush.drip_max_length = 0.15;
  Centerline line;
  const std::size_t candidates = 10000;
  for (std::size_t i = 0; i < 4 * candidates; ++i) {
    line.points.emplace_back(0.001 * static_cast<double>(i), 0.0, 0.0);
    line.timestamps.push_back(static_cast<double>(i));
    line.pressure.push_back(1.0);
  }
  line.tool = Tool::kDripMop;
  const CanvasPlane wall;
  const auto a = drip_simulate(line, wall, brush, 42);
  const auto b = drip_simulate(line, wall, brush, 42);
  if (!(a.seeds == b.seeds) || !(a.lines == b.lines)) return fail("same seed, different drips");

  ContractRng rng(42);
  std::size_t k = 0;
  for (std::size_t i = 0; i < line.size(); i += 4) {
    if (!(rng.uniform() < 0.3)) continue;
    const double len = 0.15 * (0.3 + 0.7 * rng.uniform());
    if (k >= a.seeds.size() || a.seeds[k].length != len || a.seeds[k].anchor != line.points[i]) {
      return fail("drips deviate from the documented generator at candidate " + std::to_string(i / 4));
    }
    ++k;
  }
  if (k != a.seeds.size()) return fail("extra drips beyond the documented generator");

  const double rate = static_cast<double>(a.seeds.size()) / candidates;
  const double sigma = std::sqrt(0.3 * 0.7 / candidates);
  CanvasPlane floor;
  floor.normal = Vec3::UnitY();
  floor.u_axis = Vec3::UnitZ();
  floor.v_axis = Vec3::UnitX();
  Centerline on_floor = line;
  for (auto& p : on_floor.points) p = Vec3(p.x(), 0.0, 0.5 * p.x());
  brush.drip_probability = 1.0;
  const auto flat = drip_simulate(on_floor, floor, brush, 42);

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "bit-stable, matches generator; rate %.4f (|dev| %.4f <= 3 sigma %.4f); floor drips %zu",
                rate, std::abs(rate - 0.3), 3 * sigma, flat.seeds.size());
  return {std::abs(rate - 0.3) <= 3 * sigma && flat.seeds.empty(), buf};
}

// 8. Gesture laws.
Outcome gesture_laws() {
  std::mt19937_64 gen(1008);
  std::uniform_real_distribution<double> factor(0.05, 20.0);
  double worst_drag = 0.0, worst_scale = 0.0;
  bool strokes_untouched = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_artwork(gen);
    const Vec3 d1 = random_vec(gen, -5, 5), d2 = random_vec(gen, -5, 5);
    const auto stepwise = gesture_drag(gesture_drag(a, d1), d2);
    const auto direct = gesture_drag(a, d1 + d2);
    worst_drag = std::max(worst_drag,
                          (stepwise.placement.translation - direct.placement.translation).norm());

    const double s = factor(gen);
    const Vec3 pivot = random_vec(gen, -5, 5);
    const auto back = gesture_scale(gesture_scale(a, s, pivot), 1.0 / s, pivot);
    const auto m0 = render_artwork(a);
    const auto m1 = render_artwork(back);
    for (std::size_t i = 0; i < m0.vertex_count(); ++i) {
      worst_scale = std::max(worst_scale, (m0.vertices[i] - m1.vertices[i]).norm());
    }
    strokes_untouched = strokes_untouched && stepwise.strokes() == a.strokes() &&
                        back.strokes() == a.strokes();
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "1000 cases: drag error %.2e (<= 1e-9), scale-inverse error %.2e (<= 1e-6)",
                worst_drag, worst_scale);
  return {worst_drag <= 1e-9 && worst_scale <= 1e-6 && strokes_untouched, buf};
}

}  // namespace
}  // namespace gesto

int main() {
  const std::vector<std::pair<const char*, std::function<gesto::Outcome()>>> criteria = {
      {"pipeline determinism", gesto::pipeline_determinism},
      {"tessellation counts", gesto::tessellation_counts},
      {"plane-fit oracle equivalence", gesto::plane_fit_oracle},
      {"canvas constraint", gesto::canvas_constraint},
      {"serialization laws", gesto::serialization_laws},
      {"service round-trip", gesto::service_round_trip},
      {"drip model", gesto::drip_model},
      {"gesture laws", gesto::gesture_laws},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    gesto::Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = gesto::fail(std::string("exception: ") + e.what());
    }
    std::printf("%s  %s: %s\n", outcome.pass ? "PASS" : "FAIL", name, outcome.detail.c_str());
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
