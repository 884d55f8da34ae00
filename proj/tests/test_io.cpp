/* Copyright (c) 2026 The graphdepth Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "graphdepth/config.hpp"
#include "graphdepth/io.hpp"

using namespace graphdepth;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("graphdepth_io_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

void put_float(std::string& s, float f, bool big) {
  std::uint32_t b = std::bit_cast<std::uint32_t>(f);
  for (int k = 0; k < 4; ++k) {
    const int shift = big ? 24 - 8 * k : 8 * k;
    s.push_back(char((b >> shift) & 0xff));
  }
}

ErrorCode parse_code(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    parse_pfm(in);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("PFM round trip is bit exact") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<float> v(-1e3f, 1e3f);
  PfmImage img{5, 7, 1, {}};
  for (int i = 0; i < 35; ++i) img.values.push_back(v(rng));
  img.values[3] = INFINITY;
  img.values[4] = -0.0f;
  const fs::path p = scratch("rt.pfm");
  write_pfm(p, img);
  const PfmImage back = read_pfm(p);
  REQUIRE(back.width == 5);
  REQUIRE(back.height == 7);
  for (int i = 0; i < 35; ++i) CHECK(std::bit_cast<std::uint32_t>(back.values[i]) == std::bit_cast<std::uint32_t>(img.values[i]));

  PfmImage rgb{2, 3, 3, std::vector<float>(18)};
  for (int i = 0; i < 18; ++i) rgb.values[i] = float(i) * 0.25f;
  write_pfm(scratch("rgb.pfm"), rgb);
  CHECK(read_pfm(scratch("rgb.pfm")).values == rgb.values);
}

TEST_CASE("PFM parses both byte orders, rows stored bottom up") {
  for (bool big : {false, true}) {
    std::string s = std::string("Pf\n2 2\n") + (big ? "1.0" : "-1.0") + "\n";
    for (float f : {3.f, 4.f, 1.f, 2.f}) put_float(s, f, big);
    std::istringstream in(s);
    const PfmImage img = parse_pfm(in);
    CHECK(img.values == std::vector<float>{1, 2, 3, 4});
  }
}

TEST_CASE("PFM errors") {
  CHECK(parse_code("P5\n1 1\n255\n0") == ErrorCode::kMalformedHeader);
  CHECK(parse_code("PX\n1 1\n-1\n0000") == ErrorCode::kMalformedHeader);
  CHECK(parse_code("PF4\n1 1\n-1\n0000") == ErrorCode::kUnsupportedChannelCount);
  CHECK(parse_code("Pf\n1 1\n0\n0000") == ErrorCode::kMalformedHeader);
  CHECK(parse_code("Pf\n1 -1\n-1\n0000") == ErrorCode::kMalformedHeader);
  CHECK(parse_code("Pf\n2 2\n-1\n0000") == ErrorCode::kTruncatedPayload);
  CHECK_THROWS_AS(read_pfm(scratch("missing.pfm")), Error);
  PfmImage rgb{1, 1, 3, {0.f, 0.f, 0.f}};
  write_pfm(scratch("three.pfm"), rgb);
  try {
    read_pfm_grid(scratch("three.pfm"));
    FAIL("expected UnsupportedChannelCount");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedChannelCount);
  }
}

TEST_CASE("inverse depth maps treat non-finite and non-positive samples as holes") {
  PfmImage img{4, 1, 1, {0.5f, INFINITY, 0.0f, NAN}};
  write_pfm(scratch("holes.pfm"), img);
  const InverseDepthMap d = read_inverse_depth(scratch("holes.pfm"));
  CHECK(d.valid() == Mask(4, 1, std::vector<std::uint8_t>{1, 0, 0, 0}));
  write_inverse_depth(scratch("holes2.pfm"), d);
  const PfmImage back = read_pfm(scratch("holes2.pfm"));
  CHECK(back.values[0] == 0.5f);
  CHECK(std::isinf(back.values[1]));
}

TEST_CASE("confidence files") {
  {
    std::ofstream f(scratch("c.pgm"));
    f << "P2\n4 1\n4\n0 1 2 4\n";
  }
  CHECK(read_confidence(scratch("c.pgm")) == Grid<double>(4, 1, std::vector<double>{0, 0.25, 0.5, 1}));
  {
    std::ofstream f(scratch("c16.pgm"), std::ios::binary);
    f << "P5\n2 1\n1000\n";
    f.put(char(0x01)).put(char(0xF4)).put(char(0x03)).put(char(0xE8));  // 500, 1000
  }
  CHECK(read_confidence(scratch("c16.pgm")) == Grid<double>(2, 1, std::vector<double>{0.5, 1.0}));
  write_pfm(scratch("c.pfm"), PfmImage{3, 1, 1, {0.25f, NAN, 1.0f}});
  CHECK(read_confidence(scratch("c.pfm")) == Grid<double>(3, 1, std::vector<double>{0.25, 0.0, 1.0}));
  write_pfm(scratch("bad.pfm"), PfmImage{1, 1, 1, {1.5f}});
  CHECK_THROWS_AS(read_confidence(scratch("bad.pfm")), Error);
}

TEST_CASE("PNG and PPM guides round trip") {
  RgbImage img{3, 2, 3, {}};
  for (int i = 0; i < 18; ++i) img.pixels.push_back(std::uint8_t(i * 14));
  for (const char* name : {"g.png", "g.ppm"}) {
    if (std::string(name).ends_with("png")) {
      write_png(scratch(name), img);
    } else {
      write_pnm(scratch(name), img);
    }
    const GuideImage g = read_image(scratch(name));
    REQUIRE(g.channels() == 3);
    for (int i = 0; i < 18; ++i) CHECK(g.values()[i] == img.pixels[i] / 255.0);
  }
  RgbImage grey{2, 2, 1, {0, 85, 170, 255}};
  write_png(scratch("grey.png"), grey);
  CHECK(read_image(scratch("grey.png")).channels() == 1);
  std::ofstream(scratch("junk.png")) << "not an image";
  CHECK_THROWS_AS(read_image(scratch("junk.png")), Error);
}

TEST_CASE("normal colorization") {
  NormalMap n{Grid<Vec3>(3, 1), Mask(3, 1, std::vector<std::uint8_t>{1, 1, 0})};
  n.normals[0] = {0, 0, -1};
  n.normals[1] = {1, 0, 0};
  const RgbImage c = colorize_normals(n);
  CHECK(c.pixels == std::vector<std::uint8_t>{128, 128, 0, 255, 128, 128, 255, 255, 255});
}

TEST_CASE("run configuration parsing") {
  const RunConfig c = parse_run_config(R"({
    "input": "d.pfm", "guide": "g.png", "confidence": "c.pfm",
    "intrinsics": {"fx": 500, "fy": 500, "cx": 320, "cy": 240},
    "graph": {"window": 5}, "preset": "kitti", "regularizer": "nltgv",
    "adam": {"iters_per_scale": 30}, "threads": 2, "out": "o.pfm"
  })");
  CHECK(c.input == "d.pfm");
  CHECK(c.confidence == fs::path("c.pfm"));
  CHECK(c.intrinsics->cx == 320);
  CHECK(c.graph.window == 5);
  CHECK(c.adam.iters_per_scale == 30);
  CHECK(c.regularizer == Regularizer::kNltgv);
  CHECK(c.schedule().alpha == std::vector{15.0, 15.0});
  CHECK(parse_run_config("{}").schedule().scales == 4);

  CHECK_THROWS_AS(parse_run_config(R"({"inptu": "x"})"), Error);
  CHECK_THROWS_AS(parse_run_config(R"({"adam": {"lr": 1}})"), Error);
  CHECK_THROWS_AS(parse_run_config("[1, 2"), Error);
  const RunConfig both =
      parse_run_config(R"({"preset": "kitti", "pyramid": {"scales": 1, "lambda": [1], "alpha": [1]}})");
  CHECK_THROWS_AS(both.schedule(), Error);
  const RunConfig explicit_schedule = parse_run_config(R"({"pyramid": {"scales": 1, "lambda": [3], "alpha": [2]}})");
  CHECK(explicit_schedule.schedule().lambda == std::vector{3.0});
}
