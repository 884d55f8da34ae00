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

#include <cmath>
#include <random>

#include "graphdepth/solver.hpp"
#include "graphdepth/synth.hpp"
#include "support.hpp"

using namespace graphdepth;

namespace {

InverseDepthMap planar_map(int w, int h) {
  const CameraIntrinsics cam{1.25 * w, 1.25 * w, 0.5 * (w - 1), 0.5 * (h - 1)};
  const ScenePlane plane({0.1, 0.2, 2.5}, {0.25, -0.3, -1.0});
  Grid<double> g(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) g(x, y) = scene_plane_inverse_depth(plane, cam, x, y);
  }
  return InverseDepthMap(g, Mask(w, h, 1));
}

GuideImage flat_guide(int w, int h) { return GuideImage(w, h, 1, std::vector<double>(std::size_t(w) * h, 0.5)); }

// Least-squares slope of a grid along x and y.
Vec2 fit_slope(const Grid<double>& g) {
  double sx = 0, sy = 0, sv = 0, sxx = 0, syy = 0, sxv = 0, syv = 0;
  const double n = double(g.size());
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      const double v = g(x, y);
      sx += x, sy += y, sv += v, sxx += x * x, syy += y * y, sxv += x * v, syv += y * v;
    }
  }
  // Separable because the grid is a full rectangle.
  return {(sxv - sx * sv / n) / (sxx - sx * sx / n), (syv - sy * sv / n) / (syy - sy * sy / n)};
}

}  // namespace

TEST_CASE("ADAM recovers the input when lambda = 0") {
  std::mt19937_64 rng(51);
  auto inst = testing::random_instance(10, 10, rng, 0.0);
  for (double& m : inst.mask.values()) m = 1.0;
  const ProblemInstance p = testing::make_problem(inst, 0.0, 1.0, 1e-6, Regularizer::kMixedL12);
  const AdamResult r = adam_minimize(p, State(10, 10), AdamConfig{});
  double worst = 0.0;
  for (std::size_t i = 0; i < inst.d_bar.size(); ++i) worst = std::max(worst, std::abs(r.state.d()[i] - inst.d_bar[i]));
  CHECK(worst < 1e-3);
}

TEST_CASE("ADAM leaves a clean planar optimum alone") {
  const int w = 12, h = 12;
  const InverseDepthMap d = planar_map(w, h);
  auto g = std::make_shared<const PixelGraph>(build_graph(flat_guide(w, h), {}));
  const ProblemInstance p(d, Grid<double>(w, h, 1.0), g, 7.5, 7.5, 1e-6, Regularizer::kMixedL12);
  const CameraIntrinsics cam{1.25 * w, 1.25 * w, 0.5 * (w - 1), 0.5 * (h - 1)};
  const Vec2 u = u_from_normal(ScenePlane({0.1, 0.2, 2.5}, {0.25, -0.3, -1.0}), cam);
  NormalParamMap slopes(w, h);
  for (double& v : slopes.ux.values()) v = u.x;
  for (double& v : slopes.uy.values()) v = u.y;
  const State init(d.values(), slopes);
  const AdamResult r = adam_minimize(p, init, AdamConfig{});
  CHECK(r.best_energy <= r.initial_energy);
  double worst = 0.0;
  for (std::size_t k = 0; k < init.values().size(); ++k) {
    worst = std::max(worst, std::abs(r.state.values()[k] - init.values()[k]));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("ADAM never returns something worse than its start") {
  std::mt19937_64 rng(52);
  AdamConfig cfg;
  cfg.iters_per_scale = 60;
  cfg.min_iters = 0;
  cfg.stall_window = 10;
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = testing::random_instance(16, 16, rng);
    const ProblemInstance p = testing::make_problem(inst, 7.5, 7.5, 1e-6, Regularizer::kMixedL12);
    const AdamResult r = adam_minimize(p, testing::random_state(16, 16, rng), cfg);
    CHECK(r.best_energy <= r.initial_energy);
    CHECK(r.trace.front() == r.initial_energy);
    CHECK(*std::min_element(r.trace.begin(), r.trace.end()) == r.best_energy);
    CHECK(total_energy(r.state, p) == r.best_energy);
  }
}

TEST_CASE("ADAM reports a diverging energy") {
  std::mt19937_64 rng(53);
  const auto inst = testing::random_instance(6, 6, rng);
  const ProblemInstance p = testing::make_problem(inst, 1.0, 1.0, 1e-6, Regularizer::kMixedL12);
  AdamConfig cfg;
  cfg.step = 1e300;
  cfg.final_step_ratio = 1.0;
  try {
    adam_minimize(p, State(6, 6), cfg);
    FAIL("expected NonFiniteEnergy");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFiniteEnergy);
  }
  State bad(6, 6);
  bad.d()[0] = NAN;
  CHECK_THROWS_AS(adam_minimize(p, bad, AdamConfig{}), Error);
}

TEST_CASE("ADAM config validation") {
  AdamConfig c;
  c.beta1 = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.step = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.final_step_ratio = 2.0;
  CHECK_THROWS_AS(c.validate(), Error);
  PyramidConfig p;
  p.lambda = {1.0};
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("downsampling picks every r-th sample") {
  Grid<double> ramp(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) ramp(x, y) = 10 * y + x;
  }
  CHECK(downsample(ramp, 1) == ramp);
  const Grid<double> half = downsample(ramp, 2);
  CHECK(half == Grid<double>(2, 2, std::vector<double>{0, 2, 20, 22}));
  CHECK(downsample(Grid<int>(5, 7), 2).width() == 2);
  CHECK(downsample(Grid<int>(5, 7), 2).height() == 3);

  // A plane sampled every r pixels has r times the slope.
  Grid<double> plane(24, 18);
  for (int y = 0; y < 18; ++y) {
    for (int x = 0; x < 24; ++x) plane(x, y) = 0.3 + 0.01 * x - 0.004 * y;
  }
  for (int r : {2, 3}) {
    const Vec2 s = fit_slope(downsample(plane, r));
    CHECK(s.x == doctest::Approx(0.01 * r).epsilon(1e-9));
    CHECK(s.y == doctest::Approx(-0.004 * r).epsilon(1e-9));
  }
}

TEST_CASE("upsampling divides slopes by r") {
  State c(1, 1);
  c.d()[0] = 0.7;
  c.ux()[0] = 0.2;
  c.uy()[0] = -0.4;
  const State f = upsample_and_scale(c, 2);
  REQUIRE(f.width() == 2);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(f.d()[i] == 0.7);
    CHECK(f.ux()[i] == doctest::Approx(0.1).epsilon(1e-16));
    CHECK(f.uy()[i] == doctest::Approx(-0.2).epsilon(1e-16));
  }
  std::mt19937_64 rng(54);
  const State s = testing::random_state(5, 4, rng);
  CHECK(upsample_and_scale(s, 1) == s);
  // Sizes that are not multiples of r reuse the last coarse row/column.
  const State odd = upsample_and_scale(s, 2, 11, 9);
  CHECK(odd.d()[8 * 11 + 10] == s.d()[3 * 5 + 4]);
}

TEST_CASE("upsampled planar pairs satisfy the plane model at replica pixels") {
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> q(-512, 512);
  for (int r : {2, 3}) {
    for (int trial = 0; trial < 10; ++trial) {
      const int cw = 7, ch = 6;
      // Dyadic coefficients keep the coarse plane exact in double.
      const double d0 = 1.0 + std::abs(q(rng)) / 1024.0, ux = q(rng) / 65536.0, uy = q(rng) / 65536.0;
      State c(cw, ch);
      for (int y = 0; y < ch; ++y) {
        for (int x = 0; x < cw; ++x) {
          c.d()[y * cw + x] = d0 + ux * x + uy * y;
          c.ux()[y * cw + x] = ux;
          c.uy()[y * cw + x] = uy;
        }
      }
      const State f = upsample_and_scale(c, r);
      const int fw = f.width();
      for (int py = 0; py < ch; ++py) {
        for (int px = 0; px < cw; ++px) {
          const std::size_t p = std::size_t(r * py) * fw + r * px;
          for (int qy = 0; qy < ch; ++qy) {
            for (int qx = 0; qx < cw; ++qx) {
              const std::size_t t = std::size_t(r * qy) * fw + r * qx;
              const long double pred = (long double)f.d()[p] + (long double)f.ux()[p] * (r * (qx - px)) +
                                       (long double)f.uy()[p] * (r * (qy - py));
              const double got = f.d()[t];
              CHECK(std::abs(double(pred) - got) <= std::nextafter(got, HUGE_VAL) - got);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("refine keeps a clean planar input") {
  const int w = 32, h = 32;
  const InverseDepthMap d = planar_map(w, h);
  RefineConfig cfg;
  cfg.pyramid = preset(kDefaultPreset, cfg.regularizer);
  const RefineResult r = refine(d, Grid<double>(w, h, 1.0), flat_guide(w, h), cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(r.d.values()[i] - d.values()[i]));
  CHECK(worst <= 1e-4);
  CHECK(r.final_energy <= r.naive_energy);
  CHECK(r.traces.size() == 4);
}

TEST_CASE("single-scale refine is one ADAM solve") {
  std::mt19937_64 rng(56);
  const int w = 10, h = 8;
  const auto inst = testing::random_instance(w, h, rng, 0.0);
  Grid<double> raw(w, h);
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = 0.5 + inst.d_bar[i];
  const InverseDepthMap d(raw, Mask(w, h, 1));
  const GuideImage guide = testing::random_guide(w, h, 3, rng);
  RefineConfig cfg;
  cfg.pyramid = {1, 2, {4.0}, {2.0}};
  cfg.adam.iters_per_scale = 80;
  const RefineResult r = refine(d, inst.mask, guide, cfg);

  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (double v : raw.values()) lo = std::min(lo, v), hi = std::max(hi, v);
  Grid<double> dn(w, h);
  for (std::size_t i = 0; i < raw.size(); ++i) dn[i] = (raw[i] - lo) / (hi - lo);
  const ProblemInstance p(dn, Mask(w, h, 1), inst.mask, std::make_shared<const PixelGraph>(build_graph(guide, {})),
                          4.0, 2.0, 1e-6, Regularizer::kMixedL12);
  State init(w, h);
  for (std::size_t i = 0; i < dn.size(); ++i) init.d()[i] = dn[i];
  const AdamResult a = adam_minimize(p, init, cfg.adam);
  CHECK(a.best_energy == r.final_energy);
  for (std::size_t i = 0; i < raw.size(); ++i) CHECK(r.d.values()[i] == lo + (hi - lo) * a.state.d()[i]);
}

TEST_CASE("refine is deterministic across runs and thread counts") {
  SceneSpec spec = make_scene("two-planes", 24, 20);
  spec.noise = 0.05;
  spec.holes = 0.2;
  spec.seed = 3;
  const SyntheticBundle b = generate_synthetic(spec);
  RefineConfig cfg;
  cfg.pyramid = preset("kitti", cfg.regularizer);
  cfg.adam.iters_per_scale = 150;
  cfg.adam.min_iters = 0;
  const RefineResult a = refine(b.noisy, b.confidence, b.guide, cfg);
  const RefineResult c = refine(b.noisy, b.confidence, b.guide, cfg);
  cfg.threads = 3;
  const RefineResult t = refine(b.noisy, b.confidence, b.guide, cfg);
  CHECK(a.d.values() == c.d.values());
  CHECK(a.d.values() == t.d.values());
  CHECK(a.u.ux == t.u.ux);
  CHECK(a.u.uy == t.u.uy);
}

TEST_CASE("refine never ends above the naive start") {
  std::mt19937_64 rng(57);
  RefineConfig cfg;
  cfg.adam.iters_per_scale = 100;
  cfg.adam.min_iters = 0;
  for (int trial = 0; trial < 8; ++trial) {
    const auto inst = testing::random_instance(16, 16, rng);
    Grid<double> raw = inst.d_bar;
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = inst.valid[i] ? 0.1 + raw[i] : 0.0;
    const InverseDepthMap d = InverseDepthMap::from_raw(raw);
    cfg.regularizer = trial % 2 ? Regularizer::kNltgv : Regularizer::kMixedL12;
    const RefineResult r = refine(d, inst.mask, testing::random_guide(16, 16, 3, rng), cfg);
    CHECK(r.final_energy <= r.naive_energy);
  }
}

TEST_CASE("refine rejects inputs without information") {
  const int w = 8, h = 8;
  const InverseDepthMap d = planar_map(w, h);
  RefineConfig cfg;
  cfg.pyramid = {1, 2, {0.0}, {1.0}};
  try {
    refine(d, Grid<double>(w, h, 0.0), flat_guide(w, h), cfg);
    FAIL("expected EmptyConfidence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyConfidence);
  }
  cfg.pyramid = {1, 2, {1.0}, {1.0}};
  CHECK_NOTHROW(refine(d, Grid<double>(w, h, 0.0), flat_guide(w, h), cfg));
  cfg.pyramid = {5, 2, {1, 1, 1, 1, 1}, {1, 1, 1, 1, 1}};
  CHECK_THROWS_AS(refine(d, Grid<double>(w, h, 1.0), flat_guide(w, h), cfg), Error);
  CHECK_THROWS_AS(refine(d, Grid<double>(w, h - 1, 1.0), flat_guide(w, h), cfg), Error);
}

TEST_CASE("presets carry the published schedules") {
  const PyramidConfig sgm = preset("middlebury-sgm", Regularizer::kMixedL12);
  CHECK(sgm.lambda == std::vector{15.0, 25.0});
  CHECK(sgm.alpha == std::vector{3.5, 3.5});
  CHECK(preset("middlebury-bm", Regularizer::kMixedL12).lambda == std::vector{10.0, 20.0});
  CHECK(preset("middlebury-sgm", Regularizer::kNltgv).alpha == std::vector{50.0, 50.0});
  CHECK(preset("kitti", Regularizer::kMixedL12).alpha == std::vector{15.0, 15.0});
  CHECK(preset("kitti", Regularizer::kNltgv).lambda == std::vector{7.5, 7.5});
  const PyramidConfig eth = preset("eth3d", Regularizer::kNltgv);
  CHECK(eth.scales == 4);
  CHECK(eth.lambda == std::vector(4, 7.5));
  for (const std::string& name : preset_names()) CHECK_NOTHROW(preset(name, Regularizer::kMixedL12).validate());
  CHECK_THROWS_AS(preset("tsukuba", Regularizer::kMixedL12), Error);
}
