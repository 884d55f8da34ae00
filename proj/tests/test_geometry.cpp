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
#include <limits>
#include <random>

#include "graphdepth/geometry.hpp"
#include "support.hpp"

using namespace graphdepth;

namespace {

// Residuals of the two linear constraints tying u to n, with rho recomputed
// from n at the anchor: a - ux rho fx and b - uy rho fy.
Vec2 constraint_residual(const Vec3& n, const Vec2& u, double d0, const Vec2& anchor, const CameraIntrinsics& cam) {
  const double rho = rho_at(n, d0, anchor, cam);
  return {n.x - u.x * rho * cam.fx, n.y - u.y * rho * cam.fy};
}

}  // namespace

TEST_CASE("plane_inverse_depth on hand examples") {
  CHECK(plane_inverse_depth({{10, 20}, 0.5, {0, 0}}, 37, 91) == 0.5);
  CHECK(plane_inverse_depth({{0, 0}, 1.0, {0.1, -0.2}}, 2, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fronto-parallel scene plane has constant inverse depth") {
  const ScenePlane plane({0, 0, 2}, {0, 0, -1});
  const CameraIntrinsics cam{500, 400, 320, 240};
  for (double x : {0.0, 100.0, 639.0}) {
    for (double y : {0.0, 77.0, 479.0}) CHECK(scene_plane_inverse_depth(plane, cam, x, y) == 0.5);
  }
}

TEST_CASE("ray parallel to the plane is rejected") {
  const ScenePlane plane({0, 0, 2}, {1, 0, -1});
  const CameraIntrinsics cam{100, 100, 50, 50};
  // bracket = a (x - cx) / fx + c vanishes at x = cx + fx.
  try {
    scene_plane_inverse_depth(plane, cam, 150, 10);
    FAIL("expected DegeneratePlaneRay");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegeneratePlaneRay);
  }
}

TEST_CASE("scene plane invariants") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const ScenePlane p = testing::random_plane(rng);
    CHECK(std::abs(norm(p.normal()) - 1.0) < 1e-12);
    CHECK(p.rho() < 0.0);
    CHECK(std::abs(p.rho() - dot(p.normal(), p.point())) < 1e-12);
  }
  CHECK_THROWS_AS(ScenePlane({0, 0, -1}, {0, 0, 1}), Error);
  try {
    ScenePlane({0, 0, 1}, {1, 0, 0});
    FAIL("expected ZeroRho");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroRho);
  }
}

TEST_CASE("u_from_normal by substitution") {
  const CameraIntrinsics cam{100, 100, 0, 0};
  CHECK(u_from_normal(ScenePlane({1, 2, 3}, {0, 0, -1}), cam).x == 0.0);
  CHECK(u_from_normal(ScenePlane({1, 2, 3}, {0, 0, -1}), cam).y == 0.0);
  // n = (-0.6, 0, -0.8), P0 = (0, 0, 2.5): rho = -2.
  const ScenePlane tilted({0, 0, 2.5}, {-0.6, 0, -0.8});
  CHECK(tilted.rho() == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(u_from_normal(tilted, cam).x == doctest::Approx(0.003).epsilon(1e-14));
}

TEST_CASE("image-plane and scene-plane inverse depth agree") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> px(0.0, 640.0);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const CameraIntrinsics cam = testing::random_camera(rng);
    const ScenePlane plane = testing::random_plane(rng);
    const ImagePlaneParam param = image_plane_param(plane, cam);
    const double x = px(rng), y = px(rng);
    double ref = 0.0;
    try {
      ref = scene_plane_inverse_depth(plane, cam, x, y);
    } catch (const Error&) {
      continue;
    }
    const double got = plane_inverse_depth(param, x, y);
    CHECK(std::abs(got - ref) <= 1e-10 * std::abs(ref));
    ++checked;
  }
  CHECK(checked > 1900);
}

TEST_CASE("normal_from_u case 4 is fronto-parallel") {
  const Vec3 n = normal_from_u({0, 0}, 0.7, {3, 4}, {100, 120, 50, 60});
  CHECK(n.x == 0.0);
  CHECK(n.y == 0.0);
  CHECK(n.z == -1.0);
}

TEST_CASE("normal_from_u case 2 satisfies the constraints") {
  const CameraIntrinsics cam{100, 100, 32, 24};
  const Vec2 u{0.003, 0};
  const Vec2 anchor{cam.cx, cam.cy};
  const Vec3 n = normal_from_u(u, 0.5, anchor, cam);
  CHECK(n.y == 0.0);
  const Vec2 r = constraint_residual(n, u, 0.5, anchor, cam);
  CHECK(std::abs(r.x) < 1e-12);
  CHECK(std::abs(r.y) < 1e-12);
  CHECK(std::abs(norm(n) - 1.0) < 1e-12);
  CHECK(rho_at(n, 0.5, anchor, cam) < 0.0);
}

TEST_CASE("normal_from_u dispatches on exact zeros") {
  const CameraIntrinsics cam{500, 500, 320, 240};
  const Vec2 anchor{100, 50};
  // A tiny but non-zero ux is still case 1 and must stay finite.
  const Vec2 u{1e-300, 0.1};
  const Vec3 n = normal_from_u(u, 0.5, anchor, cam);
  CHECK(std::isfinite(n.x));
  CHECK(std::isfinite(n.y));
  CHECK(std::isfinite(n.z));
  CHECK(std::abs(norm(n) - 1.0) < 1e-12);
  const Vec2 r = constraint_residual(n, u, 0.5, anchor, cam);
  CHECK(std::abs(r.x) < 1e-9);
  CHECK(std::abs(r.y) < 1e-9);
  // Same answer as case 3 in the limit ux -> 0.
  const Vec3 n3 = normal_from_u({0, 0.1}, 0.5, anchor, cam);
  CHECK(angle_between(n, n3) < 1e-12);
}

TEST_CASE("normal_from_u inverts u_from_normal in all four cases") {
  std::mt19937_64 rng(13);
  double worst = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const bool zx = i % 4 == 1 || i % 4 == 3;
    const bool zy = i % 4 == 2 || i % 4 == 3;
    const CameraIntrinsics cam = testing::random_camera(rng);
    const ScenePlane plane = testing::random_plane(rng, zx, zy);
    const ImagePlaneParam p = image_plane_param(plane, cam);
    CHECK((p.u.x == 0.0) == zx);
    CHECK((p.u.y == 0.0) == zy);
    const Vec3 n = normal_from_u(p.u, p.d0, p.anchor, cam);
    worst = std::max(worst, angle_between(n, plane.normal()));
    CHECK(std::abs(norm(n) - 1.0) < 1e-12);
    CHECK(rho_at(n, p.d0, p.anchor, cam) < 0.0);
    const Vec2 r = constraint_residual(n, p.u, p.d0, p.anchor, cam);
    CHECK(std::abs(r.x) < 1e-9);
    CHECK(std::abs(r.y) < 1e-9);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("derivative kernel maps a unit ramp to 1") {
  for (double sigma : {0.2, 1.0, 5.0}) {
    const DerivativeKernel k = gaussian_derivative_kernel(sigma);
    double gx_ramp = 0.0, gx_const = 0.0, gx_yramp = 0.0;
    for (int dy = -2; dy <= 2; ++dy) {
      for (int dx = -2; dx <= 2; ++dx) {
        gx_ramp += k.taps[dy + 2][dx + 2] * dx;
        gx_const += k.taps[dy + 2][dx + 2];
        gx_yramp += k.taps[dy + 2][dx + 2] * dy;
      }
    }
    CHECK(gx_ramp == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(gx_const) < 1e-15);
    CHECK(std::abs(gx_yramp) < 1e-15);
  }
}

TEST_CASE("normals from a constant map are fronto-parallel") {
  const InverseDepthMap d(Grid<double>(9, 7, 0.25), Mask(9, 7, 1));
  const NormalMap n = normals_from_depth_gradient(d, {50, 50, 4, 3}, 1.0);
  for (std::size_t i = 0; i < n.normals.size(); ++i) {
    CHECK(n.valid[i] == 1);
    CHECK(n.normals[i].z == -1.0);
  }
}

TEST_CASE("normals from a planar map recover the plane normal") {
  const CameraIntrinsics cam{60, 70, 15.5, 11.5};
  const ScenePlane plane({0.2, -0.1, 3.0}, {0.3, -0.2, -1.0});
  const int w = 32, h = 24;
  Grid<double> g(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) g(x, y) = scene_plane_inverse_depth(plane, cam, x, y);
  }
  for (double sigma : {0.2, 5.0}) {
    const NormalMap n = normals_from_depth_gradient(InverseDepthMap(g, Mask(w, h, 1)), cam, sigma);
    double worst = 0.0;
    for (int y = 2; y < h - 2; ++y) {
      for (int x = 2; x < w - 2; ++x) worst = std::max(worst, angle_between(n.normals(x, y), plane.normal()));
    }
    CHECK(worst * 180.0 / M_PI < 0.1);
  }
}

TEST_CASE("an invalid pixel invalidates its 5x5 neighborhood") {
  const int w = 12, h = 10;
  Mask valid(w, h, 1);
  valid(5, 4) = 0;
  Grid<double> g(w, h, 0.5);
  g(5, 4) = 0.0;
  const NormalMap n = normals_from_depth_gradient(InverseDepthMap(g, valid), {50, 50, 6, 5}, 1.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool near = std::abs(x - 5) <= 2 && std::abs(y - 4) <= 2;
      CHECK(n.valid(x, y) == (near ? 0 : 1));
    }
  }
}

TEST_CASE("invalid pixels at the border spread through replicate padding") {
  Mask valid(6, 6, 1);
  valid(0, 0) = 0;
  Grid<double> g(6, 6, 0.5);
  const NormalMap n = normals_from_depth_gradient(InverseDepthMap(g, valid), {50, 50, 3, 3}, 1.0);
  CHECK(n.valid(2, 2) == 0);
  CHECK(n.valid(3, 2) == 1);
}

TEST_CASE("disparity conversion") {
  Grid<double> disp(3, 1, std::vector<double>{64.0, 0.0, -2.0});
  const InverseDepthMap d = disparity_to_inverse_depth(disp, 3200, 0.2);
  CHECK(d.values()[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(d.valid()[0] == 1);
  CHECK(d.valid()[1] == 0);
  CHECK(d.valid()[2] == 0);
  CHECK(std::isinf(inverse_depth_to_disparity(d, 3200, 0.2)[1]));

  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.01, 300.0);
  Grid<double> r(20, 20);
  for (double& v : r.values()) v = u(rng);
  const Grid<double> back = inverse_depth_to_disparity(disparity_to_inverse_depth(r, 721.5, 0.54), 721.5, 0.54);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double ulp = std::nextafter(r[i], HUGE_VAL) - r[i];
    CHECK(std::abs(back[i] - r[i]) <= ulp);
  }

  for (auto [f, b] : {std::pair{0.0, 1.0}, {1.0, 0.0}, {-1.0, 1.0}}) {
    try {
      disparity_to_inverse_depth(disp, f, b);
      FAIL("expected NonPositiveCalibration");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNonPositiveCalibration);
    }
  }
}

TEST_CASE("inverse depth map validation") {
  Grid<double> g(2, 1, std::vector<double>{1.0, -1.0});
  CHECK_THROWS_AS(InverseDepthMap(g, Mask(2, 1, 1)), Error);
  const InverseDepthMap d = InverseDepthMap::from_raw(g);
  CHECK(d.valid_count() == 1);
  Grid<double> nan(1, 1, std::numeric_limits<double>::quiet_NaN());
  CHECK(InverseDepthMap::from_raw(nan).valid_count() == 0);
}
