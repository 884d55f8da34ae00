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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "graphdepth/geometry.hpp"
#include "graphdepth/graph.hpp"

namespace graphdepth {

/// Axis-aligned pixel rectangle [x0, x1) x [y0, y1) showing one plane in one
/// guide color. Later regions paint over earlier ones.
struct SceneRegion {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  Vec3 point;
  Vec3 normal;
  std::array<double, 3> color{0.5, 0.5, 0.5};
};

struct SceneSpec {
  int width = 64;
  int height = 64;
  CameraIntrinsics cam;
  std::vector<SceneRegion> regions;
  /// Gaussian noise sigma as a fraction of the ground-truth d range.
  double noise = 0.0;
  /// Fraction of pixels invalidated (m = 0 there).
  double holes = 0.0;
  /// Fraction of pixels replaced by wrong values that keep m = 1.
  double outliers = 0.0;
  std::uint64_t seed = 0;
};

/// "two-planes", "single-plane" or "fronto" on a width x height sensor.
/// Throws kInvalidArgument for an unknown name.
SceneSpec make_scene(std::string_view kind, int width, int height);
std::vector<std::string> scene_names();

struct SyntheticBundle {
  InverseDepthMap gt;
  NormalMap gt_normals;
  GuideImage guide;
  InverseDepthMap noisy;
  Grid<double> confidence;
  Mask outlier;  // 1 where an outlier was planted
};

/// Renders the scene and corrupts it deterministically from spec.seed.
/// Exactly floor(holes * W * H) pixels are invalidated; outliers are drawn
/// from the remaining pixels. Throws kInvalidScene when a pixel is not
/// covered by any region or a region's plane is not in front of the camera
/// there, kInvalidArgument for fractions outside [0, 1].
SyntheticBundle generate_synthetic(const SceneSpec& spec);

}  // namespace graphdepth
