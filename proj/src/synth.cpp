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

#include "graphdepth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace graphdepth {

SceneSpec make_scene(std::string_view kind, int width, int height) {
  if (width < 1 || height < 1) throw Error(ErrorCode::kInvalidArgument, "scene dimensions must be positive");
  SceneSpec spec;
  spec.width = width;
  spec.height = height;
  const double f = 1.25 * std::max(width, height);
  spec.cam = {f, f, 0.5 * (width - 1), 0.5 * (height - 1)};
  if (kind == "two-planes") {
    const int split = width / 2;
    spec.regions.push_back({0, 0, split, height, {-0.4, 0.0, 3.0}, {0.35, 0.1, -1.0}, {0.8, 0.25, 0.2}});
    spec.regions.push_back({split, 0, width, height, {0.4, 0.0, 2.5}, {-0.3, 0.25, -1.0}, {0.2, 0.35, 0.8}});
  } else if (kind == "single-plane") {
    spec.regions.push_back({0, 0, width, height, {0.0, 0.0, 2.5}, {0.2, -0.3, -1.0}, {0.6, 0.6, 0.3}});
  } else if (kind == "fronto") {
    spec.regions.push_back({0, 0, width, height, {0.0, 0.0, 2.0}, {0.0, 0.0, -1.0}, {0.5, 0.5, 0.5}});
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown scene '" + std::string(kind) + "'");
  }
  return spec;
}

std::vector<std::string> scene_names() { return {"two-planes", "single-plane", "fronto"}; }

SyntheticBundle generate_synthetic(const SceneSpec& spec) {
  spec.cam.validate();
  for (double frac : {spec.noise, spec.holes, spec.outliers}) {
    if (!(frac >= 0.0 && frac <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "noise, hole and outlier fractions must lie in [0, 1]");
    }
  }
  if (spec.holes + spec.outliers > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "holes and outliers cannot cover more than every pixel");
  }
  const int w = spec.width;
  const int h = spec.height;
  if (w < 1 || h < 1) throw Error(ErrorCode::kInvalidArgument, "scene dimensions must be positive");

  std::vector<ScenePlane> planes;
  for (const SceneRegion& r : spec.regions) {
    try {
      planes.emplace_back(r.point, r.normal);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidScene, std::string("region plane rejected: ") + e.what());
    }
  }

  Grid<int> owner(w, h, -1);
  for (std::size_t k = 0; k < spec.regions.size(); ++k) {
    const SceneRegion& r = spec.regions[k];
    for (int y = std::max(0, r.y0); y < std::min(h, r.y1); ++y) {
      for (int x = std::max(0, r.x0); x < std::min(w, r.x1); ++x) owner(x, y) = static_cast<int>(k);
    }
  }

  Grid<double> gt(w, h);
  Grid<Vec3> normals(w, h);
  std::vector<double> guide(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int k = owner(x, y);
      if (k < 0) {
        throw Error(ErrorCode::kInvalidScene,
                    "pixel (" + std::to_string(x) + ", " + std::to_string(y) + ") is not covered by any region");
      }
      double d = 0.0;
      try {
        d = scene_plane_inverse_depth(planes[k], spec.cam, x, y);
      } catch (const Error&) {
        d = 0.0;
      }
      if (!(d > 0.0) || !std::isfinite(d)) {
        throw Error(ErrorCode::kInvalidScene, "region " + std::to_string(k) + " is not in front of the camera at (" +
                                                  std::to_string(x) + ", " + std::to_string(y) + ")");
      }
      gt(x, y) = d;
      normals(x, y) = planes[k].normal();
      const std::size_t i = gt.index(x, y);
      for (int c = 0; c < 3; ++c) guide[3 * i + c] = spec.regions[k].color[c];
    }
  }

  const auto [lo, hi] = std::minmax_element(gt.values().begin(), gt.values().end());
  const double range = *hi - *lo;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Grid<double> noisy = gt;
  if (spec.noise > 0.0) {
    for (double& v : noisy.values()) v += spec.noise * range * gauss(rng);
  }

  const std::size_t n = gt.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto holes = static_cast<std::size_t>(std::floor(spec.holes * static_cast<double>(n)));
  const auto outliers = static_cast<std::size_t>(std::floor(spec.outliers * static_cast<double>(n)));

  Mask valid(w, h, 1);
  Grid<double> confidence(w, h, 1.0);
  Mask outlier(w, h, 0);
  for (std::size_t k = 0; k < holes; ++k) {
    valid[order[k]] = 0;
    confidence[order[k]] = 0.0;
    noisy[order[k]] = 0.0;
  }
  std::uniform_real_distribution<double> magnitude(0.25, 0.5);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t k = holes; k < holes + outliers; ++k) {
    const std::size_t i = order[k];
    const double scale = range > 0.0 ? range : gt[i];
    const double offset = magnitude(rng) * scale;
    const double sign = coin(rng) ? 1.0 : -1.0;
    double v = gt[i] + sign * offset;
    if (!(v > 0.0)) v = gt[i] + offset;
    noisy[i] = v;
    outlier[i] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (valid[i] && !(noisy[i] > 0.0)) {
      throw Error(ErrorCode::kInvalidScene, "noise drives the inverse depth non-positive; lower --noise");
    }
  }

  SyntheticBundle out;
  out.gt = InverseDepthMap(gt, Mask(w, h, 1));
  out.gt_normals = {std::move(normals), Mask(w, h, 1)};
  out.guide = GuideImage(w, h, 3, std::move(guide));
  out.noisy = InverseDepthMap(std::move(noisy), std::move(valid));
  out.confidence = std::move(confidence);
  out.outlier = std::move(outlier);
  return out;
}

}  // namespace graphdepth
