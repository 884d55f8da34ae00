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

#include <string>
#include <string_view>
#include <vector>

#include "graphdepth/energy.hpp"
#include "graphdepth/geometry.hpp"
#include "graphdepth/graph.hpp"

namespace graphdepth {

struct AdamConfig {
  double step = 3e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int iters_per_scale = 2000;
  /// Stop when the best energy improved by less than tol (relative) over the
  /// last `stall_window` iterations.
  double tol = 1e-7;
  int stall_window = 50;
  /// No early stop before this many iterations.
  int min_iters = 1000;
  /// The step decays geometrically from `step` to step * final_step_ratio
  /// over iters_per_scale iterations; 1 keeps it constant.
  double final_step_ratio = 1e-3;

  void validate() const;
};

/// Coarse-to-fine schedule. lambda/alpha are listed coarsest first.
struct PyramidConfig {
  int scales = 2;
  int factor = 2;
  std::vector<double> lambda{7.5, 7.5};
  std::vector<double> alpha{7.5, 7.5};

  void validate() const;
};

struct AdamResult {
  State state;  // best iterate
  double initial_energy = 0.0;
  double best_energy = 0.0;
  int best_iteration = 0;
  /// Energy of every evaluated iterate; trace[0] is the initial state.
  std::vector<double> trace;
};

/// Runs ADAM from `init` and returns the lowest-energy iterate seen. Throws
/// kNonFiniteEnergy when the energy stops being finite, kInvalidArgument for a
/// non-finite or mis-shaped init.
AdamResult adam_minimize(const ProblemInstance& prob, const State& init, const AdamConfig& cfg, int threads = 1);

/// Nearest-neighbor decimation: out(x, y) = in(r x, r y), size floor(W/r) x floor(H/r).
template <class T>
Grid<T> downsample(const Grid<T>& in, int factor) {
  if (factor < 1) throw Error(ErrorCode::kInvalidArgument, "downsampling factor must be >= 1");
  Grid<T> out(in.width() / factor, in.height() / factor);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out(x, y) = in(factor * x, factor * y);
  }
  return out;
}

GuideImage downsample(const GuideImage& in, int factor);

/// Replicates every coarse value over an r x r block of a width x height grid
/// and divides the slopes by r; d is not rescaled. Fine pixels beyond
/// r * coarse size reuse the last coarse row/column.
State upsample_and_scale(const State& coarse, int factor, int width, int height);
inline State upsample_and_scale(const State& coarse, int factor) {
  return upsample_and_scale(coarse, factor, coarse.width() * factor, coarse.height() * factor);
}

struct RefineConfig {
  GraphParams graph;
  PyramidConfig pyramid;
  AdamConfig adam;
  double eps = 1e-6;
  Regularizer regularizer = Regularizer::kMixedL12;
  int threads = 1;
};

struct ScaleTrace {
  int scale = 0;  // 0 is full resolution
  int width = 0;
  int height = 0;
  std::vector<double> energy;
};

struct RefineResult {
  InverseDepthMap d;
  NormalParamMap u;  // in units of the input per pixel
  std::vector<ScaleTrace> traces;  // coarsest first
  /// Full-resolution energies, in normalized units: the naive start (median
  /// fill, u = 0) and the returned solution.
  double naive_energy = 0.0;
  double final_energy = 0.0;
};

/// Multi-scale refinement of d_bar. The input is mapped affinely to [0, 1]
/// over its valid pixels, solved coarse to fine and mapped back.
///
/// Throws kInvalidArgument on shape mismatches or a bad config, and
/// kEmptyConfidence when there is nothing to refine from (no valid input, or a
/// zero mask with lambda = 0 at every scale).
RefineResult refine(const InverseDepthMap& d_bar, const Grid<double>& mask, const GuideImage& guide,
                    const RefineConfig& cfg);

/// Named lambda/alpha schedules. Known names: middlebury-sgm, middlebury-bm,
/// kitti, eth3d.
PyramidConfig preset(std::string_view name, Regularizer reg);
std::vector<std::string> preset_names();
inline constexpr std::string_view kDefaultPreset = "eth3d";

}  // namespace graphdepth
