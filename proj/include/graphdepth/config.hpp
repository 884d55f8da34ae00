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

#include <filesystem>
#include <optional>
#include <string>

#include "graphdepth/geometry.hpp"
#include "graphdepth/solver.hpp"

namespace graphdepth {

/// Everything a `refine` run needs. Loaded from a JSON file with one key per
/// field; command-line flags override what the file sets.
struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path guide;
  std::optional<std::filesystem::path> confidence;
  std::optional<CameraIntrinsics> intrinsics;
  std::optional<double> baseline;
  bool disparity = false;

  GraphParams graph;
  /// Schedule: either a preset name or explicit lambda/alpha lists, not both.
  std::optional<std::string> preset;
  std::optional<PyramidConfig> pyramid;
  AdamConfig adam;
  double eps = 1e-6;
  Regularizer regularizer = Regularizer::kMixedL12;
  int threads = 1;

  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> u_out;
  std::optional<std::filesystem::path> normals_out;
  std::optional<std::filesystem::path> normals_png;
  std::optional<std::filesystem::path> trace;
  std::optional<std::filesystem::path> graph_dump;

  /// The lambda/alpha schedule this config selects (default preset when
  /// neither is set). Throws kInvalidArgument when both are set.
  PyramidConfig schedule() const;
};

/// Parses a JSON config. Unknown keys are rejected. Throws kIo when the file
/// cannot be read and kInvalidArgument for malformed content.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text);

}  // namespace graphdepth
