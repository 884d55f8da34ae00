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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "graphdepth/geometry.hpp"
#include "graphdepth/graph.hpp"
#include "graphdepth/grid.hpp"

namespace graphdepth {

/// Raw PFM contents. Rows run top to bottom, channels interleaved.
struct PfmImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> values;

  /// One channel as doubles.
  Grid<double> channel(int c) const;
};

/// Throws kMalformedHeader, kTruncatedPayload or kUnsupportedChannelCount.
PfmImage parse_pfm(std::istream& in);
PfmImage read_pfm(const std::filesystem::path& path);
/// Writes little-endian ("-1.0" scale). Channels must be 1 or 3.
void write_pfm(std::ostream& out, const PfmImage& img);
void write_pfm(const std::filesystem::path& path, const PfmImage& img);

/// Single-channel PFM as a grid; non-finite entries come back as they are
/// stored. Throws kUnsupportedChannelCount for a 3-channel file.
Grid<double> read_pfm_grid(const std::filesystem::path& path);
void write_pfm_grid(const std::filesystem::path& path, const Grid<double>& grid);
/// Three equally sized planes as a 3-channel PFM.
void write_pfm3(const std::filesystem::path& path, const Grid<double>& c0, const Grid<double>& c1,
                const Grid<double>& c2);

/// Single-channel PFM as inverse depth: non-finite and non-positive entries are invalid.
InverseDepthMap read_inverse_depth(const std::filesystem::path& path);
/// Invalid pixels are written as +inf.
void write_inverse_depth(const std::filesystem::path& path, const InverseDepthMap& d);

/// 8-bit raster, channels interleaved.
struct RgbImage {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> pixels;
};

/// PNG (via libpng) or binary/ASCII PGM/PPM, chosen by the file's magic
/// bytes. Values are scaled to [0, 1]; alpha is dropped.
GuideImage read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& img);
/// Binary PGM (channels 1) or PPM (channels 3), maxval 255.
void write_pnm(const std::filesystem::path& path, const RgbImage& img);

/// Confidence from a single-channel PFM (non-finite entries read as 0) or a
/// PGM/PNG image (divided by its maxval). Throws kInvalidArgument for values
/// outside [0, 1].
Grid<double> read_confidence(const std::filesystem::path& path);

/// round(255 (n + 1) / 2) per component; invalid pixels are white.
RgbImage colorize_normals(const NormalMap& normals);

}  // namespace graphdepth
