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
#include <iosfwd>
#include <span>
#include <vector>

#include "graphdepth/grid.hpp"

namespace graphdepth {

struct Pixel {
  int x = 0;
  int y = 0;
};

/// Guide image with values in [0, 1], channels interleaved per pixel.
class GuideImage {
 public:
  GuideImage() = default;
  /// Throws kInvalidArgument for a channel count other than 1 or 3, a size
  /// mismatch, or values outside [0, 1].
  GuideImage(int width, int height, int channels, std::vector<double> values);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  double at(int x, int y, int c) const noexcept {
    return values_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::span<const double> values() const noexcept { return values_; }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<double> values_;
};

struct GraphParams {
  double sigma_int = 0.07;
  double sigma_spa = 3.0;
  int window = 9;
  int patch = 3;
  int k = 20;

  void validate() const;
};

struct Edge {
  std::int32_t target = 0;
  int dx = 0;
  int dy = 0;
  double weight = 0.0;
};

/// Directed K-nearest-neighbor pixel graph.
///
/// Every node owns `max_degree()` edge slots stored slot-major: slot k of
/// node i lives at k * node_count() + i, so the kernels can stream the same
/// slot of consecutive nodes. Unused slots point back at their own node with
/// zero weight and zero offset, which makes every residual on them vanish.
/// Used slots come first, ordered by descending weight and then ascending
/// target index.
///
/// The graph also keeps, per node, the list of slots that point at it
/// (incoming edges, ascending slot index) so gradient contributions can be
/// gathered instead of scattered.
class PixelGraph {
 public:
  PixelGraph() = default;

  /// Builds a graph from explicit per-node edge lists. Lists are sorted into
  /// canonical order. Throws kInvalidArgument on self-edges, out-of-bounds
  /// targets, offsets inconsistent with the target, weights outside (0, 1],
  /// or more than `max_degree` edges at a node.
  static PixelGraph from_edge_lists(int width, int height, int max_degree,
                                    const std::vector<std::vector<Edge>>& lists);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t node_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  int max_degree() const noexcept { return slots_; }
  int degree(std::size_t node) const noexcept { return degree_[node]; }
  Edge edge(std::size_t node, int slot) const noexcept;
  std::size_t edge_count() const noexcept;

  std::span<const std::int32_t> targets() const noexcept { return target_; }
  std::span<const double> weights() const noexcept { return weight_; }
  std::span<const double> offsets_x() const noexcept { return dx_; }
  std::span<const double> offsets_y() const noexcept { return dy_; }
  std::span<const std::uint32_t> incoming_offsets() const noexcept { return in_offsets_; }
  std::span<const std::uint32_t> incoming_slots() const noexcept { return in_slots_; }

  /// One "ix iy jx jy weight" line per used edge.
  void write_edge_list(std::ostream& out) const;

 private:
  int width_ = 0;
  int height_ = 0;
  int slots_ = 0;
  std::vector<std::int32_t> degree_;
  std::vector<std::int32_t> target_;
  std::vector<double> weight_;
  std::vector<double> dx_;
  std::vector<double> dy_;
  std::vector<std::uint32_t> in_offsets_;
  std::vector<std::uint32_t> in_slots_;
};

/// Squared Frobenius distance between the patch x patch (x channels) windows
/// centered at i and j, with replicate padding at the borders.
double patch_distance(const GuideImage& img, Pixel i, Pixel j, int patch);

/// exp(-|Q_i - Q_j|_F^2 / (2 sigma_int^2)) * exp(-|i - j|^2 / (2 sigma_spa^2)).
double edge_weight(const GuideImage& img, Pixel i, Pixel j, const GraphParams& params);

/// Keeps, for every pixel, the K heaviest edges among the in-bounds pixels of
/// the B x B window centered on it. Edges whose weight underflows to zero are
/// dropped. The result does not depend on `threads`.
PixelGraph build_graph(const GuideImage& img, const GraphParams& params, int threads = 1);

}  // namespace graphdepth
