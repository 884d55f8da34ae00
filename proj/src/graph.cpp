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

#include "graphdepth/graph.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "graphdepth/parallel.hpp"

namespace graphdepth {

GuideImage::GuideImage(int width, int height, int channels, std::vector<double> values)
    : width_(width), height_(height), channels_(channels), values_(std::move(values)) {
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "guide image must have 1 or 3 channels");
  }
  if (width < 0 || height < 0 ||
      values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels) {
    throw Error(ErrorCode::kInvalidArgument, "guide image data does not match its dimensions");
  }
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "guide image values must lie in [0, 1]");
    }
  }
}

void GraphParams::validate() const {
  if (!(sigma_int > 0.0) || !(sigma_spa > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "graph bandwidths must be positive");
  }
  if (window < 3 || window % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "search window must be odd and at least 3");
  }
  if (patch < 1 || patch % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "patch side must be odd and positive");
  }
  if (k < 1 || k > window * window - 1) {
    throw Error(ErrorCode::kInvalidArgument, "k must lie in [1, window^2 - 1]");
  }
}

namespace {

bool heavier(const Edge& a, const Edge& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  return a.target < b.target;
}

}  // namespace

PixelGraph PixelGraph::from_edge_lists(int width, int height, int max_degree,
                                       const std::vector<std::vector<Edge>>& lists) {
  if (width < 0 || height < 0 || max_degree < 1) {
    throw Error(ErrorCode::kInvalidArgument, "graph needs non-negative dimensions and max_degree >= 1");
  }
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (lists.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "one edge list per pixel is required");
  }
  PixelGraph g;
  g.width_ = width;
  g.height_ = height;
  g.slots_ = max_degree;
  g.degree_.assign(n, 0);
  g.target_.resize(n * max_degree);
  g.weight_.assign(n * max_degree, 0.0);
  g.dx_.assign(n * max_degree, 0.0);
  g.dy_.assign(n * max_degree, 0.0);

  std::vector<std::uint32_t> in_count(n, 0);
  std::vector<Edge> sorted;
  for (std::size_t i = 0; i < n; ++i) {
    const int x = static_cast<int>(i % width);
    const int y = static_cast<int>(i / width);
    sorted = lists[i];
    if (sorted.size() > static_cast<std::size_t>(max_degree)) {
      throw Error(ErrorCode::kInvalidArgument, "node exceeds the maximum degree");
    }
    std::sort(sorted.begin(), sorted.end(), heavier);
    for (const Edge& e : sorted) {
      if (e.target < 0 || static_cast<std::size_t>(e.target) >= n) {
        throw Error(ErrorCode::kInvalidArgument, "edge target out of bounds");
      }
      if (static_cast<std::size_t>(e.target) == i) {
        throw Error(ErrorCode::kInvalidArgument, "self-edges are not allowed");
      }
      if (e.target % width != x + e.dx || e.target / width != y + e.dy) {
        throw Error(ErrorCode::kInvalidArgument, "edge offset does not match its target");
      }
      if (!(e.weight > 0.0 && e.weight <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument, "edge weights must lie in (0, 1]");
      }
    }
    g.degree_[i] = static_cast<std::int32_t>(sorted.size());
    for (int k = 0; k < max_degree; ++k) {
      const std::size_t s = static_cast<std::size_t>(k) * n + i;
      if (k < static_cast<int>(sorted.size())) {
        const Edge& e = sorted[k];
        g.target_[s] = e.target;
        g.weight_[s] = e.weight;
        g.dx_[s] = e.dx;
        g.dy_[s] = e.dy;
        ++in_count[e.target];
      } else {
        g.target_[s] = static_cast<std::int32_t>(i);
      }
    }
  }

  g.in_offsets_.assign(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) g.in_offsets_[j + 1] = g.in_offsets_[j] + in_count[j];
  g.in_slots_.resize(g.in_offsets_[n]);
  std::vector<std::uint32_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (std::size_t s = 0; s < g.target_.size(); ++s) {
    if (g.weight_[s] > 0.0) g.in_slots_[cursor[g.target_[s]]++] = static_cast<std::uint32_t>(s);
  }
  return g;
}

Edge PixelGraph::edge(std::size_t node, int slot) const noexcept {
  const std::size_t s = static_cast<std::size_t>(slot) * node_count() + node;
  return {target_[s], static_cast<int>(dx_[s]), static_cast<int>(dy_[s]), weight_[s]};
}

std::size_t PixelGraph::edge_count() const noexcept {
  std::size_t total = 0;
  for (auto d : degree_) total += static_cast<std::size_t>(d);
  return total;
}

void PixelGraph::write_edge_list(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < node_count(); ++i) {
    const int x = static_cast<int>(i % width_);
    const int y = static_cast<int>(i / width_);
    for (int k = 0; k < degree_[i]; ++k) {
      const Edge e = edge(i, k);
      out << x << ' ' << y << ' ' << x + e.dx << ' ' << y + e.dy << ' ' << e.weight << '\n';
    }
  }
  out.precision(old_precision);
}

double patch_distance(const GuideImage& img, Pixel i, Pixel j, int patch) {
  if (patch < 1 || patch % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "patch side must be odd and positive");
  }
  const int r = patch / 2;
  const int w = img.width();
  const int h = img.height();
  double sum = 0.0;
  for (int py = -r; py <= r; ++py) {
    const int iy = std::clamp(i.y + py, 0, h - 1);
    const int jy = std::clamp(j.y + py, 0, h - 1);
    for (int px = -r; px <= r; ++px) {
      const int ix = std::clamp(i.x + px, 0, w - 1);
      const int jx = std::clamp(j.x + px, 0, w - 1);
      for (int c = 0; c < img.channels(); ++c) {
        const double diff = img.at(ix, iy, c) - img.at(jx, jy, c);
        sum += diff * diff;
      }
    }
  }
  return sum;
}

double edge_weight(const GuideImage& img, Pixel i, Pixel j, const GraphParams& params) {
  const double pd = patch_distance(img, i, j, params.patch);
  const double ddx = i.x - j.x;
  const double ddy = i.y - j.y;
  const double spatial = ddx * ddx + ddy * ddy;
  return std::exp(-pd / (2.0 * params.sigma_int * params.sigma_int)) *
         std::exp(-spatial / (2.0 * params.sigma_spa * params.sigma_spa));
}

PixelGraph build_graph(const GuideImage& img, const GraphParams& params, int threads) {
  params.validate();
  const int w = img.width();
  const int h = img.height();
  const int half = params.window / 2;
  std::vector<std::vector<Edge>> lists(static_cast<std::size_t>(w) * h);

  parallel_blocks(static_cast<std::size_t>(h), threads, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    std::vector<Edge> candidates;
    candidates.reserve(static_cast<std::size_t>(params.window) * params.window);
    for (int x = 0; x < w; ++x) {
      candidates.clear();
      for (int oy = -half; oy <= half; ++oy) {
        for (int ox = -half; ox <= half; ++ox) {
          const int tx = x + ox;
          const int ty = y + oy;
          if ((ox == 0 && oy == 0) || tx < 0 || ty < 0 || tx >= w || ty >= h) continue;
          const double weight = edge_weight(img, {x, y}, {tx, ty}, params);
          if (weight > 0.0) {
            candidates.push_back({static_cast<std::int32_t>(ty * w + tx), ox, oy, weight});
          }
        }
      }
      const std::size_t keep = std::min(candidates.size(), static_cast<std::size_t>(params.k));
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                        candidates.end(), heavier);
      candidates.resize(keep);
      lists[static_cast<std::size_t>(y) * w + x] = candidates;
    }
  });
  return PixelGraph::from_edge_lists(w, h, params.k, lists);
}

}  // namespace graphdepth
