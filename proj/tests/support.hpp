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

// Shared fixtures and naive reference implementations for the tests. The
// references deliberately avoid the library's kernels and graph layout.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "graphdepth/energy.hpp"
#include "graphdepth/geometry.hpp"
#include "graphdepth/graph.hpp"

namespace testing {

using namespace graphdepth;

inline GuideImage random_guide(int w, int h, int channels, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(w) * h * channels);
  for (double& x : v) x = u(rng);
  return GuideImage(w, h, channels, std::move(v));
}

inline CameraIntrinsics random_camera(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> f(200.0, 2000.0), c(0.0, 640.0);
  return {f(rng), f(rng), c(rng), c(rng)};
}

/// Random camera-facing plane. zero_x / zero_y force a0 / b0 to exactly 0.
inline ScenePlane random_plane(std::mt19937_64& rng, bool zero_x = false, bool zero_y = false) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> xy(-2.0, 2.0), z(1.0, 10.0);
  for (;;) {
    Vec3 n{zero_x ? 0.0 : g(rng), zero_y ? 0.0 : g(rng), g(rng)};
    Vec3 p{xy(rng), xy(rng), z(rng)};
    // Keep planes that are not nearly edge-on to the ray through P0.
    if (std::abs(dot(n, p)) < 1e-3 * norm(n) * norm(p)) continue;
    return ScenePlane(p, n);
  }
}

/// Random energy instance: random guide graph, random input with some
/// invalid pixels, random confidence.
struct Instance {
  std::shared_ptr<const PixelGraph> graph;
  Grid<double> d_bar;
  Mask valid;
  Grid<double> mask;
};

inline Instance random_instance(int w, int h, std::mt19937_64& rng, double hole_fraction = 0.2,
                                GraphParams params = {}) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance inst;
  inst.graph = std::make_shared<const PixelGraph>(build_graph(random_guide(w, h, 3, rng), params));
  inst.d_bar = Grid<double>(w, h, 0.0);
  inst.valid = Mask(w, h, 1);
  inst.mask = Grid<double>(w, h, 0.0);
  for (std::size_t i = 0; i < inst.d_bar.size(); ++i) {
    if (u(rng) < hole_fraction) {
      inst.valid[i] = 0;
      continue;
    }
    inst.d_bar[i] = u(rng);
    inst.mask[i] = u(rng) < 0.5 ? 1.0 : u(rng);
  }
  return inst;
}

inline ProblemInstance make_problem(const Instance& inst, double lambda, double alpha, double eps, Regularizer reg) {
  return ProblemInstance(inst.d_bar, inst.valid, inst.mask, inst.graph, lambda, alpha, eps, reg);
}

inline std::vector<double> as_vector(const State& s) { return {s.values().begin(), s.values().end()}; }

inline State random_state(int w, int h, std::mt19937_64& rng, double slope_scale = 0.1) {
  std::uniform_real_distribution<double> u(0.0, 1.0), s(-slope_scale, slope_scale);
  State st(w, h);
  for (double& v : st.d()) v = u(rng);
  for (double& v : st.ux()) v = s(rng);
  for (double& v : st.uy()) v = s(rng);
  return st;
}

// ---------------------------------------------------------------- oracles

struct NaiveEdge {
  int j;
  int dx;
  int dy;
  double w;
};

/// Per-node edge lists read through PixelGraph::edge().
inline std::vector<std::vector<NaiveEdge>> edge_lists(const PixelGraph& g) {
  std::vector<std::vector<NaiveEdge>> out(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    for (int k = 0; k < g.degree(i); ++k) {
      const Edge e = g.edge(i, k);
      out[i].push_back({e.target, e.dx, e.dy, e.weight});
    }
  }
  return out;
}

template <class R>
R smooth_abs(R x, R eps) {
  return std::sqrt(x * x + eps * eps) - eps;
}

/// Term-by-term energy with plain loops, in precision R.
template <class R>
struct NaiveTerms {
  R data = 0, fit = 0, smooth = 0;
};

template <class R>
NaiveTerms<R> naive_terms(const ProblemInstance& p, const std::vector<double>& x, Regularizer reg) {
  const std::size_t n = p.node_count();
  const auto lists = edge_lists(p.graph());
  const R eps = p.eps();
  NaiveTerms<R> t;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.valid()[i]) t.data += R(p.mask()[i]) * smooth_abs<R>(R(x[i]) - R(p.d_bar()[i]), eps);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const R di = x[i], uxi = x[n + i], uyi = x[2 * n + i];
    R sq = 0;
    for (const NaiveEdge& e : lists[i]) {
      const R r = R(x[e.j]) - di - (uxi * e.dx + uyi * e.dy);
      const R wr = R(e.w) * r;
      const R ex = R(x[n + e.j]) - uxi;
      const R ey = R(x[2 * n + e.j]) - uyi;
      if (reg == Regularizer::kMixedL12) {
        sq += wr * wr;
        t.smooth += R(e.w) * smooth_abs<R>(std::sqrt(ex * ex + ey * ey), eps);
      } else {
        t.fit += smooth_abs<R>(wr, eps);
        t.smooth += R(e.w) * (smooth_abs<R>(ex, eps) + smooth_abs<R>(ey, eps));
      }
    }
    if (reg == Regularizer::kMixedL12) t.fit += std::sqrt(sq + eps * eps) - eps;
  }
  return t;
}

template <class R>
R naive_total(const ProblemInstance& p, const std::vector<double>& x, Regularizer reg) {
  const NaiveTerms<R> t = naive_terms<R>(p, x, reg);
  return t.data + R(p.lambda()) * (t.fit + R(p.alpha()) * t.smooth);
}

/// Exhaustive-window graph oracle: weight of every candidate j of node (x, y)
/// computed straight from the formula.
inline double naive_patch_distance(const GuideImage& img, int ix, int iy, int jx, int jy, int patch) {
  const int r = patch / 2;
  double s = 0.0;
  auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
  for (int oy = -r; oy <= r; ++oy) {
    for (int ox = -r; ox <= r; ++ox) {
      for (int c = 0; c < img.channels(); ++c) {
        const double a = img.at(clampi(ix + ox, img.width() - 1), clampi(iy + oy, img.height() - 1), c);
        const double b = img.at(clampi(jx + ox, img.width() - 1), clampi(jy + oy, img.height() - 1), c);
        s += (a - b) * (a - b);
      }
    }
  }
  return s;
}

inline double naive_weight(const GuideImage& img, int ix, int iy, int jx, int jy, const GraphParams& p) {
  const double q = naive_patch_distance(img, ix, iy, jx, jy, p.patch);
  const double s = double((ix - jx) * (ix - jx) + (iy - jy) * (iy - jy));
  return std::exp(-q / (2.0 * p.sigma_int * p.sigma_int)) * std::exp(-s / (2.0 * p.sigma_spa * p.sigma_spa));
}

}  // namespace testing
