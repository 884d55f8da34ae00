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

// Per-node scalar kernels shared by every ISA variant. Everything here has
// internal linkage: each translation unit gets its own copy compiled with its
// own target flags, so the AVX2 unit never leaks AVX2 code into the scalar path.

#include <cmath>

#include "graphdepth/kernels.hpp"

namespace graphdepth::kernels {
namespace {

struct NodeTerms {
  double fit;
  double smooth;
};

inline NodeTerms mixed_node(const GraphArrays& g, const FieldArrays& f, double eps, std::size_t i,
                            const GradientSinks* out) {
  const std::size_t n = g.nodes;
  const double eps2 = eps * eps;
  const double di = f.d[i];
  const double uxi = f.ux[i];
  const double uyi = f.uy[i];
  double acc = 0.0;
  double smooth = 0.0;
  double gux = 0.0;
  double guy = 0.0;
  for (int k = 0; k < g.slots; ++k) {
    const std::size_t s = static_cast<std::size_t>(k) * n + i;
    const std::size_t t = static_cast<std::size_t>(g.target[s]);
    const double w = g.weight[s];
    const double r = f.d[t] - di - uxi * g.dx[s] - uyi * g.dy[s];
    const double wr = w * r;
    acc += wr * wr;
    const double ex = f.ux[t] - uxi;
    const double ey = f.uy[t] - uyi;
    const double en = std::sqrt(ex * ex + ey * ey + eps2);
    smooth += w * (en - eps);
    if (out) {
      out->edge_d[s] = w * wr;
      const double q = (w / en) * out->smooth_scale;
      const double gx = q * ex;
      const double gy = q * ey;
      gux -= gx;
      guy -= gy;
      out->edge_ux[s] = gx;
      out->edge_uy[s] = gy;
    }
  }
  const double fit_norm = std::sqrt(acc + eps2);
  if (out) {
    double gd = 0.0;
    double gfx = 0.0;
    double gfy = 0.0;
    for (int k = 0; k < g.slots; ++k) {
      const std::size_t s = static_cast<std::size_t>(k) * n + i;
      const double c = (out->edge_d[s] / fit_norm) * out->fit_scale;
      out->edge_d[s] = c;
      gd -= c;
      gfx -= c * g.dx[s];
      gfy -= c * g.dy[s];
    }
    out->d[i] = gd;
    out->ux[i] = gux + gfx;
    out->uy[i] = guy + gfy;
  }
  return {fit_norm - eps, smooth};
}

inline NodeTerms nltgv_node(const GraphArrays& g, const FieldArrays& f, double eps, std::size_t i,
                            const GradientSinks* out) {
  const std::size_t n = g.nodes;
  const double eps2 = eps * eps;
  const double di = f.d[i];
  const double uxi = f.ux[i];
  const double uyi = f.uy[i];
  double fit = 0.0;
  double smooth = 0.0;
  double gd = 0.0;
  double gux = 0.0;
  double guy = 0.0;
  for (int k = 0; k < g.slots; ++k) {
    const std::size_t s = static_cast<std::size_t>(k) * n + i;
    const std::size_t t = static_cast<std::size_t>(g.target[s]);
    const double w = g.weight[s];
    const double r = f.d[t] - di - uxi * g.dx[s] - uyi * g.dy[s];
    const double wr = w * r;
    const double rn = std::sqrt(wr * wr + eps2);
    fit += rn - eps;
    const double ex = f.ux[t] - uxi;
    const double ey = f.uy[t] - uyi;
    const double xn = std::sqrt(ex * ex + eps2);
    const double yn = std::sqrt(ey * ey + eps2);
    smooth += w * ((xn - eps) + (yn - eps));
    if (out) {
      const double c = ((w * wr) / rn) * out->fit_scale;
      out->edge_d[s] = c;
      gd -= c;
      gux -= c * g.dx[s];
      guy -= c * g.dy[s];
      const double gx = ((w * ex) / xn) * out->smooth_scale;
      const double gy = ((w * ey) / yn) * out->smooth_scale;
      gux -= gx;
      guy -= gy;
      out->edge_ux[s] = gx;
      out->edge_uy[s] = gy;
    }
  }
  if (out) {
    out->d[i] = gd;
    out->ux[i] = gux;
    out->uy[i] = guy;
  }
  return {fit, smooth};
}

inline double data_node(const double* d, const double* dbar, const double* mask, double eps, std::size_t i,
                        double* grad_d, double scale) {
  const double x = d[i] - dbar[i];
  const double s = std::sqrt(x * x + eps * eps);
  if (grad_d) grad_d[i] += ((mask[i] * x) / s) * scale;
  return mask[i] * (s - eps);
}

inline void adam_element(double* x, double* m, double* v, const double* g, std::size_t i, const AdamStep& p) {
  const double gi = g[i];
  const double mi = p.beta1 * m[i] + (1.0 - p.beta1) * gi;
  const double vi = p.beta2 * v[i] + (1.0 - p.beta2) * (gi * gi);
  m[i] = mi;
  v[i] = vi;
  const double denom = std::sqrt(vi / p.bias2) + p.eps;
  x[i] = x[i] - (p.step * (mi / p.bias1)) / denom;
}

}  // namespace
}  // namespace graphdepth::kernels
