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

// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include "node_math.hpp"
#include "variants.hpp"

namespace graphdepth::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

inline __m128i load_index(const std::int32_t* p) { return _mm_loadu_si128(reinterpret_cast<const __m128i*>(p)); }

inline __m256d gather(const double* base, __m128i index) { return _mm256_i32gather_pd(base, index, 8); }

// Adds the four lanes to `sum` in lane order, matching the scalar node loop.
inline void accumulate_lanes(double& sum, __m256d v) {
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, v);
  for (double lane : lanes) sum += lane;
}

}  // namespace

TermSums mixed_l12(const GraphArrays& g, const FieldArrays& f, double eps, std::size_t begin, std::size_t end,
                   const GradientSinks* out) {
  TermSums sums;
  const std::size_t n = g.nodes;
  const __m256d eps_v = _mm256_set1_pd(eps);
  const __m256d eps2_v = _mm256_set1_pd(eps * eps);
  std::size_t i = begin;
  for (; i + kLanes <= end; i += kLanes) {
    const __m256d di = _mm256_loadu_pd(f.d + i);
    const __m256d uxi = _mm256_loadu_pd(f.ux + i);
    const __m256d uyi = _mm256_loadu_pd(f.uy + i);
    __m256d acc = _mm256_setzero_pd();
    __m256d smooth = _mm256_setzero_pd();
    __m256d gux = _mm256_setzero_pd();
    __m256d guy = _mm256_setzero_pd();
    for (int k = 0; k < g.slots; ++k) {
      const std::size_t s = static_cast<std::size_t>(k) * n + i;
      const __m128i idx = load_index(g.target + s);
      const __m256d w = _mm256_loadu_pd(g.weight + s);
      const __m256d dx = _mm256_loadu_pd(g.dx + s);
      const __m256d dy = _mm256_loadu_pd(g.dy + s);
      const __m256d r = _mm256_sub_pd(_mm256_sub_pd(_mm256_sub_pd(gather(f.d, idx), di), _mm256_mul_pd(uxi, dx)),
                                      _mm256_mul_pd(uyi, dy));
      const __m256d wr = _mm256_mul_pd(w, r);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(wr, wr));
      const __m256d ex = _mm256_sub_pd(gather(f.ux, idx), uxi);
      const __m256d ey = _mm256_sub_pd(gather(f.uy, idx), uyi);
      const __m256d en =
          _mm256_sqrt_pd(_mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey)), eps2_v));
      smooth = _mm256_add_pd(smooth, _mm256_mul_pd(w, _mm256_sub_pd(en, eps_v)));
      if (out) {
        _mm256_storeu_pd(out->edge_d + s, _mm256_mul_pd(w, wr));
        const __m256d q = _mm256_mul_pd(_mm256_div_pd(w, en), _mm256_set1_pd(out->smooth_scale));
        const __m256d gx = _mm256_mul_pd(q, ex);
        const __m256d gy = _mm256_mul_pd(q, ey);
        gux = _mm256_sub_pd(gux, gx);
        guy = _mm256_sub_pd(guy, gy);
        _mm256_storeu_pd(out->edge_ux + s, gx);
        _mm256_storeu_pd(out->edge_uy + s, gy);
      }
    }
    const __m256d fit_norm = _mm256_sqrt_pd(_mm256_add_pd(acc, eps2_v));
    if (out) {
      const __m256d fit_scale = _mm256_set1_pd(out->fit_scale);
      __m256d gd = _mm256_setzero_pd();
      __m256d gfx = _mm256_setzero_pd();
      __m256d gfy = _mm256_setzero_pd();
      for (int k = 0; k < g.slots; ++k) {
        const std::size_t s = static_cast<std::size_t>(k) * n + i;
        const __m256d c = _mm256_mul_pd(_mm256_div_pd(_mm256_loadu_pd(out->edge_d + s), fit_norm), fit_scale);
        _mm256_storeu_pd(out->edge_d + s, c);
        gd = _mm256_sub_pd(gd, c);
        gfx = _mm256_sub_pd(gfx, _mm256_mul_pd(c, _mm256_loadu_pd(g.dx + s)));
        gfy = _mm256_sub_pd(gfy, _mm256_mul_pd(c, _mm256_loadu_pd(g.dy + s)));
      }
      _mm256_storeu_pd(out->d + i, gd);
      _mm256_storeu_pd(out->ux + i, _mm256_add_pd(gux, gfx));
      _mm256_storeu_pd(out->uy + i, _mm256_add_pd(guy, gfy));
    }
    // Interleave fit and smooth per lane exactly as the scalar loop does.
    alignas(32) double fit_lanes[kLanes];
    alignas(32) double smooth_lanes[kLanes];
    _mm256_store_pd(fit_lanes, _mm256_sub_pd(fit_norm, eps_v));
    _mm256_store_pd(smooth_lanes, smooth);
    for (std::size_t l = 0; l < kLanes; ++l) {
      sums.fit += fit_lanes[l];
      sums.smooth += smooth_lanes[l];
    }
  }
  for (; i < end; ++i) {
    const NodeTerms t = mixed_node(g, f, eps, i, out);
    sums.fit += t.fit;
    sums.smooth += t.smooth;
  }
  return sums;
}

TermSums nltgv(const GraphArrays& g, const FieldArrays& f, double eps, std::size_t begin, std::size_t end,
               const GradientSinks* out) {
  TermSums sums;
  const std::size_t n = g.nodes;
  const __m256d eps_v = _mm256_set1_pd(eps);
  const __m256d eps2_v = _mm256_set1_pd(eps * eps);
  std::size_t i = begin;
  for (; i + kLanes <= end; i += kLanes) {
    const __m256d di = _mm256_loadu_pd(f.d + i);
    const __m256d uxi = _mm256_loadu_pd(f.ux + i);
    const __m256d uyi = _mm256_loadu_pd(f.uy + i);
    __m256d fit = _mm256_setzero_pd();
    __m256d smooth = _mm256_setzero_pd();
    __m256d gd = _mm256_setzero_pd();
    __m256d gux = _mm256_setzero_pd();
    __m256d guy = _mm256_setzero_pd();
    for (int k = 0; k < g.slots; ++k) {
      const std::size_t s = static_cast<std::size_t>(k) * n + i;
      const __m128i idx = load_index(g.target + s);
      const __m256d w = _mm256_loadu_pd(g.weight + s);
      const __m256d dx = _mm256_loadu_pd(g.dx + s);
      const __m256d dy = _mm256_loadu_pd(g.dy + s);
      const __m256d r = _mm256_sub_pd(_mm256_sub_pd(_mm256_sub_pd(gather(f.d, idx), di), _mm256_mul_pd(uxi, dx)),
                                      _mm256_mul_pd(uyi, dy));
      const __m256d wr = _mm256_mul_pd(w, r);
      const __m256d rn = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(wr, wr), eps2_v));
      fit = _mm256_add_pd(fit, _mm256_sub_pd(rn, eps_v));
      const __m256d ex = _mm256_sub_pd(gather(f.ux, idx), uxi);
      const __m256d ey = _mm256_sub_pd(gather(f.uy, idx), uyi);
      const __m256d xn = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(ex, ex), eps2_v));
      const __m256d yn = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(ey, ey), eps2_v));
      smooth = _mm256_add_pd(
          smooth, _mm256_mul_pd(w, _mm256_add_pd(_mm256_sub_pd(xn, eps_v), _mm256_sub_pd(yn, eps_v))));
      if (out) {
        const __m256d c =
            _mm256_mul_pd(_mm256_div_pd(_mm256_mul_pd(w, wr), rn), _mm256_set1_pd(out->fit_scale));
        _mm256_storeu_pd(out->edge_d + s, c);
        gd = _mm256_sub_pd(gd, c);
        gux = _mm256_sub_pd(gux, _mm256_mul_pd(c, dx));
        guy = _mm256_sub_pd(guy, _mm256_mul_pd(c, dy));
        const __m256d ss = _mm256_set1_pd(out->smooth_scale);
        const __m256d gx = _mm256_mul_pd(_mm256_div_pd(_mm256_mul_pd(w, ex), xn), ss);
        const __m256d gy = _mm256_mul_pd(_mm256_div_pd(_mm256_mul_pd(w, ey), yn), ss);
        gux = _mm256_sub_pd(gux, gx);
        guy = _mm256_sub_pd(guy, gy);
        _mm256_storeu_pd(out->edge_ux + s, gx);
        _mm256_storeu_pd(out->edge_uy + s, gy);
      }
    }
    if (out) {
      _mm256_storeu_pd(out->d + i, gd);
      _mm256_storeu_pd(out->ux + i, gux);
      _mm256_storeu_pd(out->uy + i, guy);
    }
    alignas(32) double fit_lanes[kLanes];
    alignas(32) double smooth_lanes[kLanes];
    _mm256_store_pd(fit_lanes, fit);
    _mm256_store_pd(smooth_lanes, smooth);
    for (std::size_t l = 0; l < kLanes; ++l) {
      sums.fit += fit_lanes[l];
      sums.smooth += smooth_lanes[l];
    }
  }
  for (; i < end; ++i) {
    const NodeTerms t = nltgv_node(g, f, eps, i, out);
    sums.fit += t.fit;
    sums.smooth += t.smooth;
  }
  return sums;
}

double data_term(const double* d, const double* dbar, const double* mask, double eps, std::size_t begin,
                 std::size_t end, double* grad_d, double scale) {
  double sum = 0.0;
  const __m256d eps_v = _mm256_set1_pd(eps);
  const __m256d eps2_v = _mm256_set1_pd(eps * eps);
  const __m256d scale_v = _mm256_set1_pd(scale);
  std::size_t i = begin;
  for (; i + kLanes <= end; i += kLanes) {
    const __m256d m = _mm256_loadu_pd(mask + i);
    const __m256d x = _mm256_sub_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(dbar + i));
    const __m256d s = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), eps2_v));
    if (grad_d) {
      const __m256d g = _mm256_mul_pd(_mm256_div_pd(_mm256_mul_pd(m, x), s), scale_v);
      _mm256_storeu_pd(grad_d + i, _mm256_add_pd(_mm256_loadu_pd(grad_d + i), g));
    }
    accumulate_lanes(sum, _mm256_mul_pd(m, _mm256_sub_pd(s, eps_v)));
  }
  for (; i < end; ++i) sum += data_node(d, dbar, mask, eps, i, grad_d, scale);
  return sum;
}

void adam_update(double* x, double* m, double* v, const double* g, std::size_t n, const AdamStep& p) {
  const __m256d beta1 = _mm256_set1_pd(p.beta1);
  const __m256d beta2 = _mm256_set1_pd(p.beta2);
  const __m256d one_minus_beta1 = _mm256_set1_pd(1.0 - p.beta1);
  const __m256d one_minus_beta2 = _mm256_set1_pd(1.0 - p.beta2);
  const __m256d bias1 = _mm256_set1_pd(p.bias1);
  const __m256d bias2 = _mm256_set1_pd(p.bias2);
  const __m256d step = _mm256_set1_pd(p.step);
  const __m256d eps = _mm256_set1_pd(p.eps);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(beta1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(one_minus_beta1, gi));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(beta2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(one_minus_beta2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(_mm256_div_pd(vi, bias2)), eps);
    const __m256d delta = _mm256_div_pd(_mm256_mul_pd(step, _mm256_div_pd(mi, bias1)), denom);
    _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), delta));
  }
  for (; i < n; ++i) adam_element(x, m, v, g, i, p);
}

}  // namespace graphdepth::kernels::avx2
