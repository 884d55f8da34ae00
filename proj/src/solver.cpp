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

#include "graphdepth/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "graphdepth/parallel.hpp"

namespace graphdepth {

namespace {

constexpr std::size_t kAdamBlock = 4096;

double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

int pow_int(int base, int exp) {
  int out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

void AdamConfig::validate() const {
  if (!(step > 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(adam_eps > 0.0) ||
      !(final_step_ratio > 0.0 && final_step_ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need step > 0, 0 <= beta1, beta2 < 1, adam_eps > 0 and final_step_ratio in (0, 1]");
  }
  if (iters_per_scale < 0 || stall_window < 1 || min_iters < 0 || !(tol >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need iters_per_scale >= 0, stall_window >= 1, min_iters >= 0 and tol >= 0");
  }
}

void PyramidConfig::validate() const {
  if (scales < 1 || factor < 2) throw Error(ErrorCode::kInvalidArgument, "need scales >= 1 and factor >= 2");
  if (lambda.size() != static_cast<std::size_t>(scales) || alpha.size() != static_cast<std::size_t>(scales)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda and alpha lists need one entry per scale");
  }
}

AdamResult adam_minimize(const ProblemInstance& prob, const State& init, const AdamConfig& cfg, int threads) {
  cfg.validate();
  if (init.width() != prob.width() || init.height() != prob.height()) {
    throw Error(ErrorCode::kInvalidArgument, "initial state does not match the problem size");
  }
  if (!init.all_finite()) throw Error(ErrorCode::kInvalidArgument, "initial state must be finite");

  threads = resolve_threads(threads);
  EnergyEvaluator eval(prob, threads);
  const kernels::Isa isa = kernels::active_isa();
  State x = init;
  const std::size_t n = x.values().size();
  std::vector<double> grad(n), m(n, 0.0), v(n, 0.0);
  const std::size_t blocks = (n + kAdamBlock - 1) / kAdamBlock;

  AdamResult out;
  out.state = init;
  std::vector<double> best_history;
  double b1t = 1.0;
  double b2t = 1.0;
  for (int t = 0;; ++t) {
    const double e = eval.evaluate(x.values(), grad).total;
    if (!std::isfinite(e)) {
      throw Error(ErrorCode::kNonFiniteEnergy, "energy became non-finite at iteration " + std::to_string(t));
    }
    out.trace.push_back(e);
    if (t == 0) {
      out.initial_energy = e;
      out.best_energy = e;
    } else if (e < out.best_energy) {
      out.best_energy = e;
      out.best_iteration = t;
      out.state = x;
    }
    best_history.push_back(out.best_energy);
    if (t == cfg.iters_per_scale) break;
    if (t >= cfg.stall_window && t >= cfg.min_iters) {
      const double before = best_history[t - cfg.stall_window];
      if (before - out.best_energy <= cfg.tol * std::abs(before)) break;
    }

    b1t *= cfg.beta1;
    b2t *= cfg.beta2;
    const double step =
        cfg.step * std::pow(cfg.final_step_ratio, static_cast<double>(t) / std::max(1, cfg.iters_per_scale));
    const kernels::AdamStep p{step, cfg.beta1, cfg.beta2, cfg.adam_eps, 1.0 - b1t, 1.0 - b2t};
    double* xs = x.values().data();
    parallel_blocks(blocks, threads, [&](std::size_t b) {
      const std::size_t begin = b * kAdamBlock;
      const std::size_t len = std::min(n, begin + kAdamBlock) - begin;
      kernels::adam_update(isa, xs + begin, m.data() + begin, v.data() + begin, grad.data() + begin, len, p);
    });
  }
  return out;
}

GuideImage downsample(const GuideImage& in, int factor) {
  if (factor < 1) throw Error(ErrorCode::kInvalidArgument, "downsampling factor must be >= 1");
  const int w = in.width() / factor;
  const int h = in.height() / factor;
  const int c = in.channels();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(w) * h * c);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < c; ++k) values.push_back(in.at(factor * x, factor * y, k));
    }
  }
  return GuideImage(w, h, c, std::move(values));
}

State upsample_and_scale(const State& coarse, int factor, int width, int height) {
  if (factor < 1) throw Error(ErrorCode::kInvalidArgument, "upsampling factor must be >= 1");
  if (coarse.node_count() == 0 && width * height > 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot upsample an empty state");
  }
  State fine(width, height);
  const auto cd = coarse.d();
  const auto cux = coarse.ux();
  const auto cuy = coarse.uy();
  auto fd = fine.d();
  auto fux = fine.ux();
  auto fuy = fine.uy();
  const double inv = 1.0 / factor;
  for (int y = 0; y < height; ++y) {
    const int cy = std::min(y / factor, coarse.height() - 1);
    for (int x = 0; x < width; ++x) {
      const int cx = std::min(x / factor, coarse.width() - 1);
      const std::size_t ci = static_cast<std::size_t>(cy) * coarse.width() + cx;
      const std::size_t fi = static_cast<std::size_t>(y) * width + x;
      fd[fi] = cd[ci];
      fux[fi] = cux[ci] * inv;
      fuy[fi] = cuy[ci] * inv;
    }
  }
  return fine;
}

RefineResult refine(const InverseDepthMap& d_bar, const Grid<double>& mask, const GuideImage& guide,
                    const RefineConfig& cfg) {
  cfg.graph.validate();
  cfg.pyramid.validate();
  cfg.adam.validate();
  if (!d_bar.values().same_shape(mask) || guide.width() != d_bar.width() || guide.height() != d_bar.height()) {
    throw Error(ErrorCode::kInvalidArgument, "input, confidence and guide must share dimensions");
  }
  const int width = d_bar.width();
  const int height = d_bar.height();
  const PyramidConfig& pyr = cfg.pyramid;

  std::vector<double> valid_values;
  bool any_confidence = false;
  for (std::size_t i = 0; i < d_bar.size(); ++i) {
    if (!d_bar.valid()[i]) continue;
    valid_values.push_back(d_bar.values()[i]);
    any_confidence = any_confidence || mask[i] > 0.0;
  }
  const bool no_regularizer = std::all_of(pyr.lambda.begin(), pyr.lambda.end(), [](double l) { return l == 0.0; });
  if (valid_values.empty() || (!any_confidence && no_regularizer)) {
    throw Error(ErrorCode::kEmptyConfidence, "input carries no usable information");
  }

  // Affine map of the valid range onto [0, 1].
  const auto [lo_it, hi_it] = std::minmax_element(valid_values.begin(), valid_values.end());
  const double lo = *lo_it;
  const double range = *hi_it > lo ? *hi_it - lo : 1.0;
  Grid<double> normalized(width, height, 0.0);
  Grid<double> masked(width, height, 0.0);
  for (std::size_t i = 0; i < d_bar.size(); ++i) {
    if (!d_bar.valid()[i]) continue;
    normalized[i] = (d_bar.values()[i] - lo) / range;
    masked[i] = mask[i];
  }
  for (double& v : valid_values) v = (v - lo) / range;
  const double fill = median_of(std::move(valid_values));

  auto naive_state = [&](const Grid<double>& dn, const Mask& valid) {
    State s(dn.width(), dn.height());
    auto d = s.d();
    for (std::size_t i = 0; i < dn.size(); ++i) d[i] = valid[i] ? dn[i] : fill;
    return s;
  };

  RefineResult result;
  State current;
  for (int level = pyr.scales - 1; level >= 0; --level) {
    const int step = pow_int(pyr.factor, level);
    const int sw = width / step;
    const int sh = height / step;
    if (sw < 1 || sh < 1) {
      throw Error(ErrorCode::kInvalidArgument, "too many scales for a " + std::to_string(width) + "x" +
                                                   std::to_string(height) + " input");
    }
    const std::size_t idx = static_cast<std::size_t>(pyr.scales - 1 - level);
    Grid<double> dn = downsample(normalized, step);
    Mask valid = downsample(d_bar.valid(), step);
    Grid<double> mn = downsample(masked, step);
    auto graph = std::make_shared<const PixelGraph>(build_graph(downsample(guide, step), cfg.graph, cfg.threads));
    const ProblemInstance prob(dn, valid, std::move(mn), std::move(graph), pyr.lambda[idx], pyr.alpha[idx], cfg.eps,
                               cfg.regularizer);

    State init = naive_state(dn, valid);
    if (level == 0) result.naive_energy = total_energy(init, prob);
    if (level < pyr.scales - 1) {
      State upsampled = upsample_and_scale(current, pyr.factor, sw, sh);
      // The coarse solution is only a warm start; keep the naive start when
      // it is already better so the result never loses to it.
      const double e_naive = level == 0 ? result.naive_energy : total_energy(init, prob);
      if (total_energy(upsampled, prob) <= e_naive) init = std::move(upsampled);
    }
    AdamResult solved = adam_minimize(prob, init, cfg.adam, cfg.threads);
    result.traces.push_back({level, sw, sh, std::move(solved.trace)});
    current = std::move(solved.state);
    if (level == 0) result.final_energy = solved.best_energy;
  }

  Grid<double> out(width, height);
  NormalParamMap u(width, height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = lo + range * current.d()[i];
    u.ux[i] = range * current.ux()[i];
    u.uy[i] = range * current.uy()[i];
  }
  result.d = InverseDepthMap::from_raw(std::move(out));
  result.u = std::move(u);
  return result;
}

PyramidConfig preset(std::string_view name, Regularizer reg) {
  const bool nltgv = reg == Regularizer::kNltgv;
  PyramidConfig p;
  p.scales = 2;
  p.factor = 2;
  if (name == "middlebury-sgm") {
    p.lambda = nltgv ? std::vector{7.5, 7.5} : std::vector{15.0, 25.0};
    p.alpha = nltgv ? std::vector{50.0, 50.0} : std::vector{3.5, 3.5};
  } else if (name == "middlebury-bm") {
    p.lambda = nltgv ? std::vector{7.5, 7.5} : std::vector{10.0, 20.0};
    p.alpha = nltgv ? std::vector{50.0, 50.0} : std::vector{3.5, 3.5};
  } else if (name == "kitti") {
    p.lambda = nltgv ? std::vector{7.5, 7.5} : std::vector{10.0, 20.0};
    p.alpha = {15.0, 15.0};
  } else if (name == "eth3d") {
    p.scales = 4;
    p.lambda.assign(4, 7.5);
    p.alpha.assign(4, 7.5);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown preset '" + std::string(name) + "'");
  }
  return p;
}

std::vector<std::string> preset_names() { return {"middlebury-sgm", "middlebury-bm", "kitti", "eth3d"}; }

}  // namespace graphdepth
