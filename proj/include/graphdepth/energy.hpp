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

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "graphdepth/geometry.hpp"
#include "graphdepth/graph.hpp"
#include "graphdepth/kernels.hpp"

namespace graphdepth {

enum class Regularizer { kMixedL12, kNltgv };

const char* to_string(Regularizer reg);
/// Accepts "mixed" / "mixed-l12" and "nltgv". Throws kInvalidArgument otherwise.
Regularizer parse_regularizer(std::string_view name);

/// Everything the objective needs besides the variables: the noisy input, its
/// confidence, the graph and the weights.
///
/// Invalid input pixels carry value 0 internally and must have zero confidence.
class ProblemInstance {
 public:
  /// Throws kInvalidArgument on shape mismatches, mask values outside [0, 1],
  /// positive confidence on an invalid pixel, lambda < 0, alpha <= 0 or eps <= 0.
  ProblemInstance(const InverseDepthMap& d_bar, Grid<double> mask, std::shared_ptr<const PixelGraph> graph,
                  double lambda, double alpha, double eps, Regularizer reg);
  /// Same, for inputs in arbitrary units (e.g. normalized to [0, 1], where a
  /// valid value may be 0). Valid entries must be finite.
  ProblemInstance(Grid<double> d_bar, Mask valid, Grid<double> mask, std::shared_ptr<const PixelGraph> graph,
                  double lambda, double alpha, double eps, Regularizer reg);

  int width() const noexcept { return d_bar_.width(); }
  int height() const noexcept { return d_bar_.height(); }
  std::size_t node_count() const noexcept { return d_bar_.size(); }

  const Grid<double>& d_bar() const noexcept { return d_bar_; }
  const Mask& valid() const noexcept { return valid_; }
  const Grid<double>& mask() const noexcept { return mask_; }
  const PixelGraph& graph() const noexcept { return *graph_; }
  std::shared_ptr<const PixelGraph> shared_graph() const noexcept { return graph_; }
  double lambda() const noexcept { return lambda_; }
  double alpha() const noexcept { return alpha_; }
  double eps() const noexcept { return eps_; }
  Regularizer regularizer() const noexcept { return reg_; }

  /// d_bar with invalid pixels set to 0.
  std::span<const double> target() const noexcept { return target_; }

 private:
  Grid<double> d_bar_;
  Mask valid_;
  Grid<double> mask_;
  std::shared_ptr<const PixelGraph> graph_;
  double lambda_;
  double alpha_;
  double eps_;
  Regularizer reg_;
  std::vector<double> target_;
};

/// Optimization variables: inverse depth d and slopes (ux, uy), stored as one
/// contiguous vector [d | ux | uy] of length 3 * H * W.
class State {
 public:
  State() = default;
  State(int width, int height);
  State(const Grid<double>& d, const NormalParamMap& u);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t node_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> d() noexcept { return values().subspan(0, node_count()); }
  std::span<const double> d() const noexcept { return values().subspan(0, node_count()); }
  std::span<double> ux() noexcept { return values().subspan(node_count(), node_count()); }
  std::span<const double> ux() const noexcept { return values().subspan(node_count(), node_count()); }
  std::span<double> uy() noexcept { return values().subspan(2 * node_count(), node_count()); }
  std::span<const double> uy() const noexcept { return values().subspan(2 * node_count(), node_count()); }

  Grid<double> d_grid() const;
  NormalParamMap slopes() const;
  bool all_finite() const noexcept;

  bool operator==(const State&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

/// Energy broken down by term. `smoothness` already includes alpha and
/// total = data + lambda * (fit + smoothness).
struct EnergyTerms {
  double data = 0.0;
  double fit = 0.0;
  double smoothness = 0.0;
  double total = 0.0;
};

/// Reusable energy/gradient evaluator for one problem instance.
///
/// Nodes are split into fixed blocks whose partial sums are combined in block
/// order, so the result is bit-identical for any thread count and any kernel
/// variant.
class EnergyEvaluator {
 public:
  explicit EnergyEvaluator(const ProblemInstance& prob, int threads = 1, kernels::Isa isa = kernels::active_isa());

  /// Energy at `x` (layout of State::values()). Fills `grad` when it is non-empty.
  EnergyTerms evaluate(std::span<const double> x, std::span<double> grad);
  EnergyTerms evaluate(std::span<const double> x, std::span<double> grad, Regularizer reg);

  const ProblemInstance& problem() const noexcept { return prob_; }

 private:
  const ProblemInstance& prob_;
  int threads_;
  kernels::Isa isa_;
  std::size_t blocks_;
  std::vector<double> edge_d_;
  std::vector<double> edge_ux_;
  std::vector<double> edge_uy_;
  std::vector<kernels::TermSums> reg_partial_;
  std::vector<double> data_partial_;
};

double data_term(const State& state, const ProblemInstance& prob);
/// Mixed l1,2 plane-fit term (independent of prob.regularizer()).
double planar_term(const State& state, const ProblemInstance& prob);
/// alpha * sum_i sum_j w_ij |u_j - u_i|_2 (independent of prob.regularizer()).
double normal_smoothness_term(const State& state, const ProblemInstance& prob);
/// NLTGV regularizer value, both terms, alpha included.
double nltgv_energy(const State& state, const ProblemInstance& prob);
EnergyTerms energy_terms(const State& state, const ProblemInstance& prob);
double total_energy(const State& state, const ProblemInstance& prob);
/// Gradient of total_energy, in State layout.
State gradient(const State& state, const ProblemInstance& prob);

}  // namespace graphdepth
