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

#include "graphdepth/energy.hpp"

#include <algorithm>
#include <cmath>

#include "graphdepth/parallel.hpp"

namespace graphdepth {

namespace {

constexpr std::size_t kBlockNodes = 1024;

}  // namespace

const char* to_string(Regularizer reg) { return reg == Regularizer::kMixedL12 ? "mixed" : "nltgv"; }

Regularizer parse_regularizer(std::string_view name) {
  if (name == "mixed" || name == "mixed-l12" || name == "mixed_l12") return Regularizer::kMixedL12;
  if (name == "nltgv") return Regularizer::kNltgv;
  throw Error(ErrorCode::kInvalidArgument, "unknown regularizer '" + std::string(name) + "'");
}

ProblemInstance::ProblemInstance(const InverseDepthMap& d_bar, Grid<double> mask,
                                 std::shared_ptr<const PixelGraph> graph, double lambda, double alpha, double eps,
                                 Regularizer reg)
    : ProblemInstance(d_bar.values(), d_bar.valid(), std::move(mask), std::move(graph), lambda, alpha, eps, reg) {}

ProblemInstance::ProblemInstance(Grid<double> d_bar, Mask valid, Grid<double> mask,
                                 std::shared_ptr<const PixelGraph> graph, double lambda, double alpha, double eps,
                                 Regularizer reg)
    : d_bar_(std::move(d_bar)),
      valid_(std::move(valid)),
      mask_(std::move(mask)),
      graph_(std::move(graph)),
      lambda_(lambda),
      alpha_(alpha),
      eps_(eps),
      reg_(reg) {
  if (!graph_) throw Error(ErrorCode::kInvalidArgument, "problem needs a graph");
  if (!d_bar_.same_shape(valid_) || !d_bar_.same_shape(mask_) || graph_->width() != d_bar_.width() ||
      graph_->height() != d_bar_.height()) {
    throw Error(ErrorCode::kInvalidArgument, "input, confidence and graph must share dimensions");
  }
  if (!(lambda_ >= 0.0) || !(alpha_ > 0.0) || !(eps_ > 0.0) || !std::isfinite(lambda_) || !std::isfinite(alpha_)) {
    throw Error(ErrorCode::kInvalidArgument, "need lambda >= 0, alpha > 0 and eps > 0");
  }
  target_.assign(d_bar_.size(), 0.0);
  for (std::size_t i = 0; i < d_bar_.size(); ++i) {
    const double m = mask_[i];
    if (!(m >= 0.0 && m <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "confidence values must lie in [0, 1]");
    }
    if (valid_[i]) {
      if (!std::isfinite(d_bar_[i])) throw Error(ErrorCode::kInvalidArgument, "valid input must be finite");
      target_[i] = d_bar_[i];
    } else if (m != 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "invalid input pixels must have zero confidence");
    }
  }
}

State::State(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error(ErrorCode::kInvalidArgument, "state dimensions must be non-negative");
  values_.assign(3 * node_count(), 0.0);
}

State::State(const Grid<double>& d, const NormalParamMap& u) : State(d.width(), d.height()) {
  if (!d.same_shape(u.ux) || !d.same_shape(u.uy)) {
    throw Error(ErrorCode::kInvalidArgument, "depth and slope grids differ in shape");
  }
  std::copy(d.values().begin(), d.values().end(), this->d().begin());
  std::copy(u.ux.values().begin(), u.ux.values().end(), ux().begin());
  std::copy(u.uy.values().begin(), u.uy.values().end(), uy().begin());
}

Grid<double> State::d_grid() const {
  return Grid<double>(width_, height_, std::vector<double>(d().begin(), d().end()));
}

NormalParamMap State::slopes() const {
  NormalParamMap u;
  u.ux = Grid<double>(width_, height_, std::vector<double>(ux().begin(), ux().end()));
  u.uy = Grid<double>(width_, height_, std::vector<double>(uy().begin(), uy().end()));
  return u;
}

bool State::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

EnergyEvaluator::EnergyEvaluator(const ProblemInstance& prob, int threads, kernels::Isa isa)
    : prob_(prob), threads_(threads), isa_(isa) {
  const std::size_t n = prob.node_count();
  blocks_ = (n + kBlockNodes - 1) / kBlockNodes;
  const std::size_t slots = n * static_cast<std::size_t>(prob.graph().max_degree());
  edge_d_.assign(slots, 0.0);
  edge_ux_.assign(slots, 0.0);
  edge_uy_.assign(slots, 0.0);
  reg_partial_.assign(blocks_, {});
  data_partial_.assign(blocks_, 0.0);
}

EnergyTerms EnergyEvaluator::evaluate(std::span<const double> x, std::span<double> grad) {
  return evaluate(x, grad, prob_.regularizer());
}

EnergyTerms EnergyEvaluator::evaluate(std::span<const double> x, std::span<double> grad, Regularizer reg) {
  const std::size_t n = prob_.node_count();
  if (x.size() != 3 * n || (!grad.empty() && grad.size() != 3 * n)) {
    throw Error(ErrorCode::kInvalidArgument, "state vector has the wrong length");
  }
  const PixelGraph& graph = prob_.graph();
  const kernels::GraphArrays ga{n,
                                graph.max_degree(),
                                graph.targets().data(),
                                graph.weights().data(),
                                graph.offsets_x().data(),
                                graph.offsets_y().data()};
  const kernels::FieldArrays field{x.data(), x.data() + n, x.data() + 2 * n};
  const bool want_grad = !grad.empty();
  kernels::GradientSinks sinks;
  if (want_grad) {
    sinks = {grad.data(),    grad.data() + n, grad.data() + 2 * n,     edge_d_.data(),
             edge_ux_.data(), edge_uy_.data(), prob_.lambda(), prob_.lambda() * prob_.alpha()};
  }
  const double eps = prob_.eps();
  auto block_range = [n](std::size_t b) {
    return std::pair{b * kBlockNodes, std::min(n, (b + 1) * kBlockNodes)};
  };

  parallel_blocks(blocks_, threads_, [&](std::size_t b) {
    const auto [begin, end] = block_range(b);
    const kernels::GradientSinks* out = want_grad ? &sinks : nullptr;
    reg_partial_[b] = reg == Regularizer::kMixedL12 ? kernels::mixed_l12(isa_, ga, field, eps, begin, end, out)
                                                    : kernels::nltgv(isa_, ga, field, eps, begin, end, out);
  });
  parallel_blocks(blocks_, threads_, [&](std::size_t b) {
    const auto [begin, end] = block_range(b);
    double* grad_d = nullptr;
    if (want_grad) {
      kernels::gather_incoming(graph.incoming_offsets().data(), graph.incoming_slots().data(), edge_d_.data(),
                               edge_ux_.data(), edge_uy_.data(), begin, end, sinks.d, sinks.ux, sinks.uy);
      grad_d = sinks.d;
    }
    data_partial_[b] = kernels::data_term(isa_, x.data(), prob_.target().data(), prob_.mask().data(), eps, begin,
                                          end, grad_d, 1.0);
  });

  EnergyTerms terms;
  double smooth = 0.0;
  for (std::size_t b = 0; b < blocks_; ++b) {
    terms.data += data_partial_[b];
    terms.fit += reg_partial_[b].fit;
    smooth += reg_partial_[b].smooth;
  }
  terms.smoothness = prob_.alpha() * smooth;
  terms.total = terms.data + prob_.lambda() * (terms.fit + terms.smoothness);
  return terms;
}

namespace {

EnergyTerms terms_for(const State& state, const ProblemInstance& prob, Regularizer reg) {
  EnergyEvaluator eval(prob);
  return eval.evaluate(state.values(), {}, reg);
}

}  // namespace

double data_term(const State& state, const ProblemInstance& prob) { return terms_for(state, prob, prob.regularizer()).data; }

double planar_term(const State& state, const ProblemInstance& prob) {
  return terms_for(state, prob, Regularizer::kMixedL12).fit;
}

double normal_smoothness_term(const State& state, const ProblemInstance& prob) {
  return terms_for(state, prob, Regularizer::kMixedL12).smoothness;
}

double nltgv_energy(const State& state, const ProblemInstance& prob) {
  const EnergyTerms t = terms_for(state, prob, Regularizer::kNltgv);
  return t.fit + t.smoothness;
}

EnergyTerms energy_terms(const State& state, const ProblemInstance& prob) {
  return terms_for(state, prob, prob.regularizer());
}

double total_energy(const State& state, const ProblemInstance& prob) { return energy_terms(state, prob).total; }

State gradient(const State& state, const ProblemInstance& prob) {
  State grad(state.width(), state.height());
  EnergyEvaluator eval(prob);
  eval.evaluate(state.values(), grad.values());
  return grad;
}

}  // namespace graphdepth
