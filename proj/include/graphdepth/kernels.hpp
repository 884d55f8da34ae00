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

// Inner loops of the energy, its gradient and the ADAM update.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant that processes four nodes per step. Both variants evaluate the same
// per-node expression trees in the same order and reduce energies node by
// node, so their results are bit-identical; the variant only changes speed.

#include <cstddef>
#include <cstdint>

namespace graphdepth::kernels {

enum class Isa { kScalar, kAvx2 };

const char* to_string(Isa isa);

/// Whether this build and this CPU can run `isa`.
bool isa_supported(Isa isa);

/// Fastest supported variant. Honors GRAPHDEPTH_ISA=scalar|avx2 when set.
Isa detect_isa();

/// Process-wide variant used by the energy evaluator. Defaults to detect_isa().
Isa active_isa();
/// Throws kInvalidArgument if `isa` is not supported.
void set_active_isa(Isa isa);

/// Slot-major graph view (see PixelGraph).
struct GraphArrays {
  std::size_t nodes = 0;
  int slots = 0;
  const std::int32_t* target = nullptr;
  const double* weight = nullptr;
  const double* dx = nullptr;
  const double* dy = nullptr;
};

struct FieldArrays {
  const double* d = nullptr;
  const double* ux = nullptr;
  const double* uy = nullptr;
};

/// Gradient sinks for a regularizer pass. The node-local part of the gradient
/// is assigned to d/ux/uy[i]; the part that belongs to each edge's target is
/// stored per slot in edge_d/edge_ux/edge_uy and later summed by
/// gather_incoming. fit_scale and smooth_scale multiply the gradients of the
/// plane-fit and slope-smoothness terms.
struct GradientSinks {
  double* d = nullptr;
  double* ux = nullptr;
  double* uy = nullptr;
  double* edge_d = nullptr;
  double* edge_ux = nullptr;
  double* edge_uy = nullptr;
  double fit_scale = 1.0;
  double smooth_scale = 1.0;
};

/// Unscaled energies of a regularizer over a node range.
struct TermSums {
  double fit = 0.0;
  double smooth = 0.0;
};

/// Mixed l1,2 regularizer over nodes [begin, end):
///   fit    = sum_i sqrt(sum_k (w (d_j - d_i - <u_i, j - i>))^2 + eps^2) - eps
///   smooth = sum_i sum_k w (sqrt(|u_j - u_i|^2 + eps^2) - eps)
/// `sinks` may be null for an energy-only pass.
TermSums mixed_l12(Isa isa, const GraphArrays& graph, const FieldArrays& field, double eps, std::size_t begin,
                   std::size_t end, const GradientSinks* sinks);

/// NLTGV baseline over nodes [begin, end):
///   fit    = sum_i sum_k sqrt((w r_k)^2 + eps^2) - eps
///   smooth = sum_i sum_k w (|du_x|_eps + |du_y|_eps)
TermSums nltgv(Isa isa, const GraphArrays& graph, const FieldArrays& field, double eps, std::size_t begin,
               std::size_t end, const GradientSinks* sinks);

/// sum_i m_i (sqrt((d_i - dbar_i)^2 + eps^2) - eps) over [begin, end). When
/// grad_d is non-null, adds scale * dE/dd_i to it.
double data_term(Isa isa, const double* d, const double* dbar, const double* mask, double eps, std::size_t begin,
                 std::size_t end, double* grad_d, double scale);

/// Adds to node j the per-slot contributions of every edge that targets it.
void gather_incoming(const std::uint32_t* in_offsets, const std::uint32_t* in_slots, const double* edge_d,
                     const double* edge_ux, const double* edge_uy, std::size_t begin, std::size_t end, double* grad_d,
                     double* grad_ux, double* grad_uy);

struct AdamStep {
  double step = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double bias1 = 1.0;  // 1 - beta1^t
  double bias2 = 1.0;  // 1 - beta2^t
};

/// One ADAM update of x[0, n) in place.
void adam_update(Isa isa, double* x, double* m, double* v, const double* g, std::size_t n, const AdamStep& p);

}  // namespace graphdepth::kernels
