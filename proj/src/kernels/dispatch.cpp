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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "graphdepth/error.hpp"
#include "graphdepth/kernels.hpp"
#include "variants.hpp"

namespace graphdepth::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(GRAPHDEPTH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{detect_isa()};
  return slot;
}

}  // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) { return isa == Isa::kScalar || (isa == Isa::kAvx2 && cpu_has_avx2()); }

Isa detect_isa() {
  if (const char* env = std::getenv("GRAPHDEPTH_ISA")) {
    const std::string_view want(env);
    if (want == "scalar") return Isa::kScalar;
    if (want == "avx2" && isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  }
  return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorCode::kInvalidArgument, std::string("kernel variant not supported here: ") + to_string(isa));
  }
  active_slot().store(isa, std::memory_order_relaxed);
}

#if defined(GRAPHDEPTH_HAVE_AVX2)
#define GRAPHDEPTH_DISPATCH(isa, call) \
  return (isa) == Isa::kAvx2 ? avx2::call : scalar::call
#else
#define GRAPHDEPTH_DISPATCH(isa, call) \
  (void)(isa);                         \
  return scalar::call
#endif

TermSums mixed_l12(Isa isa, const GraphArrays& graph, const FieldArrays& field, double eps, std::size_t begin,
                   std::size_t end, const GradientSinks* sinks) {
  GRAPHDEPTH_DISPATCH(isa, mixed_l12(graph, field, eps, begin, end, sinks));
}

TermSums nltgv(Isa isa, const GraphArrays& graph, const FieldArrays& field, double eps, std::size_t begin,
               std::size_t end, const GradientSinks* sinks) {
  GRAPHDEPTH_DISPATCH(isa, nltgv(graph, field, eps, begin, end, sinks));
}

double data_term(Isa isa, const double* d, const double* dbar, const double* mask, double eps, std::size_t begin,
                 std::size_t end, double* grad_d, double scale) {
  GRAPHDEPTH_DISPATCH(isa, data_term(d, dbar, mask, eps, begin, end, grad_d, scale));
}

void adam_update(Isa isa, double* x, double* m, double* v, const double* g, std::size_t n, const AdamStep& p) {
  GRAPHDEPTH_DISPATCH(isa, adam_update(x, m, v, g, n, p));
}

#undef GRAPHDEPTH_DISPATCH

void gather_incoming(const std::uint32_t* in_offsets, const std::uint32_t* in_slots, const double* edge_d,
                     const double* edge_ux, const double* edge_uy, std::size_t begin, std::size_t end, double* grad_d,
                     double* grad_ux, double* grad_uy) {
  for (std::size_t j = begin; j < end; ++j) {
    double gd = grad_d[j];
    double gx = grad_ux[j];
    double gy = grad_uy[j];
    for (std::uint32_t e = in_offsets[j]; e < in_offsets[j + 1]; ++e) {
      const std::uint32_t s = in_slots[e];
      gd += edge_d[s];
      gx += edge_ux[s];
      gy += edge_uy[s];
    }
    grad_d[j] = gd;
    grad_ux[j] = gx;
    grad_uy[j] = gy;
  }
}

}  // namespace graphdepth::kernels
