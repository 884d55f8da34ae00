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

// Entry points of the individual ISA variants, called through kernels.hpp.

#include "graphdepth/kernels.hpp"

namespace graphdepth::kernels {

#define GRAPHDEPTH_KERNEL_DECLS                                                                                   \
  TermSums mixed_l12(const GraphArrays& graph, const FieldArrays& field, double eps, std::size_t begin,           \
                     std::size_t end, const GradientSinks* sinks);                                                \
  TermSums nltgv(const GraphArrays& graph, const FieldArrays& field, double eps, std::size_t begin,               \
                 std::size_t end, const GradientSinks* sinks);                                                    \
  double data_term(const double* d, const double* dbar, const double* mask, double eps, std::size_t begin,        \
                   std::size_t end, double* grad_d, double scale);                                                \
  void adam_update(double* x, double* m, double* v, const double* g, std::size_t n, const AdamStep& p);

namespace scalar {
GRAPHDEPTH_KERNEL_DECLS
}

#if defined(GRAPHDEPTH_HAVE_AVX2)
namespace avx2 {
GRAPHDEPTH_KERNEL_DECLS
}
#endif

#undef GRAPHDEPTH_KERNEL_DECLS

}  // namespace graphdepth::kernels
