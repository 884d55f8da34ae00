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

#include "node_math.hpp"
#include "variants.hpp"

namespace graphdepth::kernels::scalar {

TermSums mixed_l12(const GraphArrays& graph, const FieldArrays& field, double eps, std::size_t begin,
                   std::size_t end, const GradientSinks* sinks) {
  TermSums sums;
  for (std::size_t i = begin; i < end; ++i) {
    const NodeTerms t = mixed_node(graph, field, eps, i, sinks);
    sums.fit += t.fit;
    sums.smooth += t.smooth;
  }
  return sums;
}

TermSums nltgv(const GraphArrays& graph, const FieldArrays& field, double eps, std::size_t begin, std::size_t end,
               const GradientSinks* sinks) {
  TermSums sums;
  for (std::size_t i = begin; i < end; ++i) {
    const NodeTerms t = nltgv_node(graph, field, eps, i, sinks);
    sums.fit += t.fit;
    sums.smooth += t.smooth;
  }
  return sums;
}

double data_term(const double* d, const double* dbar, const double* mask, double eps, std::size_t begin,
                 std::size_t end, double* grad_d, double scale) {
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) sum += data_node(d, dbar, mask, eps, i, grad_d, scale);
  return sum;
}

void adam_update(double* x, double* m, double* v, const double* g, std::size_t n, const AdamStep& p) {
  for (std::size_t i = 0; i < n; ++i) adam_element(x, m, v, g, i, p);
}

}  // namespace graphdepth::kernels::scalar
