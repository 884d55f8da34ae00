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

#include "graphdepth/eval.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace graphdepth {

std::string format_threshold(double threshold) {
  std::ostringstream out;
  out.precision(15);
  out << threshold;
  return out.str();
}

double MetricReport::bad_at(double threshold) const {
  for (const auto& [t, pct] : bad) {
    if (t == threshold) return pct;
  }
  throw Error(ErrorCode::kInvalidArgument, "threshold " + format_threshold(threshold) + " was not evaluated");
}

std::string MetricReport::to_key_value() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [t, pct] : bad) out << "bad" << format_threshold(t) << '=' << pct << '\n';
  out << "avgerr=" << avgerr << '\n' << "rms=" << rms << '\n' << "count=" << count << '\n';
  return out.str();
}

std::string MetricReport::csv_header() const {
  std::string header = "label";
  for (const auto& entry : bad) header += ",bad" + format_threshold(entry.first);
  return header + ",avgerr,rms,count";
}

std::string MetricReport::csv_row(std::string_view label) const {
  std::ostringstream out;
  out.precision(17);
  out << label;
  for (const auto& entry : bad) out << ',' << entry.second;
  out << ',' << avgerr << ',' << rms << ',' << count;
  return out.str();
}

MetricReport evaluate(const Grid<double>& pred, const Grid<double>& gt, const Mask& gt_valid,
                      std::span<const double> thresholds) {
  if (!pred.same_shape(gt) || !gt.same_shape(gt_valid)) {
    throw Error(ErrorCode::kInvalidArgument, "prediction and ground truth differ in shape");
  }
  std::vector<std::size_t> above(thresholds.size(), 0);
  MetricReport report;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt_valid[i]) continue;
    const double e = std::isfinite(pred[i]) ? std::abs(pred[i] - gt[i]) : std::numeric_limits<double>::infinity();
    ++report.count;
    abs_sum += e;
    sq_sum += e * e;
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      if (e > thresholds[k]) ++above[k];
    }
  }
  if (report.count == 0) throw Error(ErrorCode::kNoGroundTruth, "no pixel has ground truth");
  const double n = static_cast<double>(report.count);
  report.avgerr = abs_sum / n;
  report.rms = std::sqrt(sq_sum / n);
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    report.bad.emplace_back(thresholds[k], 100.0 * static_cast<double>(above[k]) / n);
  }
  return report;
}

Grid<double> binarize_confidence(const Grid<double>& m, double threshold) {
  Grid<double> out(m.width(), m.height(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] >= threshold ? 1.0 : 0.0;
  return out;
}

}  // namespace graphdepth
