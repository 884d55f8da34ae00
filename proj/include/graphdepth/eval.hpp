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

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graphdepth/grid.hpp"

namespace graphdepth {

/// Error statistics over the pixels that have ground truth.
struct MetricReport {
  /// (threshold, percentage of errors strictly above it), in input order.
  std::vector<std::pair<double, double>> bad;
  double avgerr = 0.0;
  double rms = 0.0;
  std::size_t count = 0;

  /// Percentage for `threshold`; throws kInvalidArgument if it was not evaluated.
  double bad_at(double threshold) const;

  /// "bad<t>=<pct>" lines followed by avgerr, rms and count.
  std::string to_key_value() const;
  std::string csv_header() const;
  std::string csv_row(std::string_view label) const;
};

/// Compares pred against gt where gt_valid is set. A non-finite prediction
/// counts as an infinite error. Throws kNoGroundTruth when no gt pixel is
/// valid and kInvalidArgument on shape mismatches.
MetricReport evaluate(const Grid<double>& pred, const Grid<double>& gt, const Mask& gt_valid,
                      std::span<const double> thresholds);

/// 1 where m >= threshold, else 0.
Grid<double> binarize_confidence(const Grid<double>& m, double threshold);

/// Threshold label as printed in reports ("0.5", "1", "2").
std::string format_threshold(double threshold);

}  // namespace graphdepth
