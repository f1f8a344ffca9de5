// Copyright 2026 The hypernews Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hypernews {

/// Binary confusion counts; class 1 ("fake") is the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const Confusion&) const = default;
};

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double binary_f1 = 0.0;  // F1 of the positive class
  ClassScores negative;   // class 0
  ClassScores positive;   // class 1
  Confusion confusion;

  bool operator==(const MetricsReport& o) const;
};

/// Scores from confusion counts. Precision/recall/F1 with a zero denominator are 0.
MetricsReport metrics_from_confusion(const Confusion& c);

Confusion confusion_from(std::span<const int> predicted, std::span<const int> truth);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1); 0 for a single value
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> values);

}  // namespace hypernews
