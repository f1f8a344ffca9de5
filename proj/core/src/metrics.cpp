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

#include "hypernews/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypernews {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassScores scores(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassScores s;
  s.precision = ratio(tp, tp + fp);
  s.recall = ratio(tp, tp + fn);
  s.f1 = ratio(2 * tp, 2 * tp + fp + fn);
  return s;
}

}  // namespace

bool MetricsReport::operator==(const MetricsReport& o) const {
  return accuracy == o.accuracy && macro_f1 == o.macro_f1 && binary_f1 == o.binary_f1 && confusion == o.confusion;
}

MetricsReport metrics_from_confusion(const Confusion& c) {
  MetricsReport r;
  r.confusion = c;
  r.accuracy = ratio(c.tp + c.tn, c.total());
  r.positive = scores(c.tp, c.fp, c.fn);
  r.negative = scores(c.tn, c.fn, c.fp);
  r.binary_f1 = r.positive.f1;
  r.macro_f1 = (r.positive.f1 + r.negative.f1) / 2.0;
  return r;
}

Confusion confusion_from(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("confusion_from: length mismatch");
  Confusion c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == 1;
    const bool t = truth[i] == 1;
    if (p && t) ++c.tp;
    else if (p && !t) ++c.fp;
    else if (!p && t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  Summary s;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

}  // namespace hypernews
