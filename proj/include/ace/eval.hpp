/* Copyright 2026 ACE Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ACE_EVAL_HPP_
#define ACE_EVAL_HPP_

#include <string>
#include <vector>

#include "ace/encoder.hpp"
#include "ace/tagging.hpp"

namespace ace {

// Micro-averaged counts with the 0/0 -> 0 convention for degenerate
// precision/recall.
struct MetricsReport {
  long tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;

  static MetricsReport from_counts(long tp, long fp, long fn);
};

// Sentence-level binary metrics with "causal" as the positive class.
MetricsReport classification_prf(const std::vector<bool>& preds,
                                 const std::vector<bool>& golds);

// Token-level micro metrics over non-O tags: tp = pred == gold != O,
// fp = pred != O and pred != gold, fn = gold != O and pred != gold.
MetricsReport token_prf(const std::vector<TagSequence>& preds,
                        const std::vector<TagSequence>& golds);

// Exact (role, start, end) span matching, micro-averaged over sentences.
MetricsReport span_prf(const std::vector<SpanSet>& preds,
                       const std::vector<SpanSet>& golds);

// Fixed-order metrics table (P, R, F1 columns, 4 decimals), one row per
// labeled report.
std::string format_metrics_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows);

// One line per sentence: domain marker ("-" when absent), a tab, then the
// fused sentence representation at full round-trip precision.
void export_features(const GceModel& model, const std::vector<Sentence>& data,
                     const std::string& path);

}  // namespace ace

#endif  // ACE_EVAL_HPP_
