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

#include "ace/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ace {

MetricsReport MetricsReport::from_counts(long tp, long fp, long fn) {
  MetricsReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
  r.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  r.f1 = r.precision + r.recall == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

MetricsReport classification_prf(const std::vector<bool>& preds,
                                 const std::vector<bool>& golds) {
  if (preds.size() != golds.size())
    throw Error("classification_prf: " + std::to_string(preds.size()) +
                " predictions vs " + std::to_string(golds.size()) + " golds");
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] && golds[i]) ++tp;
    if (preds[i] && !golds[i]) ++fp;
    if (!preds[i] && golds[i]) ++fn;
  }
  return MetricsReport::from_counts(tp, fp, fn);
}

MetricsReport token_prf(const std::vector<TagSequence>& preds,
                        const std::vector<TagSequence>& golds) {
  if (preds.size() != golds.size())
    throw Error("token_prf: " + std::to_string(preds.size()) +
                " predictions vs " + std::to_string(golds.size()) + " golds");
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t s = 0; s < preds.size(); ++s) {
    if (preds[s].size() != golds[s].size())
      throw Error("token_prf: length mismatch in sentence " +
                  std::to_string(s));
    for (std::size_t i = 0; i < preds[s].size(); ++i) {
      const int p = preds[s][i], g = golds[s][i];
      if (p == g) {
        if (p != tags::kO) ++tp;
        continue;
      }
      if (p != tags::kO) ++fp;
      if (g != tags::kO) ++fn;
    }
  }
  return MetricsReport::from_counts(tp, fp, fn);
}

MetricsReport span_prf(const std::vector<SpanSet>& preds,
                       const std::vector<SpanSet>& golds) {
  if (preds.size() != golds.size())
    throw Error("span_prf: " + std::to_string(preds.size()) +
                " predictions vs " + std::to_string(golds.size()) + " golds");
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t s = 0; s < preds.size(); ++s) {
    std::vector<bool> used(golds[s].size(), false);
    for (const Span& p : preds[s]) {
      bool matched = false;
      for (std::size_t g = 0; g < golds[s].size(); ++g) {
        if (!used[g] && golds[s][g] == p) {
          used[g] = true;
          matched = true;
          break;
        }
      }
      matched ? ++tp : ++fp;
    }
    for (bool u : used)
      if (!u) ++fn;
  }
  return MetricsReport::from_counts(tp, fp, fn);
}

std::string format_metrics_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::size_t width = 6;
  for (const auto& [label, r] : rows) width = std::max(width, label.size());
  std::ostringstream out;
  out << std::string(width + 2, ' ') << "P       R       F1\n";
  char buf[64];
  for (const auto& [label, r] : rows) {
    std::snprintf(buf, sizeof(buf), "%.4f  %.4f  %.4f", r.precision, r.recall,
                  r.f1);
    out << label << std::string(width + 2 - label.size(), ' ') << buf << "\n";
  }
  return out.str();
}

void export_features(const GceModel& model, const std::vector<Sentence>& data,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open feature file for writing: " + path);
  char buf[64];
  for (const Sentence& s : data) {
    EncodedSentence enc = encode_sentence(model, s, Mode::kInfer);
    out << (s.domain.empty() ? "-" : s.domain) << "\t";
    const auto vec = enc.sentence_vec.value();
    for (std::size_t i = 0; i < vec.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", vec[i]);
      out << (i ? " " : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw Error("failed writing features: " + path);
}

}  // namespace ace
