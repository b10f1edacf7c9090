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

#include "ace/heads.hpp"

#include <cmath>
#include <limits>

#include "ace/autodiff.hpp"

namespace ace {
namespace {

// Additive penalty excluding illegal transitions. Large enough that the
// exponential underflows to exact zero, small enough to stay finite through
// stacked penalties.
constexpr double kIllegal = -1e30;

Tensor ones(int n) { return Tensor::leaf({n}, std::vector<double>(n, 1.0)); }

// Sum of all entries of a rank-2 tensor, as a differentiable scalar.
Tensor sum_all(const Tensor& x) {
  return ops::matmul(ones(x.rows()), ops::matmul(x, ones(x.cols())));
}

void check_trans_shape(const Tensor& trans, int num_tags, const char* who) {
  const int full = num_tags + 2;
  if (trans.rank() != 2 || trans.rows() != full || trans.cols() != full)
    throw Error(std::string(who) + ": transition matrix must be " +
                std::to_string(full) + "x" + std::to_string(full) +
                " for " + std::to_string(num_tags) + " tags, got " +
                shape_str(trans.shape()));
}

}  // namespace

Tensor classify_logit(const GceModel& model, const Tensor& sentence_vec) {
  return ops::add(ops::matmul(sentence_vec, model.w_class), model.b_class);
}

Tensor classify(const GceModel& model, const EncodedSentence& enc) {
  return ops::sigmoid(classify_logit(model, enc.sentence_vec));
}

Tensor domain_logit(const GceModel& model, const Tensor& features) {
  return ops::add(ops::matmul(features, model.w_dom), model.b_dom);
}

Tensor domain_classify(const GceModel& model, const EncodedSentence& enc) {
  return ops::sigmoid(domain_logit(model, enc.sentence_vec));
}

Tensor emission_scores(const GceModel& model, const EncodedSentence& enc) {
  Tensor fused = fusion_forward(
      model, ops::concat({enc.token_states, enc.bilstm_states}, 1));
  return ops::add(ops::matmul(fused, model.emit_w), model.emit_b);
}

Tensor crf_score(const Tensor& emissions, const Tensor& trans,
                 const TagSequence& y) {
  const int n = emissions.rows();
  const int k = emissions.cols();
  check_trans_shape(trans, k, "crf_score");
  if (static_cast<int>(y.size()) != n)
    throw Error("crf_score: sequence length " + std::to_string(y.size()) +
                " does not match " + std::to_string(n) + " emission rows");
  for (int t : y)
    if (t < 0 || t >= k)
      throw Error("crf_score: tag id " + std::to_string(t) + " out of range");

  const int full = k + 2;
  const int start = k, end = k + 1;
  std::vector<double> pick(static_cast<std::size_t>(n) * k, 0.0);
  for (int i = 0; i < n; ++i) pick[i * k + y[i]] = 1.0;
  std::vector<double> count(static_cast<std::size_t>(full) * full, 0.0);
  count[start * full + y.front()] += 1.0;
  for (int i = 0; i + 1 < n; ++i) count[y[i] * full + y[i + 1]] += 1.0;
  count[y.back() * full + end] += 1.0;

  Tensor emis_part = sum_all(ops::mul(emissions, Tensor::leaf({n, k}, pick)));
  Tensor trans_part =
      sum_all(ops::mul(trans, Tensor::leaf({full, full}, count)));
  return ops::add(emis_part, trans_part);
}

Tensor crf_log_partition(const Tensor& emissions, const Tensor& trans,
                         const TransitionMask& mask) {
  const int n = emissions.rows();
  const int k = emissions.cols();
  if (n < 1) throw Error("crf_log_partition: empty emissions");
  if (mask.num_tags != k)
    throw Error("crf_log_partition: mask covers " +
                std::to_string(mask.num_tags) + " tags, emissions have " +
                std::to_string(k));
  check_trans_shape(trans, k, "crf_log_partition");
  const int full = k + 2;

  // Constant selectors extracting the real-tag blocks of the full matrix.
  std::vector<double> sel(static_cast<std::size_t>(full) * k, 0.0);
  for (int t = 0; t < k; ++t) sel[t * k + t] = 1.0;
  std::vector<double> sel_t(static_cast<std::size_t>(k) * full, 0.0);
  for (int t = 0; t < k; ++t) sel_t[t * full + t] = 1.0;
  const Tensor sel_c = Tensor::leaf({full, k}, std::move(sel));
  const Tensor sel_tc = Tensor::leaf({k, full}, std::move(sel_t));

  std::vector<double> pen_rr(static_cast<std::size_t>(k) * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      pen_rr[a * k + b] = mask.ok(a, b) ? 0.0 : kIllegal;
  std::vector<double> pen_start(k), pen_end(k);
  for (int t = 0; t < k; ++t) {
    pen_start[t] = mask.ok(mask.start(), t) ? 0.0 : kIllegal;
    pen_end[t] = mask.ok(t, mask.end()) ? 0.0 : kIllegal;
  }

  Tensor t_rr = ops::add(ops::matmul(ops::matmul(sel_tc, trans), sel_c),
                         Tensor::leaf({k, k}, std::move(pen_rr)));
  const int start_ids[1] = {mask.start()};
  Tensor t_start =
      ops::add(ops::matmul(ops::embedding_lookup(trans, start_ids), sel_c),
               Tensor::leaf({1, k}, std::move(pen_start)));
  std::vector<double> end_onehot(full, 0.0);
  end_onehot[mask.end()] = 1.0;
  Tensor t_end =
      ops::add(ops::matmul(sel_tc, ops::matmul(trans, Tensor::leaf(
                                                   {full}, end_onehot))),
               Tensor::leaf({k}, std::move(pen_end)));

  const Tensor ones_row = Tensor::leaf({1, k}, std::vector<double>(k, 1.0));
  const int first[1] = {0};
  Tensor alpha = ops::add(ops::embedding_lookup(emissions, first), t_start);
  for (int i = 1; i < n; ++i) {
    Tensor prev = ops::reshape(alpha, {k, 1});
    Tensor scores = ops::add(ops::matmul(prev, ones_row), t_rr);
    const int row[1] = {i};
    alpha = ops::add(ops::log_sum_exp(scores, 0),
                     ops::embedding_lookup(emissions, row));
  }
  Tensor final_scores = ops::add(ops::reshape(alpha, {k}), t_end);
  return ops::log_sum_exp(final_scores, 0);
}

Tensor crf_nll(const Tensor& emissions, const Tensor& trans,
               const TagSequence& gold, const TransitionMask& mask) {
  const int n = emissions.rows();
  if (static_cast<int>(gold.size()) != n)
    throw Error("crf_nll: gold length " + std::to_string(gold.size()) +
                " does not match " + std::to_string(n) + " emission rows");
  if (!mask.ok(mask.start(), gold.front()))
    throw Error("crf_nll: illegal gold transition START -> tag " +
                std::to_string(gold.front()));
  for (int i = 0; i + 1 < n; ++i)
    if (!mask.ok(gold[i], gold[i + 1]))
      throw Error("crf_nll: illegal gold transition at position " +
                  std::to_string(i));
  if (!mask.ok(gold.back(), mask.end()))
    throw Error("crf_nll: illegal gold transition tag " +
                std::to_string(gold.back()) + " -> END");
  Tensor log_z = crf_log_partition(emissions, trans, mask);
  return ops::add(log_z, ops::scale(crf_score(emissions, trans, gold), -1.0));
}

ViterbiResult viterbi_decode(std::span<const double> emissions, int n,
                             std::span<const double> trans,
                             const TransitionMask& mask) {
  const int k = mask.num_tags;
  const int full = mask.total();
  if (n < 1) throw Error("viterbi_decode: empty lattice");
  if (static_cast<int>(emissions.size()) != n * k)
    throw Error("viterbi_decode: emissions size does not match n * num_tags");
  if (static_cast<int>(trans.size()) != full * full)
    throw Error("viterbi_decode: transition matrix size mismatch");
  const double ninf = -std::numeric_limits<double>::infinity();

  std::vector<double> delta(static_cast<std::size_t>(n) * k, ninf);
  std::vector<int> back(static_cast<std::size_t>(n) * k, 0);
  for (int t = 0; t < k; ++t)
    if (mask.ok(mask.start(), t))
      delta[t] = emissions[t] + trans[mask.start() * full + t];

  for (int i = 1; i < n; ++i) {
    for (int to = 0; to < k; ++to) {
      double best = ninf;
      int arg = 0;
      for (int from = 0; from < k; ++from) {
        if (!mask.ok(from, to)) continue;
        const double cand = delta[(i - 1) * k + from] + trans[from * full + to];
        if (cand > best) {  // strict: ties keep the lowest tag index
          best = cand;
          arg = from;
        }
      }
      delta[i * k + to] = best == ninf ? ninf : best + emissions[i * k + to];
      back[i * k + to] = arg;
    }
  }

  double best = ninf;
  int arg = 0;
  for (int t = 0; t < k; ++t) {
    if (!mask.ok(t, mask.end())) continue;
    const double cand = delta[(n - 1) * k + t] + trans[t * full + mask.end()];
    if (cand > best) {
      best = cand;
      arg = t;
    }
  }

  ViterbiResult result;
  result.score = best;
  result.tags.assign(n, 0);
  result.tags[n - 1] = arg;
  for (int i = n - 1; i > 0; --i)
    result.tags[i - 1] = back[i * k + result.tags[i]];
  return result;
}

ViterbiResult viterbi_decode(const Tensor& emissions, const Tensor& trans,
                             const TransitionMask& mask) {
  check_trans_shape(trans, mask.num_tags, "viterbi_decode");
  if (emissions.cols() != mask.num_tags)
    throw Error("viterbi_decode: emissions width " +
                std::to_string(emissions.cols()) + " does not match " +
                std::to_string(mask.num_tags) + " tags");
  return viterbi_decode(emissions.value(), emissions.rows(), trans.value(),
                        mask);
}

double identify_probability(const GceModel& model, const Sentence& s) {
  EncodedSentence enc = encode_sentence(model, s, Mode::kInfer);
  return classify(model, enc).item();
}

TagSequence predict_tags(const GceModel& model, const Sentence& s) {
  EncodedSentence enc = encode_sentence(model, s, Mode::kInfer);
  Tensor emissions = emission_scores(model, enc);
  return viterbi_decode(emissions, model.trans, tags::mask()).tags;
}

}  // namespace ace
