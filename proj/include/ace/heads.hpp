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

#ifndef ACE_HEADS_HPP_
#define ACE_HEADS_HPP_

#include <span>
#include <utility>

#include "ace/encoder.hpp"
#include "ace/tagging.hpp"
#include "ace/tensor.hpp"

namespace ace {

// -- Sentence-level heads ------------------------------------------------------

// sigma(f W_class + b_class); decision threshold 0.5.
Tensor classify_logit(const GceModel& model, const Tensor& sentence_vec);
Tensor classify(const GceModel& model, const EncodedSentence& enc);

// sigma(f W_dom + b_dom) = P(source | X). Adversarial training feeds the
// features through grad_reverse before this head; the head itself is plain.
Tensor domain_logit(const GceModel& model, const Tensor& features);
Tensor domain_classify(const GceModel& model, const EncodedSentence& enc);

// Per-token emission scores {n, num_tags}: the fusion feed-forward applied
// token-wise to [gcn_i ; bilstm_i], then a linear projection.
Tensor emission_scores(const GceModel& model, const EncodedSentence& enc);

// -- Linear-chain CRF ----------------------------------------------------------
//
// Emissions are {n, K} over the K real tags; `trans` is the {K+2, K+2}
// transition score matrix with START = K and END = K + 1 (matching
// TransitionMask indexing). Illegal transitions are excluded by adding a
// -1e30 penalty, which underflows to exact zero probability.

// Eq.-style path score: sum of emissions along y plus START->y_1, adjacent,
// and y_n->END transitions. Differentiable in emissions and trans.
Tensor crf_score(const Tensor& emissions, const Tensor& trans,
                 const TagSequence& y);

// log sum over mask-legal tag sequences of exp(score), by the forward
// algorithm in log space (max-subtracted log-sum-exp per step).
Tensor crf_log_partition(const Tensor& emissions, const Tensor& trans,
                         const TransitionMask& mask);

// Negative log-likelihood: crf_log_partition - crf_score(gold). Non-negative;
// rejects gold sequences that are illegal under the mask.
Tensor crf_nll(const Tensor& emissions, const Tensor& trans,
               const TagSequence& gold, const TransitionMask& mask);

// Max-score legal sequence with its score. Ties break toward the lowest tag
// index at every backpointer.
struct ViterbiResult {
  TagSequence tags;
  double score;
};
ViterbiResult viterbi_decode(std::span<const double> emissions, int n,
                             std::span<const double> trans,
                             const TransitionMask& mask);
ViterbiResult viterbi_decode(const Tensor& emissions, const Tensor& trans,
                             const TransitionMask& mask);

// -- Inference convenience -----------------------------------------------------

double identify_probability(const GceModel& model, const Sentence& s);
TagSequence predict_tags(const GceModel& model, const Sentence& s);

}  // namespace ace

#endif  // ACE_HEADS_HPP_
