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

#ifndef ACE_TRAINING_HPP_
#define ACE_TRAINING_HPP_

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ace/encoder.hpp"
#include "ace/eval.hpp"
#include "ace/heads.hpp"

namespace ace {

enum class Task { kIdentify, kLocalise };
Task task_from_string(const std::string& name);  // "identify"/"localise"
const char* task_name(Task t);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 50;
  double lr = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lr_decay = 0.9;   // applied when dev F1 does not increase
  double dropout = 0.5;
  double grl_lambda = 1.0;
  bool grl_warmup = false;  // ramp lambda linearly over the epochs
  std::uint64_t seed = 42;
  double split_ratios[3] = {0.6, 0.2, 0.2};
  // Stop once dev F1 reaches this value (it cannot improve further);
  // anything > 1 disables early stopping.
  double early_stop_f1 = 1.0;

  void validate() const;  // throws ace::Error on violations
};

// Adamax with bias-corrected first moment:
//   m <- b1 m + (1-b1) g;  u <- max(b2 u, |g|);
//   theta <- theta - lr/(1-b1^t) * m / (u + eps)
// A step with any non-finite gradient is skipped and counted.
class Adamax {
 public:
  explicit Adamax(double lr, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);

  bool step(const std::vector<Tensor>& params);  // false when skipped
  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  int steps() const { return t_; }
  int skipped() const { return skipped_; }

 private:
  struct Slot {
    std::vector<double> m, u;
  };
  std::unordered_map<Node*, Slot> state_;
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  int skipped_ = 0;
};

// lr * decay when the latest dev F1 did not exceed the best of the earlier
// epochs ("does not increase" includes equality); never decays on the first
// epoch.
double lr_decay_check(const std::vector<double>& dev_f1_history, double lr,
                      double decay = 0.9);

// Numerically stable binary cross-entropy from a logit, composed from
// catalog ops: relu(z) - y z + log(1 + exp(-|z|)).
Tensor bce_with_logit(const Tensor& logit, double target);

// Per-sentence task losses (training mode, dropout from `rng`).
Tensor identify_loss(const GceModel& model, const Sentence& s, RngStream& rng);
Tensor localise_loss(const GceModel& model, const Sentence& s, RngStream& rng);

// Labeled source + unlabeled target slice of one adversarial step.
struct AceBatch {
  std::vector<const Sentence*> source;
  std::vector<const Sentence*> target;
};

// Dropout streams are derived per sentence (run seed, epoch, source/target,
// position), so a source sentence draws the same masks whether it is trained
// supervised or adversarially. That makes the grl_lambda = 0 ablation match
// supervised training exactly and keeps runs bit-reproducible.
RngStream sentence_dropout_stream(std::uint64_t seed, int epoch,
                                  bool is_target, std::size_t position);
using StreamFn = std::function<RngStream(bool is_target, std::size_t position)>;

// Task loss on the source plus domain cross-entropy over source and target,
// with encoder features routed into the domain head through
// grad_reverse(lambda). Minimizing it descends the task and domain heads and
// ascends the encoder against the domain term. Rejects batches without
// source examples. Also reports the domain classifier's hard predictions.
struct AceObjective {
  Tensor loss;
  int domain_correct = 0;
  int domain_total = 0;
};
AceObjective ace_objective(const GceModel& model, const AceBatch& batch,
                           Task task, const TrainConfig& cfg,
                           const StreamFn& stream_for, double lambda);

struct EpochStats {
  double mean_loss = 0.0;
  double domain_accuracy = -1.0;  // < 0 outside adversarial training
  MetricsReport dev;
  double lr = 0.0;
  int updates = 0;
};

// Mutable cross-epoch training state (optimizer, streams, selection).
struct TrainState {
  explicit TrainState(const TrainConfig& cfg);
  Adamax opt;
  RngStream shuffle;
  std::uint64_t seed;
  double lr;
  int epoch = 0;
  std::vector<double> dev_f1_history;
  double best_f1 = -1.0;
  int best_epoch = 0;
  std::vector<std::vector<double>> best_params;
};

// One supervised epoch: seeded shuffled batches, mean task loss, Adamax
// updates, dev metrics. Rejects data missing the labels the task needs
// before any update.
EpochStats gce_train_epoch(GceModel& model, const std::vector<Sentence>& train,
                           const std::vector<Sentence>& dev, Task task,
                           const TrainConfig& cfg, TrainState& state);

// One adversarial epoch over paired source/target batches (target cycled
// when shorter). Dev metrics come from the labeled source dev split.
EpochStats ace_train_epoch(GceModel& model,
                           const std::vector<Sentence>& source_train,
                           const std::vector<Sentence>& target_train,
                           const std::vector<Sentence>& source_dev, Task task,
                           const TrainConfig& cfg, TrainState& state);

// Full training runs: epoch loop, plateau LR decay, epoch log lines
// (epoch, loss, domain accuracy, dev P/R/F1, lr), best-dev-F1 model
// selection (weights restored into `model`), optional early stop.
struct TrainResult {
  double best_dev_f1 = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
  std::vector<EpochStats> history;
};

TrainResult run_gce_training(GceModel& model, const std::vector<Sentence>& train,
                             const std::vector<Sentence>& dev, Task task,
                             const TrainConfig& cfg, std::ostream* log);
TrainResult run_ace_training(GceModel& model,
                             const std::vector<Sentence>& source_train,
                             const std::vector<Sentence>& target_train,
                             const std::vector<Sentence>& source_dev, Task task,
                             const TrainConfig& cfg, std::ostream* log);

// Dev-set evaluation used for selection and reporting: classification PRF
// for identify, token-level PRF for localise.
MetricsReport evaluate_task(const GceModel& model,
                            const std::vector<Sentence>& data, Task task);

// Vocabulary over every token of the given corpora, in first-seen order.
Vocab build_vocab(
    const std::vector<const std::vector<Sentence>*>& corpora);

}  // namespace ace

#endif  // ACE_TRAINING_HPP_
