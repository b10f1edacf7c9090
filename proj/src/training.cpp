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

#include "ace/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ace/autodiff.hpp"
#include "ace/kernels.hpp"

namespace ace {

Task task_from_string(const std::string& name) {
  if (name == "identify") return Task::kIdentify;
  if (name == "localise") return Task::kLocalise;
  throw Error("unknown task \"" + name + "\" (expected identify|localise)");
}

const char* task_name(Task t) {
  return t == Task::kIdentify ? "identify" : "localise";
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error("config: epochs must be >= 1");
  if (batch_size < 1) throw Error("config: batch_size must be >= 1");
  if (lr <= 0.0) throw Error("config: lr must be positive");
  if (beta1 <= 0.0 || beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0)
    throw Error("config: beta1/beta2 must be in (0,1)");
  if (eps <= 0.0) throw Error("config: eps must be positive");
  if (lr_decay <= 0.0 || lr_decay > 1.0)
    throw Error("config: lr_decay must be in (0,1]");
  if (dropout < 0.0 || dropout >= 1.0)
    throw Error("config: dropout must be in [0,1)");
  if (grl_lambda < 0.0) throw Error("config: grl_lambda must be >= 0");
  double sum = 0.0;
  for (double r : split_ratios) {
    if (r <= 0.0) throw Error("config: split ratios must be positive");
    sum += r;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw Error("config: split ratios must sum to 1");
}

Adamax::Adamax(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

bool Adamax::step(const std::vector<Tensor>& params) {
  for (const Tensor& p : params) {
    if (!p.requires_grad()) continue;
    for (double g : p.grad())
      if (!std::isfinite(g)) {
        ++skipped_;
        return false;
      }
  }
  ++t_;
  const double lr_bias = lr_ / (1.0 - std::pow(beta1_, t_));
  for (const Tensor& p : params) {
    if (!p.requires_grad()) continue;
    Node* node = p.raw();
    Slot& slot = state_[node];
    if (slot.m.empty()) {
      slot.m.assign(node->value.size(), 0.0);
      slot.u.assign(node->value.size(), 0.0);
    }
    kernels::active().adamax(node->value.data(), slot.m.data(), slot.u.data(),
                             node->grad.data(), node->value.size(), beta1_,
                             beta2_, lr_bias, eps_);
  }
  return true;
}

double lr_decay_check(const std::vector<double>& history, double lr,
                      double decay) {
  if (history.empty()) throw Error("lr_decay_check: empty history");
  if (history.size() < 2) return lr;
  double best_prev = history[0];
  for (std::size_t i = 0; i + 1 < history.size(); ++i)
    best_prev = std::max(best_prev, history[i]);
  return history.back() <= best_prev ? lr * decay : lr;
}

Tensor bce_with_logit(const Tensor& logit, double target) {
  if (logit.numel() != 1)
    throw Error("bce_with_logit: logit must be scalar-shaped, got " +
                shape_str(logit.shape()));
  Tensor z = logit.rank() == 1 ? logit : ops::reshape(logit, {1});
  Tensor pos = ops::relu(z);
  Tensor neg_abs =
      ops::scale(ops::add(pos, ops::relu(ops::scale(z, -1.0))), -1.0);
  Tensor softplus =
      ops::log_sum_exp(ops::concat({Tensor::scalar(0.0), neg_abs}, 0), 0);
  return ops::add(ops::add(pos, ops::scale(z, -target)), softplus);
}

Tensor identify_loss(const GceModel& model, const Sentence& s, RngStream& rng) {
  if (!s.causal.has_value())
    throw Error("identify_loss: sentence carries no label");
  EncodedSentence enc = encode_sentence(model, s, Mode::kTrain, &rng);
  return bce_with_logit(classify_logit(model, enc.sentence_vec),
                        *s.causal ? 1.0 : 0.0);
}

Tensor localise_loss(const GceModel& model, const Sentence& s, RngStream& rng) {
  if (!s.tags.has_value())
    throw Error("localise_loss: sentence carries no tag sequence");
  EncodedSentence enc = encode_sentence(model, s, Mode::kTrain, &rng);
  return crf_nll(emission_scores(model, enc), model.trans, *s.tags,
                 tags::mask());
}

namespace {

Tensor mean_of(std::vector<Tensor> losses) {
  Tensor acc = losses[0];
  for (std::size_t i = 1; i < losses.size(); ++i)
    acc = ops::add(acc, losses[i]);
  return ops::scale(acc, 1.0 / static_cast<double>(losses.size()));
}

double sigmoid_value(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Tensor task_loss_for(const GceModel& model, const Sentence& s, Task task,
                     const EncodedSentence& enc) {
  if (task == Task::kIdentify) {
    if (!s.causal.has_value())
      throw Error("ace_objective: source sentence carries no label");
    return bce_with_logit(classify_logit(model, enc.sentence_vec),
                          *s.causal ? 1.0 : 0.0);
  }
  if (!s.tags.has_value())
    throw Error("ace_objective: source sentence carries no tag sequence");
  return crf_nll(emission_scores(model, enc), model.trans, *s.tags,
                 tags::mask());
}

void require_task_data(const std::vector<Sentence>& data, Task task,
                       const char* who) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (task == Task::kIdentify && !data[i].causal.has_value())
      throw Error(std::string(who) + ": task identify needs labels, sentence " +
                  std::to_string(i) + " has none");
    if (task == Task::kLocalise && !data[i].tags.has_value())
      throw Error(std::string(who) +
                  ": task localise needs tag sequences, sentence " +
                  std::to_string(i) + " has none");
  }
}

}  // namespace

AceObjective ace_objective(const GceModel& model, const AceBatch& batch,
                           Task task, const TrainConfig& cfg, RngStream& rng,
                           double lambda) {
  if (batch.source.empty())
    throw Error("ace_objective: batch has no source examples");
  (void)cfg;
  AceObjective result;
  std::vector<Tensor> task_losses;
  std::vector<Tensor> domain_losses;
  task_losses.reserve(batch.source.size());
  domain_losses.reserve(batch.source.size() + batch.target.size());

  auto domain_term = [&](const EncodedSentence& enc, bool is_source) {
    Tensor features = ops::grad_reverse(enc.sentence_vec, lambda);
    Tensor logit = domain_logit(model, features);
    domain_losses.push_back(bce_with_logit(logit, is_source ? 1.0 : 0.0));
    const bool predicted_source = sigmoid_value(logit.value()[0]) >= 0.5;
    result.domain_correct += predicted_source == is_source ? 1 : 0;
    ++result.domain_total;
  };

  for (const Sentence* s : batch.source) {
    EncodedSentence enc = encode_sentence(model, *s, Mode::kTrain, &rng);
    task_losses.push_back(task_loss_for(model, *s, task, enc));
    domain_term(enc, true);
  }
  for (const Sentence* s : batch.target) {
    EncodedSentence enc = encode_sentence(model, *s, Mode::kTrain, &rng);
    domain_term(enc, false);
  }

  result.loss = ops::add(mean_of(std::move(task_losses)),
                         mean_of(std::move(domain_losses)));
  return result;
}

TrainState::TrainState(const TrainConfig& cfg)
    : opt(cfg.lr, cfg.beta1, cfg.beta2, cfg.eps),
      shuffle("shuffle", cfg.seed),
      dropout("dropout", cfg.seed),
      lr(cfg.lr) {}

MetricsReport evaluate_task(const GceModel& model,
                            const std::vector<Sentence>& data, Task task) {
  if (task == Task::kIdentify) {
    std::vector<bool> preds, golds;
    preds.reserve(data.size());
    golds.reserve(data.size());
    for (const Sentence& s : data) {
      if (!s.causal.has_value())
        throw Error("evaluate_task: unlabeled sentence in identify data");
      preds.push_back(identify_probability(model, s) >= 0.5);
      golds.push_back(*s.causal);
    }
    return classification_prf(preds, golds);
  }
  std::vector<TagSequence> preds, golds;
  preds.reserve(data.size());
  golds.reserve(data.size());
  for (const Sentence& s : data) {
    if (!s.tags.has_value())
      throw Error("evaluate_task: untagged sentence in localise data");
    preds.push_back(predict_tags(model, s));
    golds.push_back(*s.tags);
  }
  return token_prf(preds, golds);
}

EpochStats gce_train_epoch(GceModel& model, const std::vector<Sentence>& train,
                           const std::vector<Sentence>& dev, Task task,
                           const TrainConfig& cfg, TrainState& state) {
  if (train.empty()) throw Error("gce_train_epoch: empty training data");
  require_task_data(train, task, "gce_train_epoch");
  require_task_data(dev, task, "gce_train_epoch");
  ++state.epoch;

  std::vector<int> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  state.shuffle.shuffle(order);

  const auto params = model.parameters();
  state.opt.set_lr(state.lr);
  EpochStats stats;
  stats.lr = state.lr;
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < order.size();
       start += cfg.batch_size) {
    const std::size_t stop =
        std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
    std::vector<Tensor> losses;
    losses.reserve(stop - start);
    for (std::size_t i = start; i < stop; ++i) {
      const Sentence& s = train[order[i]];
      losses.push_back(task == Task::kIdentify
                           ? identify_loss(model, s, state.dropout)
                           : localise_loss(model, s, state.dropout));
    }
    Tensor batch_loss = mean_of(std::move(losses));
    loss_sum += batch_loss.item() * static_cast<double>(stop - start);
    model.zero_grad();
    backward(batch_loss);
    if (state.opt.step(params)) ++stats.updates;
  }
  stats.mean_loss = loss_sum / static_cast<double>(train.size());
  stats.dev = evaluate_task(model, dev, task);
  return stats;
}

EpochStats ace_train_epoch(GceModel& model,
                           const std::vector<Sentence>& source_train,
                           const std::vector<Sentence>& target_train,
                           const std::vector<Sentence>& source_dev, Task task,
                           const TrainConfig& cfg, TrainState& state) {
  if (source_train.empty() || target_train.empty())
    throw Error("ace_train_epoch: source and target data must be non-empty");
  require_task_data(source_train, task, "ace_train_epoch");
  require_task_data(source_dev, task, "ace_train_epoch");
  ++state.epoch;

  const double lambda =
      cfg.grl_warmup ? cfg.grl_lambda * static_cast<double>(state.epoch) /
                           static_cast<double>(cfg.epochs)
                     : cfg.grl_lambda;

  std::vector<int> src_order(source_train.size());
  for (std::size_t i = 0; i < src_order.size(); ++i)
    src_order[i] = static_cast<int>(i);
  state.shuffle.shuffle(src_order);
  std::vector<int> tgt_order(target_train.size());
  for (std::size_t i = 0; i < tgt_order.size(); ++i)
    tgt_order[i] = static_cast<int>(i);
  state.shuffle.shuffle(tgt_order);

  const auto params = model.parameters();
  state.opt.set_lr(state.lr);
  EpochStats stats;
  stats.lr = state.lr;
  double loss_sum = 0.0;
  long domain_correct = 0, domain_total = 0;
  std::size_t tgt_pos = 0;
  std::size_t batches = 0;
  for (std::size_t start = 0; start < src_order.size();
       start += cfg.batch_size) {
    const std::size_t stop = std::min(
        src_order.size(), start + static_cast<std::size_t>(cfg.batch_size));
    AceBatch batch;
    for (std::size_t i = start; i < stop; ++i)
      batch.source.push_back(&source_train[src_order[i]]);
    for (std::size_t i = start; i < stop; ++i) {
      batch.target.push_back(&target_train[tgt_order[tgt_pos]]);
      tgt_pos = (tgt_pos + 1) % tgt_order.size();  // cycle shorter target
    }
    AceObjective obj =
        ace_objective(model, batch, task, cfg, state.dropout, lambda);
    loss_sum += obj.loss.item();
    domain_correct += obj.domain_correct;
    domain_total += obj.domain_total;
    model.zero_grad();
    backward(obj.loss);
    if (state.opt.step(params)) ++stats.updates;
    ++batches;
  }
  stats.mean_loss = loss_sum / static_cast<double>(batches);
  stats.domain_accuracy =
      static_cast<double>(domain_correct) / static_cast<double>(domain_total);
  stats.dev = evaluate_task(model, source_dev, task);
  return stats;
}

namespace {

void write_log_line(std::ostream* log, int epoch, const EpochStats& st) {
  if (!log) return;
  char buf[160];
  char dom[16];
  if (st.domain_accuracy < 0.0) {
    std::snprintf(dom, sizeof(dom), "-");
  } else {
    std::snprintf(dom, sizeof(dom), "%.4f", st.domain_accuracy);
  }
  std::snprintf(buf, sizeof(buf), "%d\t%.6f\t%s\t%.4f\t%.4f\t%.4f\t%.8f\n",
                epoch, st.mean_loss, dom, st.dev.precision, st.dev.recall,
                st.dev.f1, st.lr);
  *log << buf;
  log->flush();
}

void snapshot_params(const GceModel& model, std::vector<std::vector<double>>* out) {
  out->clear();
  for (const auto& [name, t] : model.named_parameters())
    out->emplace_back(t.value().begin(), t.value().end());
}

void restore_params(GceModel& model, const std::vector<std::vector<double>>& snap) {
  if (snap.empty()) return;
  const auto& named = model.named_parameters();
  for (std::size_t i = 0; i < named.size(); ++i) {
    Tensor t = named[i].second;
    std::copy(snap[i].begin(), snap[i].end(), t.mutable_value().begin());
  }
}

template <typename EpochFn>
TrainResult run_training(GceModel& model, const TrainConfig& cfg,
                         std::ostream* log, EpochFn&& epoch_fn) {
  cfg.validate();
  if (log) *log << "# epoch\tloss\tdomain_acc\tdev_p\tdev_r\tdev_f1\tlr\n";
  TrainState state(cfg);
  TrainResult result;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochStats st = epoch_fn(state);
    state.dev_f1_history.push_back(st.dev.f1);
    write_log_line(log, epoch, st);
    result.history.push_back(st);
    ++result.epochs_run;
    if (st.dev.f1 > state.best_f1) {
      state.best_f1 = st.dev.f1;
      state.best_epoch = epoch;
      snapshot_params(model, &state.best_params);
    }
    state.lr = lr_decay_check(state.dev_f1_history, state.lr, cfg.lr_decay);
    if (st.dev.f1 >= cfg.early_stop_f1) break;
  }
  restore_params(model, state.best_params);
  result.best_dev_f1 = state.best_f1;
  result.best_epoch = state.best_epoch;
  return result;
}

}  // namespace

TrainResult run_gce_training(GceModel& model, const std::vector<Sentence>& train,
                             const std::vector<Sentence>& dev, Task task,
                             const TrainConfig& cfg, std::ostream* log) {
  return run_training(model, cfg, log, [&](TrainState& state) {
    return gce_train_epoch(model, train, dev, task, cfg, state);
  });
}

TrainResult run_ace_training(GceModel& model,
                             const std::vector<Sentence>& source_train,
                             const std::vector<Sentence>& target_train,
                             const std::vector<Sentence>& source_dev, Task task,
                             const TrainConfig& cfg, std::ostream* log) {
  return run_training(model, cfg, log, [&](TrainState& state) {
    return ace_train_epoch(model, source_train, target_train, source_dev, task,
                           cfg, state);
  });
}

Vocab build_vocab(const std::vector<const std::vector<Sentence>*>& corpora) {
  Vocab v;
  for (const auto* corpus : corpora)
    for (const Sentence& s : *corpus)
      for (const std::string& tok : s.tokens) v.add(tok);
  return v;
}

}  // namespace ace
