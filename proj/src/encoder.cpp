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

#include "ace/encoder.hpp"

#include <cmath>
#include <fstream>

#include "ace/autodiff.hpp"
#include "ace/tagging.hpp"
#include "json.hpp"

namespace ace {

Vocab::Vocab() { add(kUnkToken); }

int Vocab::add(std::string_view token) {
  auto it = index_.find(std::string(token));
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), id);
  return id;
}

int Vocab::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkId : it->second;
}

bool Vocab::contains(std::string_view token) const {
  return index_.count(std::string(token)) != 0;
}

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.empty() || tokens[0] != kUnkToken)
    throw Error("vocab: token list must start with " + std::string(kUnkToken));
  Vocab v;
  for (std::size_t i = 1; i < tokens.size(); ++i) v.add(tokens[i]);
  if (v.size() != static_cast<int>(tokens.size()))
    throw Error("vocab: duplicate tokens in saved vocabulary");
  return v;
}

namespace {

Tensor draw_weight(const std::string& name, Shape shape, int fan_in,
                   RngStream& rng, bool requires_grad) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = rng.next_double(-bound, bound);
  return Tensor::leaf(std::move(shape), std::move(v), requires_grad, name);
}

}  // namespace

GceModel::GceModel(ModelConfig config, Vocab vocab, std::uint64_t seed)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  if (config_.emb_dim < 1 || config_.hidden < 1 || config_.gcn_layers < 0 ||
      config_.fusion_hidden < 1 || config_.fusion_out < 1)
    throw Error("model config: non-positive dimension");
  RngStream rng("init", seed);
  const int d = config_.emb_dim;
  const int h = config_.hidden;
  const int tw = config_.token_width();

  auto weight = [&](const std::string& name, Shape shape, int fan_in) {
    Tensor t = draw_weight(name, std::move(shape), fan_in, rng, true);
    registry_.emplace_back(name, t);
    return t;
  };
  auto bias = [&](const std::string& name, int dim, double fill) {
    Tensor t = Tensor::leaf({dim}, std::vector<double>(dim, fill), true, name);
    registry_.emplace_back(name, t);
    return t;
  };

  // Embedding rows are scaled by the vector width, not the vocab size.
  embedding = draw_weight("embedding", {vocab_.size(), d}, d, rng,
                          !config_.freeze_embeddings);
  registry_.emplace_back("embedding", embedding);

  auto lstm_dir = [&](const std::string& prefix) {
    LstmDir dir;
    dir.w_xi = weight(prefix + ".w_xi", {d, h}, d);
    dir.w_hi = weight(prefix + ".w_hi", {h, h}, h);
    dir.b_i = bias(prefix + ".b_i", h, 0.0);
    dir.w_xf = weight(prefix + ".w_xf", {d, h}, d);
    dir.w_hf = weight(prefix + ".w_hf", {h, h}, h);
    dir.b_f = bias(prefix + ".b_f", h, 1.0);  // open forget gates at init
    dir.w_xo = weight(prefix + ".w_xo", {d, h}, d);
    dir.w_ho = weight(prefix + ".w_ho", {h, h}, h);
    dir.b_o = bias(prefix + ".b_o", h, 0.0);
    dir.w_xg = weight(prefix + ".w_xg", {d, h}, d);
    dir.w_hg = weight(prefix + ".w_hg", {h, h}, h);
    dir.b_g = bias(prefix + ".b_g", h, 0.0);
    return dir;
  };
  fwd = lstm_dir("lstm.fwd");
  bwd = lstm_dir("lstm.bwd");

  for (int l = 0; l < config_.gcn_layers; ++l) {
    const std::string p = "gcn." + std::to_string(l);
    gcn_w.push_back(weight(p + ".w", {tw, tw}, tw));
    gcn_b.push_back(bias(p + ".b", tw, 0.0));
  }

  fusion_w1 = weight("fusion.w1", {config_.fusion_in(), config_.fusion_hidden},
                     config_.fusion_in());
  fusion_b1 = bias("fusion.b1", config_.fusion_hidden, 0.0);
  fusion_w2 = weight("fusion.w2", {config_.fusion_hidden, config_.fusion_out},
                     config_.fusion_hidden);
  fusion_b2 = bias("fusion.b2", config_.fusion_out, 0.0);

  w_class = weight("classifier.w", {config_.fusion_out, 1}, config_.fusion_out);
  b_class = bias("classifier.b", 1, 0.0);

  emit_w = weight("crf.emit.w", {config_.fusion_out, tags::kNumTags},
                  config_.fusion_out);
  emit_b = bias("crf.emit.b", tags::kNumTags, 0.0);
  const int full = tags::kNumTags + 2;
  trans = weight("crf.trans", {full, full}, full);

  w_dom = weight("domain.w", {config_.fusion_out, 1}, config_.fusion_out);
  b_dom = bias("domain.b", 1, 0.0);
}

std::vector<Tensor> GceModel::parameters() const {
  std::vector<Tensor> out;
  out.reserve(registry_.size());
  for (const auto& [name, t] : registry_) out.push_back(t);
  return out;
}

Tensor GceModel::param(const std::string& name) const {
  for (const auto& [n, t] : registry_)
    if (n == name) return t;
  throw Error("unknown parameter: " + name);
}

void GceModel::zero_grad() {
  for (auto& [name, t] : registry_) {
    Tensor copy = t;
    copy.zero_grad();
  }
}

Tensor embed_lookup(const GceModel& model,
                    const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw Error("embed_lookup: empty sentence");
  std::vector<int> ids(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    ids[i] = model.vocab().lookup(tokens[i]);
  return ops::embedding_lookup(model.embedding, ids);
}

namespace {

std::vector<Tensor> lstm_direction(const GceModel::LstmDir& dir,
                                   const Tensor& emb, bool reverse) {
  const int n = emb.rows();
  const int h = dir.b_i.numel();
  Tensor hidden = Tensor::zeros({1, h});
  Tensor cell = Tensor::zeros({1, h});
  std::vector<Tensor> states(n);
  for (int step = 0; step < n; ++step) {
    const int t = reverse ? n - 1 - step : step;
    const int ids[1] = {t};
    Tensor x = ops::embedding_lookup(emb, ids);
    auto gate = [&](const Tensor& wx, const Tensor& wh, const Tensor& b) {
      return ops::add(ops::add(ops::matmul(x, wx), ops::matmul(hidden, wh)), b);
    };
    Tensor in_gate = ops::sigmoid(gate(dir.w_xi, dir.w_hi, dir.b_i));
    Tensor forget = ops::sigmoid(gate(dir.w_xf, dir.w_hf, dir.b_f));
    Tensor out_gate = ops::sigmoid(gate(dir.w_xo, dir.w_ho, dir.b_o));
    Tensor cand = ops::tanh(gate(dir.w_xg, dir.w_hg, dir.b_g));
    cell = ops::add(ops::mul(forget, cell), ops::mul(in_gate, cand));
    hidden = ops::mul(out_gate, ops::tanh(cell));
    states[t] = hidden;
  }
  return states;
}

}  // namespace

std::pair<Tensor, Tensor> bilstm_forward(const GceModel& model,
                                         const Tensor& emb) {
  if (emb.rank() != 2 || emb.cols() != model.config().emb_dim)
    throw Error("bilstm_forward: expected {n," +
                std::to_string(model.config().emb_dim) + "} input, got " +
                shape_str(emb.shape()));
  const int n = emb.rows();
  auto fwd_states = lstm_direction(model.fwd, emb, false);
  auto bwd_states = lstm_direction(model.bwd, emb, true);
  std::vector<Tensor> rows(n);
  for (int t = 0; t < n; ++t)
    rows[t] = ops::concat({fwd_states[t], bwd_states[t]}, 1);
  Tensor token_states = n == 1 ? rows[0] : ops::concat(rows, 0);
  Tensor sentence = ops::concat({fwd_states[n - 1], bwd_states[0]}, 1);
  return {token_states, sentence};
}

Tensor gcn_layer(const Tensor& w, const Tensor& b, const Tensor& norm_adj,
                 const Tensor& h_prev) {
  if (norm_adj.rank() != 2 || norm_adj.rows() != norm_adj.cols() ||
      norm_adj.rows() != h_prev.rows())
    throw Error("gcn_layer: adjacency " + shape_str(norm_adj.shape()) +
                " does not match states " + shape_str(h_prev.shape()));
  return ops::relu(ops::add(ops::matmul(norm_adj, ops::matmul(h_prev, w)), b));
}

Tensor gcn_layer(const Tensor& w, const Tensor& b, const AdjMatrix& adj,
                 const Tensor& h_prev) {
  return gcn_layer(w, b, normalized_adjacency(adj), h_prev);
}

Tensor fusion_forward(const GceModel& model, const Tensor& x) {
  Tensor hidden =
      ops::tanh(ops::add(ops::matmul(x, model.fusion_w1), model.fusion_b1));
  return ops::add(ops::matmul(hidden, model.fusion_w2), model.fusion_b2);
}

EncodedSentence encode_sentence(const GceModel& model, const Sentence& sentence,
                                Mode mode, RngStream* dropout_rng) {
  const bool training = mode == Mode::kTrain;
  const double rate = model.config().dropout;
  if (training && rate > 0.0 && !dropout_rng)
    throw Error("encode_sentence: training mode requires a dropout stream");
  auto drop = [&](const Tensor& x) {
    if (!training || rate <= 0.0) return x;
    return ops::dropout(x, rate, *dropout_rng, true);
  };

  const DepTree tree = validate_tree(sentence.heads);
  if (tree.n != sentence.size())
    throw Error("encode_sentence: heads/token length mismatch");

  Tensor emb = drop(embed_lookup(model, sentence.tokens));
  auto [bilstm_states, bilstm_sentence] = bilstm_forward(model, emb);

  Tensor h = drop(bilstm_states);
  if (model.config().gcn_layers > 0) {
    const Tensor norm_adj = normalized_adjacency(build_adjacency(tree));
    for (int l = 0; l < model.config().gcn_layers; ++l) {
      h = gcn_layer(model.gcn_w[l], model.gcn_b[l], norm_adj, h);
      if (l + 1 < model.config().gcn_layers) h = drop(h);
    }
  }

  EncodedSentence enc;
  enc.token_states = h;
  enc.bilstm_states = bilstm_states;
  enc.bilstm_sentence = bilstm_sentence;
  enc.pooled = ops::max_pool(h, 0);
  enc.sentence_vec =
      fusion_forward(model, ops::concat({enc.pooled, bilstm_sentence}, 1));
  return enc;
}

// -- Checkpoints ---------------------------------------------------------------

namespace {

using json = nlohmann::ordered_json;

}  // namespace

void save_checkpoint(const GceModel& model, const std::string& path) {
  const ModelConfig& c = model.config();
  json j;
  j["format_version"] = 1;
  j["config"] = {{"emb_dim", c.emb_dim},
                 {"hidden", c.hidden},
                 {"gcn_layers", c.gcn_layers},
                 {"fusion_hidden", c.fusion_hidden},
                 {"fusion_out", c.fusion_out},
                 {"dropout", c.dropout},
                 {"freeze_embeddings", c.freeze_embeddings},
                 {"task", c.task}};
  j["vocab"] = model.vocab().tokens();
  j["tags"] = tags::names();
  json params = json::object();
  for (const auto& [name, t] : model.named_parameters()) {
    params[name] = {{"shape", t.shape()},
                    {"values", std::vector<double>(t.value().begin(),
                                                   t.value().end())}};
  }
  j["params"] = std::move(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open checkpoint for writing: " + path);
  out << j.dump() << "\n";
  if (!out) throw Error("failed writing checkpoint: " + path);
}

GceModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("malformed checkpoint " + path + ": " + e.what());
  }
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
    throw Error("checkpoint " + path + ": unsupported format_version");
  const auto& jc = j.at("config");
  ModelConfig cfg;
  cfg.emb_dim = jc.at("emb_dim").get<int>();
  cfg.hidden = jc.at("hidden").get<int>();
  cfg.gcn_layers = jc.at("gcn_layers").get<int>();
  cfg.fusion_hidden = jc.at("fusion_hidden").get<int>();
  cfg.fusion_out = jc.at("fusion_out").get<int>();
  cfg.dropout = jc.at("dropout").get<double>();
  cfg.freeze_embeddings = jc.at("freeze_embeddings").get<bool>();
  cfg.task = jc.at("task").get<std::string>();

  const auto saved_tags = j.at("tags").get<std::vector<std::string>>();
  if (saved_tags != tags::names())
    throw Error("checkpoint " + path + ": tag inventory mismatch");

  Vocab vocab = Vocab::from_tokens(j.at("vocab").get<std::vector<std::string>>());
  GceModel model(cfg, std::move(vocab), /*seed=*/0);
  const auto& params = j.at("params");
  for (auto& [name, t] : model.named_parameters()) {
    if (!params.contains(name))
      throw Error("checkpoint " + path + ": missing parameter " + name);
    const auto& p = params.at(name);
    const auto shape = p.at("shape").get<Shape>();
    if (shape != t.shape())
      throw Error("checkpoint " + path + ": parameter " + name + " has shape " +
                  shape_str(shape) + ", expected " + shape_str(t.shape()));
    const auto values = p.at("values").get<std::vector<double>>();
    if (values.size() != t.value().size())
      throw Error("checkpoint " + path + ": parameter " + name +
                  " has wrong value count");
    Tensor copy = t;
    std::copy(values.begin(), values.end(), copy.mutable_value().begin());
  }
  return model;
}

void init_from_pretrained(GceModel& model, const EmbeddingTable& table) {
  if (table.dim != model.config().emb_dim)
    throw Error("pretrained vectors have dimension " +
                std::to_string(table.dim) + ", model expects " +
                std::to_string(model.config().emb_dim));
  auto values = model.embedding.mutable_value();
  const int d = table.dim;
  std::vector<double> mean(d, 0.0);
  for (const auto& [word, vec] : table.vectors) {
    for (int i = 0; i < d; ++i) mean[i] += vec[i];
    if (!model.vocab().contains(word)) continue;
    const int row = model.vocab().lookup(word);
    std::copy(vec.begin(), vec.end(), values.begin() + row * d);
  }
  if (!table.vectors.empty()) {
    for (int i = 0; i < d; ++i)
      values[Vocab::kUnkId * d + i] =
          mean[i] / static_cast<double>(table.vectors.size());
  }
}

}  // namespace ace
