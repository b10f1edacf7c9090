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

#ifndef ACE_ENCODER_HPP_
#define ACE_ENCODER_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ace/data.hpp"
#include "ace/graph.hpp"
#include "ace/rng.hpp"
#include "ace/tensor.hpp"

namespace ace {

// Token inventory with index 0 reserved for the unknown token.
class Vocab {
 public:
  static constexpr int kUnkId = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocab();
  int add(std::string_view token);          // inserts if absent
  int lookup(std::string_view token) const; // kUnkId for unseen tokens
  bool contains(std::string_view token) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  static Vocab from_tokens(const std::vector<std::string>& tokens);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct ModelConfig {
  int emb_dim = 300;
  int hidden = 100;       // LSTM hidden size H; token states are 2H wide
  int gcn_layers = 2;
  int fusion_hidden = 100;
  int fusion_out = 100;
  double dropout = 0.5;
  bool freeze_embeddings = false;
  std::string task = "identify";  // which head the checkpoint was trained for

  int token_width() const { return 2 * hidden; }
  int fusion_in() const { return 2 * token_width(); }
};

// All named parameters of the encoder and its heads. Construction draws
// every weight from the "init" stream in registry order, so models are a
// pure function of (config, vocab, seed).
class GceModel {
 public:
  struct LstmDir {
    Tensor w_xi, w_hi, b_i;
    Tensor w_xf, w_hf, b_f;
    Tensor w_xo, w_ho, b_o;
    Tensor w_xg, w_hg, b_g;
  };

  GceModel(ModelConfig config, Vocab vocab, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ModelConfig& config() { return config_; }
  const Vocab& vocab() const { return vocab_; }

  // Registry in fixed creation order; pairs of (name, tensor).
  const std::vector<std::pair<std::string, Tensor>>& named_parameters() const {
    return registry_;
  }
  std::vector<Tensor> parameters() const;
  Tensor param(const std::string& name) const;  // throws on unknown name
  void zero_grad();

  Tensor embedding;
  LstmDir fwd, bwd;
  std::vector<Tensor> gcn_w, gcn_b;
  Tensor fusion_w1, fusion_b1, fusion_w2, fusion_b2;
  Tensor w_class, b_class;
  Tensor emit_w, emit_b, trans;
  Tensor w_dom, b_dom;

 private:
  Tensor make_param(const std::string& name, Shape shape, RngStream& rng,
                    double bias_fill = 0.0, bool is_bias = false);

  ModelConfig config_;
  Vocab vocab_;
  std::vector<std::pair<std::string, Tensor>> registry_;
};

enum class Mode { kTrain, kInfer };

// Per-token GCN outputs plus the pooled and fused sentence representations.
struct EncodedSentence {
  Tensor token_states;     // {n, 2H}, final GCN layer
  Tensor bilstm_states;    // {n, 2H}
  Tensor bilstm_sentence;  // {1, 2H}, [rightmost fwd ; leftmost bwd]
  Tensor pooled;           // {1, 2H}, elementwise max over tokens
  Tensor sentence_vec;     // {1, fusion_out}
};

// Embedding rows for a token sequence; unknown tokens hit the UNK row.
Tensor embed_lookup(const GceModel& model, const std::vector<std::string>& tokens);

// Standard BiLSTM over embedded tokens (zero initial states). Returns
// per-token [fwd ; bwd] states {n, 2H} and the sentence state {1, 2H}.
std::pair<Tensor, Tensor> bilstm_forward(const GceModel& model,
                                         const Tensor& emb);

// One graph-convolution layer: relu(D^-1 A~ (h W) + b).
Tensor gcn_layer(const Tensor& w, const Tensor& b, const Tensor& norm_adj,
                 const Tensor& h_prev);
Tensor gcn_layer(const Tensor& w, const Tensor& b, const AdjMatrix& adj,
                 const Tensor& h_prev);

// The shared fusion feed-forward (tanh hidden layer + linear out), applied
// to {rows, 4H} inputs row-wise.
Tensor fusion_forward(const GceModel& model, const Tensor& x);

// Full encoder pipeline. Training mode applies dropout from `dropout_rng`
// after the embedding, the BiLSTM and every GCN layer but the last;
// inference is deterministic and needs no stream.
EncodedSentence encode_sentence(const GceModel& model, const Sentence& sentence,
                                Mode mode, RngStream* dropout_rng = nullptr);

// -- Checkpoints ---------------------------------------------------------------

// Single-document JSON checkpoint: format_version, hyperparameters,
// vocabulary, tag inventory, and every named tensor as shape + row-major
// values (full round-trip precision).
void save_checkpoint(const GceModel& model, const std::string& path);
GceModel load_checkpoint(const std::string& path);

// Overwrites embedding rows of vocabulary words present in the table; the
// UNK row becomes the mean of all loaded vectors.
void init_from_pretrained(GceModel& model, const EmbeddingTable& table);

}  // namespace ace

#endif  // ACE_ENCODER_HPP_
