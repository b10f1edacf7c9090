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

// Command-line front end: corpus generation, the two training regimes,
// prediction, evaluation and feature export.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ace/data.hpp"
#include "ace/encoder.hpp"
#include "ace/eval.hpp"
#include "ace/heads.hpp"
#include "ace/tagging.hpp"
#include "ace/training.hpp"

namespace {

using namespace ace;

struct RunConfig {
  TrainConfig train;
  ModelConfig model;
};

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value, const std::string& where) {
  auto as_int = [&]() { return std::stoi(value); };
  auto as_double = [&]() { return std::stod(value); };
  auto as_u64 = [&]() { return std::stoull(value); };
  auto as_bool = [&]() {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw Error(where + ": boolean expected for " + key + ", got " + value);
  };
  try {
    if (key == "epochs") cfg.train.epochs = as_int();
    else if (key == "batch_size") cfg.train.batch_size = as_int();
    else if (key == "lr") cfg.train.lr = as_double();
    else if (key == "beta1") cfg.train.beta1 = as_double();
    else if (key == "beta2") cfg.train.beta2 = as_double();
    else if (key == "eps") cfg.train.eps = as_double();
    else if (key == "lr_decay") cfg.train.lr_decay = as_double();
    else if (key == "dropout") {
      cfg.train.dropout = as_double();
      cfg.model.dropout = cfg.train.dropout;
    } else if (key == "grl_lambda") cfg.train.grl_lambda = as_double();
    else if (key == "grl_warmup") cfg.train.grl_warmup = as_bool();
    else if (key == "seed") cfg.train.seed = as_u64();
    else if (key == "early_stop_f1") cfg.train.early_stop_f1 = as_double();
    else if (key == "emb_dim") cfg.model.emb_dim = as_int();
    else if (key == "hidden") cfg.model.hidden = as_int();
    else if (key == "gcn_layers") cfg.model.gcn_layers = as_int();
    else if (key == "fusion_hidden") cfg.model.fusion_hidden = as_int();
    else if (key == "fusion_out") cfg.model.fusion_out = as_int();
    else if (key == "freeze_embeddings") cfg.model.freeze_embeddings = as_bool();
    else throw Error(where + ": unknown config key \"" + key + "\"");
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(where + ": cannot parse value \"" + value + "\" for key " + key);
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    };
    strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(path + ":" + std::to_string(lineno) +
                  ": expected key = value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    strip(key);
    strip(value);
    apply_config_entry(cfg, key, value,
                       path + ":" + std::to_string(lineno));
  }
}

// Flags that override config-file values get registered against both the
// struct fields; CLI11 only writes them when present on the command line.
void add_train_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--epochs", cfg.train.epochs, "training epochs");
  cmd->add_option("--batch-size", cfg.train.batch_size, "batch size");
  cmd->add_option("--lr", cfg.train.lr, "Adamax learning rate");
  cmd->add_option("--lr-decay", cfg.train.lr_decay,
                  "decay factor on dev-F1 plateau");
  cmd->add_option("--seed", cfg.train.seed, "run seed");
  cmd->add_option("--early-stop-f1", cfg.train.early_stop_f1,
                  "stop once dev F1 reaches this value (>1 disables)");
  cmd->add_option("--grl-lambda", cfg.train.grl_lambda,
                  "gradient-reversal coefficient");
  cmd->add_flag("--grl-warmup", cfg.train.grl_warmup,
                "ramp the reversal coefficient linearly over epochs");
  cmd->add_option("--emb-dim", cfg.model.emb_dim, "embedding width");
  cmd->add_option("--hidden", cfg.model.hidden, "LSTM hidden size");
  cmd->add_option("--gcn-layers", cfg.model.gcn_layers, "GCN depth");
  cmd->add_option_function<double>(
      "--dropout",
      [&cfg](const double& v) {
        cfg.train.dropout = v;
        cfg.model.dropout = v;
      },
      "dropout rate");
  cmd->add_flag("--freeze-embeddings", cfg.model.freeze_embeddings,
                "do not fine-tune the embedding matrix");
}

std::string spans_to_display(const SpanSet& spans) {
  if (spans.empty()) return "-";
  std::ostringstream out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (i) out << ";";
    out << (spans[i].role == Role::kCause ? "C" : "E") << ":" << spans[i].start
        << "-" << spans[i].end;
  }
  return out.str();
}

int cmd_gen_synth(const std::string& domain, int n, std::uint64_t seed,
                  const std::string& out_path) {
  const auto sentences = generate_synthetic(domain_from_string(domain), n, seed);
  write_corpus(out_path, sentences);
  std::cerr << "wrote " << sentences.size() << " " << domain
            << " sentences to " << out_path << "\n";
  return 0;
}

int cmd_train(RunConfig cfg, const std::string& task_str,
              const std::string& train_path, const std::string& dev_path,
              const std::string& out_path, std::string log_path,
              const std::string& embeddings_path) {
  cfg.train.validate();
  const Task task = task_from_string(task_str);
  const auto train_data = parse_corpus(train_path);
  const auto dev_data = parse_corpus(dev_path);
  Vocab vocab = build_vocab({&train_data});
  cfg.model.task = task_str;
  GceModel model(cfg.model, std::move(vocab), cfg.train.seed);
  if (!embeddings_path.empty())
    init_from_pretrained(model, load_embeddings(embeddings_path));
  if (log_path.empty()) log_path = out_path + ".log";
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw Error("cannot open log for writing: " + log_path);
  const TrainResult result =
      run_gce_training(model, train_data, dev_data, task, cfg.train, &log);
  save_checkpoint(model, out_path);
  std::cerr << "best dev F1 " << result.best_dev_f1 << " at epoch "
            << result.best_epoch << " (" << result.epochs_run
            << " epochs run); checkpoint " << out_path << "\n";
  return 0;
}

int cmd_train_ace(RunConfig cfg, const std::string& task_str,
                  const std::string& source_path, const std::string& target_path,
                  const std::string& dev_path, const std::string& out_path,
                  std::string log_path, const std::string& embeddings_path) {
  cfg.train.validate();
  const Task task = task_from_string(task_str);
  const auto source_data = parse_corpus(source_path);
  const auto target_data = parse_corpus(target_path);
  const auto dev_data = parse_corpus(dev_path);
  // Target text is available (unlabeled), so its tokens enter the vocabulary.
  Vocab vocab = build_vocab({&source_data, &target_data});
  cfg.model.task = task_str;
  GceModel model(cfg.model, std::move(vocab), cfg.train.seed);
  if (!embeddings_path.empty())
    init_from_pretrained(model, load_embeddings(embeddings_path));
  if (log_path.empty()) log_path = out_path + ".log";
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw Error("cannot open log for writing: " + log_path);
  const TrainResult result = run_ace_training(model, source_data, target_data,
                                              dev_data, task, cfg.train, &log);
  save_checkpoint(model, out_path);
  std::cerr << "best source-dev F1 " << result.best_dev_f1 << " at epoch "
            << result.best_epoch << " (" << result.epochs_run
            << " epochs run); checkpoint " << out_path << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& input_path,
                const std::string& out_path, std::string task_str) {
  const GceModel model = load_checkpoint(model_path);
  if (task_str.empty()) task_str = model.config().task;
  const Task task = task_from_string(task_str);
  const auto data = parse_corpus(input_path);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot open output for writing: " + out_path);
  char buf[32];
  for (const Sentence& s : data) {
    if (task == Task::kIdentify) {
      const double p = identify_probability(model, s);
      std::snprintf(buf, sizeof(buf), "%.6f", p);
      out << (p >= 0.5 ? "causal" : "non-causal") << "\t" << buf << "\n";
    } else {
      const TagSequence tags = predict_tags(model, s);
      for (std::size_t i = 0; i < tags.size(); ++i)
        out << (i ? " " : "") << tags::name_of(tags[i]);
      out << "\t" << spans_to_display(iobes_to_spans(tags)) << "\n";
    }
  }
  if (!out) throw Error("failed writing predictions: " + out_path);
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             std::string task_str) {
  const GceModel model = load_checkpoint(model_path);
  if (task_str.empty()) task_str = model.config().task;
  const Task task = task_from_string(task_str);
  const auto data = parse_corpus(data_path);
  std::vector<std::pair<std::string, MetricsReport>> rows;
  if (task == Task::kIdentify) {
    rows.emplace_back("class", evaluate_task(model, data, task));
  } else {
    std::vector<TagSequence> pred_tags, gold_tags;
    std::vector<SpanSet> pred_spans, gold_spans;
    for (const Sentence& s : data) {
      if (!s.tags.has_value())
        throw Error("eval: untagged sentence in localise data");
      pred_tags.push_back(predict_tags(model, s));
      gold_tags.push_back(*s.tags);
      pred_spans.push_back(iobes_to_spans(pred_tags.back()));
      gold_spans.push_back(iobes_to_spans(gold_tags.back()));
    }
    rows.emplace_back("token", token_prf(pred_tags, gold_tags));
    rows.emplace_back("span", span_prf(pred_spans, gold_spans));
  }
  std::cout << format_metrics_table(rows);
  return 0;
}

int cmd_export_features(const std::string& model_path,
                        const std::string& data_path,
                        const std::string& out_path) {
  const GceModel model = load_checkpoint(model_path);
  const auto data = parse_corpus(data_path);
  export_features(model, data, out_path);
  std::cerr << "wrote " << data.size() << " feature rows to " << out_path
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causality identification and localisation toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env_seed = std::getenv("ACE_SEED")) {
    try {
      cfg.train.seed = std::stoull(env_seed);
    } catch (const std::exception&) {
      std::cerr << "error: ACE_SEED is not an integer: " << env_seed << "\n";
      return 1;
    }
  }
  // Config file values load before flag parsing so explicit flags win.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        load_config_file(cfg, argv[i + 1]);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
      }
    }
  }

  std::string domain, task, train_path, dev_path, source_path, target_path;
  std::string model_path, input_path, data_path, out_path, log_path;
  std::string embeddings_path, config_path;
  int n = 0;

  auto* gen = app.add_subcommand("gen-synth", "generate a synthetic corpus");
  gen->add_option("--domain", domain, "medical|financial")->required();
  gen->add_option("--n", n, "number of sentences")->required();
  gen->add_option("--seed", cfg.train.seed, "generator seed");
  gen->add_option("--out", out_path, "corpus file to write")->required();

  auto* train = app.add_subcommand("train", "supervised training");
  train->add_option("--task", task, "identify|localise")->required();
  train->add_option("--train", train_path, "training corpus")->required();
  train->add_option("--dev", dev_path, "development corpus")->required();
  train->add_option("--config", config_path, "key = value config file");
  train->add_option("--out", out_path, "checkpoint to write")->required();
  train->add_option("--log", log_path, "epoch log (default <out>.log)");
  train->add_option("--embeddings", embeddings_path,
                    "pretrained word vectors (text format)");
  add_train_flags(train, cfg);

  auto* ace_cmd = app.add_subcommand("train-ace", "adversarial training");
  ace_cmd->add_option("--task", task, "identify|localise")->required();
  ace_cmd->add_option("--source", source_path, "labeled source corpus")
      ->required();
  ace_cmd->add_option("--target", target_path, "unlabeled target corpus")
      ->required();
  ace_cmd->add_option("--dev", dev_path, "labeled source dev corpus")
      ->required();
  ace_cmd->add_option("--config", config_path, "key = value config file");
  ace_cmd->add_option("--out", out_path, "checkpoint to write")->required();
  ace_cmd->add_option("--log", log_path, "epoch log (default <out>.log)");
  ace_cmd->add_option("--embeddings", embeddings_path,
                      "pretrained word vectors (text format)");
  add_train_flags(ace_cmd, cfg);

  auto* predict = app.add_subcommand("predict", "run a saved model");
  predict->add_option("--model", model_path, "checkpoint")->required();
  predict->add_option("--input", input_path, "corpus to annotate")->required();
  predict->add_option("--out", out_path, "prediction file")->required();
  predict->add_option("--task", task, "override the checkpoint task");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model");
  eval_cmd->add_option("--model", model_path, "checkpoint")->required();
  eval_cmd->add_option("--data", data_path, "gold corpus")->required();
  eval_cmd->add_option("--task", task, "override the checkpoint task");

  auto* exp = app.add_subcommand("export-features",
                                 "dump fused sentence representations");
  exp->add_option("--model", model_path, "checkpoint")->required();
  exp->add_option("--data", data_path, "corpus to encode")->required();
  exp->add_option("--out", out_path, "feature file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen_synth(domain, n, cfg.train.seed, out_path);
    if (train->parsed())
      return cmd_train(cfg, task, train_path, dev_path, out_path, log_path,
                       embeddings_path);
    if (ace_cmd->parsed())
      return cmd_train_ace(cfg, task, source_path, target_path, dev_path,
                           out_path, log_path, embeddings_path);
    if (predict->parsed())
      return cmd_predict(model_path, input_path, out_path, task);
    if (eval_cmd->parsed()) return cmd_eval(model_path, data_path, task);
    if (exp->parsed())
      return cmd_export_features(model_path, data_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
