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

#include "ace/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ace/graph.hpp"
#include "ace/rng.hpp"
#include "ace/tensor.hpp"

namespace ace {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void corpus_error(const std::string& origin, int line,
                               const std::string& what) {
  throw Error(origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<Sentence> parse_corpus_text(const std::string& text,
                                        const std::string& origin) {
  std::vector<Sentence> sentences;
  Sentence cur;
  std::vector<std::string> cur_tags;
  int block_start = 0;

  auto finish_block = [&](int line) {
    if (cur.tokens.empty()) return;
    const int n = cur.size();
    try {
      validate_tree(cur.heads);
    } catch (const Error& e) {
      corpus_error(origin, block_start, e.what());
    }
    const int missing = static_cast<int>(
        std::count(cur_tags.begin(), cur_tags.end(), "_"));
    if (missing == 0) {
      TagSequence seq(n);
      for (int i = 0; i < n; ++i) {
        try {
          seq[i] = tags::id_of(cur_tags[i]);
        } catch (const Error& e) {
          corpus_error(origin, block_start + i, e.what());
        }
      }
      if (!tags::sequence_legal(seq))
        corpus_error(origin, block_start,
                     "illegal tag transition in gold sequence");
      cur.tags = std::move(seq);
    } else if (missing != n) {
      corpus_error(origin, block_start,
                   "mixed \"_\" and tag values within one sentence");
    }
    sentences.push_back(std::move(cur));
    cur = Sentence{};
    cur_tags.clear();
    (void)line;
  };

  std::istringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      finish_block(lineno);
      continue;
    }
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        std::string value = line.substr(eq + 1);
        auto strip = [](std::string& s) {
          while (!s.empty() && s.front() == ' ') s.erase(s.begin());
          while (!s.empty() && s.back() == ' ') s.pop_back();
        };
        strip(key);
        strip(value);
        if (key == "label") {
          if (value == "causal")
            cur.causal = true;
          else if (value == "non-causal")
            cur.causal = false;
          else
            corpus_error(origin, lineno, "unknown label \"" + value + "\"");
        } else if (key == "domain") {
          cur.domain = value;
        }
      }
      continue;
    }
    const auto cols = split_ws(line);
    if (cols.size() != 4)
      corpus_error(origin, lineno,
                   "expected 4 columns (index form head tag), got " +
                       std::to_string(cols.size()));
    if (cur.tokens.empty()) block_start = lineno;
    int index = 0, head = 0;
    try {
      index = std::stoi(cols[0]);
      head = std::stoi(cols[2]);
    } catch (const std::exception&) {
      corpus_error(origin, lineno, "non-numeric index or head column");
    }
    if (index != cur.size() + 1)
      corpus_error(origin, lineno,
                   "token index " + cols[0] + " out of sequence");
    cur.tokens.push_back(cols[1]);
    cur.heads.push_back(head == 0 ? kRoot : head - 1);
    cur_tags.push_back(cols[3]);
  }
  finish_block(lineno + 1);
  return sentences;
}

std::vector<Sentence> parse_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus_text(buf.str(), path);
}

std::string corpus_to_text(const std::vector<Sentence>& sentences) {
  std::ostringstream out;
  for (std::size_t si = 0; si < sentences.size(); ++si) {
    const Sentence& s = sentences[si];
    if (s.size() == 0) throw Error("write_corpus: empty sentence");
    if (s.size() != static_cast<int>(s.heads.size()) ||
        (s.tags && static_cast<int>(s.tags->size()) != s.size()))
      throw Error("write_corpus: inconsistent sentence field lengths");
    if (s.causal.has_value())
      out << "# label=" << (*s.causal ? "causal" : "non-causal") << "\n";
    if (!s.domain.empty()) out << "# domain=" << s.domain << "\n";
    for (int i = 0; i < s.size(); ++i) {
      const std::string& tok = s.tokens[i];
      if (tok.empty() ||
          tok.find_first_of(" \t\n\r") != std::string::npos)
        throw Error("write_corpus: token with whitespace: \"" + tok + "\"");
      out << (i + 1) << " " << tok << " "
          << (s.heads[i] == kRoot ? 0 : s.heads[i] + 1) << " "
          << (s.tags ? tags::name_of((*s.tags)[i]) : std::string("_")) << "\n";
    }
    if (si + 1 < sentences.size()) out << "\n";
  }
  return out.str();
}

void write_corpus(const std::string& path,
                  const std::vector<Sentence>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open corpus for writing: " + path);
  out << corpus_to_text(sentences);
  if (!out) throw Error("failed writing corpus: " + path);
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embeddings: " + path);
  EmbeddingTable table;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_ws(line);
    if (first && cols.size() == 2) {
      // Optional "count dim" header.
      try {
        table.dim = std::stoi(cols[1]);
        first = false;
        continue;
      } catch (const std::exception&) {
        // fall through: a two-column record line
      }
    }
    first = false;
    if (cols.size() < 2)
      throw Error(path + ":" + std::to_string(lineno) +
                  ": expected word followed by vector values");
    const int d = static_cast<int>(cols.size()) - 1;
    if (table.dim == 0) table.dim = d;
    if (d != table.dim)
      throw Error(path + ":" + std::to_string(lineno) + ": dimension " +
                  std::to_string(d) + " differs from established dimension " +
                  std::to_string(table.dim));
    std::vector<double> vec(d);
    for (int i = 0; i < d; ++i) {
      try {
        vec[i] = std::stod(cols[i + 1]);
      } catch (const std::exception&) {
        throw Error(path + ":" + std::to_string(lineno) +
                    ": non-numeric vector value \"" + cols[i + 1] + "\"");
      }
    }
    table.vectors.emplace_back(cols[0], std::move(vec));
  }
  return table;
}

DataSplit split_dataset(const std::vector<Sentence>& data,
                        const double ratios[3], std::uint64_t seed) {
  for (int i = 0; i < 3; ++i)
    if (ratios[i] <= 0.0)
      throw Error("split_dataset: ratios must be positive");
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::fabs(sum - 1.0) > 1e-9)
    throw Error("split_dataset: ratios must sum to 1, got " +
                std::to_string(sum));
  const int n = static_cast<int>(data.size());
  if (n < 3) throw Error("split_dataset: need at least 3 sentences, got " +
                         std::to_string(n));

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  RngStream rng("split", seed);
  rng.shuffle(order);

  // Largest-remainder apportionment keeps each part within one of exact.
  int sizes[3];
  double fracs[3];
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = n * ratios[i];
    sizes[i] = static_cast<int>(std::floor(exact));
    fracs[i] = exact - sizes[i];
    assigned += sizes[i];
  }
  for (int left = n - assigned; left > 0; --left) {
    int best = 0;
    for (int i = 1; i < 3; ++i)
      if (fracs[i] > fracs[best]) best = i;
    ++sizes[best];
    fracs[best] = -1.0;
  }

  DataSplit split;
  int pos = 0;
  for (int part = 0; part < 3; ++part) {
    auto& dst = part == 0 ? split.train : part == 1 ? split.dev : split.test;
    dst.reserve(sizes[part]);
    for (int i = 0; i < sizes[part]; ++i) dst.push_back(data[order[pos++]]);
  }
  return split;
}

// -- Synthetic corpus ----------------------------------------------------------

namespace {

const std::vector<std::string>& medical_nouns() {
  static const std::vector<std::string> v = {
      "hypertension", "migraine",  "anemia",       "asthma",     "arthritis",
      "dermatitis",   "nausea",    "fatigue",      "insomnia",   "vertigo",
      "fever",        "gastritis", "bronchitis",   "pneumonia",  "cirrhosis",
      "tremors",      "seizures",  "palpitations", "dizziness",  "edema",
      "lesions",      "bleeding",  "infection",    "dehydration", "obesity",
      "diabetes",     "glaucoma",  "ibuprofen",    "aspirin",    "penicillin",
      "insulin",      "morphine",  "warfarin",     "statins",    "antibiotics",
      "steroids",     "sedatives", "inflammation", "ulcers",     "jaundice"};
  return v;
}

const std::vector<std::string>& medical_modifiers() {
  static const std::vector<std::string> v = {
      "chronic",   "acute",     "severe",    "mild",
      "persistent", "recurrent", "untreated", "prolonged"};
  return v;
}

const std::vector<std::string>& financial_nouns() {
  static const std::vector<std::string> v = {
      "inflation",   "unemployment", "volatility",  "liquidity",
      "deficits",    "tariffs",      "defaults",    "bankruptcies",
      "layoffs",     "losses",       "debt",        "yields",
      "shortages",   "downturns",    "selloffs",    "bubbles",
      "recessions",  "devaluation",  "stagnation",  "speculation",
      "insolvency",  "writedowns",   "outflows",    "margins",
      "dividends",   "buybacks",     "earnings",    "bonds",
      "equities",    "futures",      "derivatives", "commodities",
      "currencies",  "treasuries",   "stocks",      "lenders",
      "overcapacity", "slippage",    "arrears",     "foreclosures"};
  return v;
}

const std::vector<std::string>& financial_modifiers() {
  static const std::vector<std::string> v = {
      "rising",     "falling", "sustained", "unexpected",
      "widespread", "sharp",   "gradual",   "excessive"};
  return v;
}

struct NounPhrase {
  std::vector<std::string> tokens;  // modifiers then the head noun
};

NounPhrase draw_np(Domain domain, RngStream& rng) {
  const auto& nouns =
      domain == Domain::kMedical ? medical_nouns() : financial_nouns();
  const auto& mods =
      domain == Domain::kMedical ? medical_modifiers() : financial_modifiers();
  NounPhrase np;
  const double u = rng.next_double();
  const int n_mods = u < 0.35 ? 0 : u < 0.80 ? 1 : 2;
  for (int i = 0; i < n_mods; ++i)
    np.tokens.push_back(mods[rng.next_index(mods.size())]);
  np.tokens.push_back(nouns[rng.next_index(nouns.size())]);
  return np;
}

// Appends a noun phrase; modifiers attach to the head noun. Returns the
// index of the head noun.
int emit_np(Sentence& s, const NounPhrase& np) {
  const int start = s.size();
  const int noun = start + static_cast<int>(np.tokens.size()) - 1;
  for (std::size_t i = 0; i < np.tokens.size(); ++i) {
    s.tokens.push_back(np.tokens[i]);
    s.heads.push_back(static_cast<int>(i) + 1 < static_cast<int>(np.tokens.size())
                          ? noun
                          : -2 /* patched by caller */);
  }
  return noun;
}

void push(Sentence& s, const std::string& tok, int head) {
  s.tokens.push_back(tok);
  s.heads.push_back(head);
}

Sentence make_causal(Domain domain, RngStream& rng) {
  Sentence s;
  s.causal = true;
  const NounPhrase np1 = draw_np(domain, rng);
  const NounPhrase np2 = draw_np(domain, rng);
  const int tmpl = static_cast<int>(rng.next_index(3));
  SpanSet spans;
  auto span_of = [](const NounPhrase& np, int noun_idx, Role role) {
    const int len = static_cast<int>(np.tokens.size());
    return Span{role, noun_idx - len + 1, noun_idx};
  };
  if (tmpl == 0) {
    // NP_c causes NP_e .
    const int cause_noun = emit_np(s, np1);
    const int verb = s.size();
    push(s, "causes", kRoot);
    s.heads[cause_noun] = verb;
    const int effect_noun = emit_np(s, np2);
    s.heads[effect_noun] = verb;
    push(s, ".", verb);
    spans = {span_of(np1, cause_noun, Role::kCause),
             span_of(np2, effect_noun, Role::kEffect)};
  } else if (tmpl == 1) {
    // NP_e is because of NP_c .
    const int effect_noun = emit_np(s, np1);
    const int is_idx = s.size();
    push(s, "is", kRoot);
    s.heads[effect_noun] = is_idx;
    push(s, "because", is_idx);
    push(s, "of", is_idx + 1);
    const int cause_noun = emit_np(s, np2);
    s.heads[cause_noun] = is_idx + 2;  // attaches to "of"
    push(s, ".", is_idx);
    spans = {span_of(np2, cause_noun, Role::kCause),
             span_of(np1, effect_noun, Role::kEffect)};
  } else {
    // due to NP_c , NP_e occurred .
    const int due_idx = 0;
    push(s, "due", -2);
    push(s, "to", due_idx);
    const int cause_noun = emit_np(s, np1);
    s.heads[cause_noun] = due_idx + 1;  // attaches to "to"
    const int comma = s.size();
    push(s, ",", -2);
    const int effect_noun = emit_np(s, np2);
    const int verb = s.size();
    push(s, "occurred", kRoot);
    s.heads[due_idx] = verb;
    s.heads[comma] = verb;
    s.heads[effect_noun] = verb;
    push(s, ".", verb);
    spans = {span_of(np1, cause_noun, Role::kCause),
             span_of(np2, effect_noun, Role::kEffect)};
  }
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  s.tags = spans_to_iobes(spans, s.size());
  return s;
}

Sentence make_non_causal(Domain domain, RngStream& rng) {
  Sentence s;
  s.causal = false;
  const NounPhrase np1 = draw_np(domain, rng);
  const NounPhrase np2 = draw_np(domain, rng);
  if (rng.next_bernoulli(0.5)) {
    // NP_a and NP_b were observed .
    const int a_noun = emit_np(s, np1);
    const int and_idx = s.size();
    push(s, "and", -2);
    const int b_noun = emit_np(s, np2);
    s.heads[and_idx] = b_noun;
    s.heads[b_noun] = a_noun;  // conjunct attaches to the first noun
    const int were = s.size();
    push(s, "were", -2);
    const int verb = s.size();
    push(s, "observed", kRoot);
    s.heads[a_noun] = verb;
    s.heads[were] = verb;
    push(s, ".", verb);
  } else {
    // NP_a is related to NP_b .
    const int a_noun = emit_np(s, np1);
    const int is_idx = s.size();
    push(s, "is", -2);
    const int verb = s.size();
    push(s, "related", kRoot);
    s.heads[a_noun] = verb;
    s.heads[is_idx] = verb;
    const int to_idx = s.size();
    push(s, "to", verb);
    const int b_noun = emit_np(s, np2);
    s.heads[b_noun] = to_idx;
    push(s, ".", verb);
  }
  s.tags = TagSequence(s.size(), tags::kO);
  return s;
}

}  // namespace

Domain domain_from_string(const std::string& name) {
  if (name == "medical") return Domain::kMedical;
  if (name == "financial") return Domain::kFinancial;
  throw Error("unknown domain \"" + name + "\" (expected medical|financial)");
}

const char* domain_name(Domain d) {
  return d == Domain::kMedical ? "medical" : "financial";
}

std::vector<std::string> synthetic_content_words(Domain domain) {
  std::vector<std::string> out =
      domain == Domain::kMedical ? medical_nouns() : financial_nouns();
  const auto& mods =
      domain == Domain::kMedical ? medical_modifiers() : financial_modifiers();
  out.insert(out.end(), mods.begin(), mods.end());
  return out;
}

std::vector<Sentence> generate_synthetic(Domain domain, int n,
                                         std::uint64_t seed) {
  if (n < 1) throw Error("generate_synthetic: n must be at least 1");
  RngStream rng(std::string("synth.") + domain_name(domain), seed);
  std::vector<Sentence> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    // Class mix: 61% causal / 39% non-causal.
    Sentence s = rng.next_bernoulli(0.61) ? make_causal(domain, rng)
                                          : make_non_causal(domain, rng);
    s.domain = domain_name(domain);
    validate_tree(s.heads);  // templates must always produce valid trees
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ace
