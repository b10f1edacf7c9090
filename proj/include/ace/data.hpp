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

#ifndef ACE_DATA_HPP_
#define ACE_DATA_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ace/tagging.hpp"

namespace ace {

// One pre-parsed sentence. heads[i] is 0-based with kRoot for the root;
// label/tags/domain are optional depending on the corpus.
struct Sentence {
  std::vector<std::string> tokens;
  std::vector<int> heads;
  std::optional<bool> causal;
  std::optional<TagSequence> tags;
  std::string domain;

  int size() const { return static_cast<int>(tokens.size()); }
};

// Column corpus format, blocks separated by blank lines:
//
//   # label=causal
//   # domain=medical
//   1 He 2 O
//   2 died 0 O
//   3 of 2 O
//   4 cancer 3 S-C
//
// Columns: 1-based token index, form, head (0 = root), tag ("_" when
// absent). "# label=..." / "# domain=..." comments precede the block.
// UTF-8, LF line endings.
std::vector<Sentence> parse_corpus(const std::string& path);
std::vector<Sentence> parse_corpus_text(const std::string& text,
                                        const std::string& origin = "<string>");
std::string corpus_to_text(const std::vector<Sentence>& sentences);
void write_corpus(const std::string& path,
                  const std::vector<Sentence>& sentences);

// Word-vector text file: optional "count dim" header line, then one record
// per line ("word v1 ... vd"). Dimension mismatches are rejected at the
// offending line.
struct EmbeddingTable {
  int dim = 0;
  std::vector<std::pair<std::string, std::vector<double>>> vectors;
};
EmbeddingTable load_embeddings(const std::string& path);

// Seeded shuffle, then contiguous cut. Sizes follow the ratios to within
// one element (largest-remainder rounding); parts are disjoint and cover
// the input. Requires at least 3 sentences and positive ratios summing to 1.
struct DataSplit {
  std::vector<Sentence> train, dev, test;
};
DataSplit split_dataset(const std::vector<Sentence>& data,
                        const double ratios[3], std::uint64_t seed);

// Templated two-domain corpus with deterministic trees and gold annotation.
// Medical and financial content lexicons are disjoint; function words are
// shared. Causal sentences carry exactly one cause and one effect span.
enum class Domain { kMedical, kFinancial };
Domain domain_from_string(const std::string& name);  // "medical"/"financial"
const char* domain_name(Domain d);
std::vector<Sentence> generate_synthetic(Domain domain, int n,
                                         std::uint64_t seed);

// Content (non-function) words of a domain lexicon; exposed so tests can
// verify the cross-domain intersection is empty.
std::vector<std::string> synthetic_content_words(Domain domain);

}  // namespace ace

#endif  // ACE_DATA_HPP_
