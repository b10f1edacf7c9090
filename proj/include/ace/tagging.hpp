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

#ifndef ACE_TAGGING_HPP_
#define ACE_TAGGING_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ace {

enum class Role { kCause, kEffect };

// Inclusive token span carrying a cause or effect role.
struct Span {
  Role role;
  int start;
  int end;

  friend bool operator==(const Span&, const Span&) = default;
};

using SpanSet = std::vector<Span>;
using TagSequence = std::vector<int>;

// Transition legality over K real tags plus START (= K) and END (= K + 1)
// sentinels, indexed like the transition score matrix.
struct TransitionMask {
  int num_tags = 0;
  std::vector<std::uint8_t> legal;  // (K+2)^2

  int start() const { return num_tags; }
  int end() const { return num_tags + 1; }
  int total() const { return num_tags + 2; }
  bool ok(int from, int to) const { return legal[from * total() + to] != 0; }

  // Every token-to-token, start and end transition allowed.
  static TransitionMask permissive(int num_tags);
};

// The fixed IOBES inventory for cause/effect extraction:
//   0 O, 1 B-C, 2 I-C, 3 E-C, 4 S-C, 5 B-E, 6 I-E, 7 E-E, 8 S-E
// plus START/END sentinels in transition space.
namespace tags {

inline constexpr int kO = 0;
inline constexpr int kNumTags = 9;
inline constexpr int kStart = 9;
inline constexpr int kEnd = 10;

const std::vector<std::string>& names();
const std::string& name_of(int tag);
int id_of(std::string_view name);  // throws on unknown names

// IOBES-legal transitions: B-x/I-x continue only as I-x/E-x of the same
// role; spans cannot dangle into END; O and closed spans may start anything.
const TransitionMask& mask();

// True when every adjacent pair plus the START/END transitions are legal.
bool sequence_legal(const TagSequence& tags);

}  // namespace tags

// Encodes non-overlapping spans over n tokens: singleton spans become S-x,
// two-token spans B-x E-x, longer ones B-x I-x... E-x; everything else O.
// Rejects overlapping or out-of-range spans.
TagSequence spans_to_iobes(const SpanSet& spans, int n);

// Total inverse: exact on well-formed sequences; ill-formed runs are
// repaired by closing a dangling B-x/I-x run at its last contiguous token
// and treating an orphan I-x/E-x as opening a span at its own position.
// Returned spans are ordered by start position.
SpanSet iobes_to_spans(const TagSequence& tags);

// Converts well-formed IOB tag names (O, B-C, I-C, B-E, I-E) to the IOBES
// inventory, preserving span semantics. Rejects ill-formed input naming the
// offending position.
TagSequence iob_to_iobes(const std::vector<std::string>& iob);

}  // namespace ace

#endif  // ACE_TAGGING_HPP_
