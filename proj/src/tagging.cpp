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

#include "ace/tagging.hpp"

#include <algorithm>

#include "ace/tensor.hpp"

namespace ace {

TransitionMask TransitionMask::permissive(int num_tags) {
  TransitionMask m;
  m.num_tags = num_tags;
  m.legal.assign(static_cast<std::size_t>(m.total()) * m.total(), 0);
  for (int from = 0; from < num_tags; ++from)
    for (int to = 0; to < num_tags; ++to) m.legal[from * m.total() + to] = 1;
  for (int t = 0; t < num_tags; ++t) {
    m.legal[m.start() * m.total() + t] = 1;
    m.legal[t * m.total() + m.end()] = 1;
  }
  return m;
}

namespace tags {
namespace {

// Per-tag structure: kind O/B/I/E/S and role.
enum Kind { kKindO, kKindB, kKindI, kKindE, kKindS };

Kind kind_of(int tag) {
  switch (tag) {
    case kO: return kKindO;
    case 1: case 5: return kKindB;
    case 2: case 6: return kKindI;
    case 3: case 7: return kKindE;
    default: return kKindS;
  }
}

Role role_of(int tag) { return tag <= 4 ? Role::kCause : Role::kEffect; }

bool transition_ok(int from, int to) {
  if (from == kEnd || to == kStart) return false;
  if (to == kEnd) {
    if (from == kStart) return false;  // no empty sequences
    const Kind k = kind_of(from);
    return k == kKindO || k == kKindE || k == kKindS;
  }
  const Kind to_kind = kind_of(to);
  if (from == kStart) return to_kind == kKindO || to_kind == kKindB ||
                             to_kind == kKindS;
  const Kind from_kind = kind_of(from);
  if (from_kind == kKindB || from_kind == kKindI) {
    // An open span continues or closes with its own role.
    return (to_kind == kKindI || to_kind == kKindE) &&
           role_of(from) == role_of(to);
  }
  // O or a closed span: anything that does not continue a span.
  return to_kind == kKindO || to_kind == kKindB || to_kind == kKindS;
}

TransitionMask build_mask() {
  TransitionMask m;
  m.num_tags = kNumTags;
  m.legal.assign(static_cast<std::size_t>(m.total()) * m.total(), 0);
  for (int from = 0; from < m.total(); ++from)
    for (int to = 0; to < m.total(); ++to)
      m.legal[from * m.total() + to] = transition_ok(from, to) ? 1 : 0;
  return m;
}

}  // namespace

const std::vector<std::string>& names() {
  static const std::vector<std::string> kNames = {
      "O",   "B-C", "I-C", "E-C", "S-C",
      "B-E", "I-E", "E-E", "S-E"};
  return kNames;
}

const std::string& name_of(int tag) {
  if (tag < 0 || tag >= kNumTags)
    throw Error("tag id out of range: " + std::to_string(tag));
  return names()[tag];
}

int id_of(std::string_view name) {
  const auto& all = names();
  for (int i = 0; i < kNumTags; ++i)
    if (all[i] == name) return i;
  throw Error("unknown tag name: " + std::string(name));
}

const TransitionMask& mask() {
  static const TransitionMask m = build_mask();
  return m;
}

bool sequence_legal(const TagSequence& seq) {
  if (seq.empty()) return false;
  const TransitionMask& m = mask();
  if (!m.ok(kStart, seq.front())) return false;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (!m.ok(seq[i], seq[i + 1])) return false;
  return m.ok(seq.back(), kEnd);
}

}  // namespace tags

namespace {

// Tag ids per role.
int tag_b(Role r) { return r == Role::kCause ? 1 : 5; }
int tag_i(Role r) { return r == Role::kCause ? 2 : 6; }
int tag_e(Role r) { return r == Role::kCause ? 3 : 7; }
int tag_s(Role r) { return r == Role::kCause ? 4 : 8; }

}  // namespace

TagSequence spans_to_iobes(const SpanSet& spans, int n) {
  if (n <= 0) throw Error("spans_to_iobes: sentence length must be positive");
  TagSequence out(n, tags::kO);
  std::vector<bool> covered(n, false);
  for (const Span& s : spans) {
    if (s.start < 0 || s.end < s.start || s.end >= n)
      throw Error("spans_to_iobes: span [" + std::to_string(s.start) + "," +
                  std::to_string(s.end) + "] out of range for length " +
                  std::to_string(n));
    for (int i = s.start; i <= s.end; ++i) {
      if (covered[i])
        throw Error("spans_to_iobes: overlapping spans at token " +
                    std::to_string(i));
      covered[i] = true;
    }
    if (s.start == s.end) {
      out[s.start] = tag_s(s.role);
    } else {
      out[s.start] = tag_b(s.role);
      for (int i = s.start + 1; i < s.end; ++i) out[i] = tag_i(s.role);
      out[s.end] = tag_e(s.role);
    }
  }
  return out;
}

SpanSet iobes_to_spans(const TagSequence& seq) {
  using namespace tags;
  SpanSet spans;
  const int n = static_cast<int>(seq.size());
  int i = 0;
  while (i < n) {
    const int t = seq[i];
    if (t < 0 || t >= kNumTags)
      throw Error("iobes_to_spans: tag id out of range: " + std::to_string(t));
    const Kind k = kind_of(t);
    if (k == kKindO) {
      ++i;
      continue;
    }
    const Role r = role_of(t);
    if (k == kKindS || k == kKindE) {
      // S-x, or an orphan E-x, is a singleton at its own position.
      spans.push_back({r, i, i});
      ++i;
      continue;
    }
    // B-x, or an orphan I-x treated as one: absorb the contiguous I-x run,
    // close on a following E-x, otherwise repair by closing at the last
    // contiguous token of the run.
    int j = i + 1;
    while (j < n && seq[j] == tag_i(r)) ++j;
    if (j < n && seq[j] == tag_e(r)) {
      spans.push_back({r, i, j});
      i = j + 1;
    } else {
      spans.push_back({r, i, j - 1});
      i = j;
    }
  }
  return spans;
}

TagSequence iob_to_iobes(const std::vector<std::string>& iob) {
  struct Parsed {
    char kind;  // 'O', 'B', 'I'
    Role role;
  };
  std::vector<Parsed> parsed(iob.size());
  for (std::size_t i = 0; i < iob.size(); ++i) {
    const std::string& t = iob[i];
    if (t == "O") {
      parsed[i] = {'O', Role::kCause};
    } else if (t == "B-C" || t == "B-E" || t == "I-C" || t == "I-E") {
      parsed[i] = {t[0], t[2] == 'C' ? Role::kCause : Role::kEffect};
    } else {
      throw Error("iob_to_iobes: unknown IOB tag \"" + t + "\" at position " +
                  std::to_string(i));
    }
    if (parsed[i].kind == 'I') {
      const bool continues = i > 0 && parsed[i - 1].kind != 'O' &&
                             parsed[i - 1].role == parsed[i].role;
      if (!continues)
        throw Error("iob_to_iobes: I tag without a span at position " +
                    std::to_string(i));
    }
  }
  TagSequence out(iob.size(), tags::kO);
  for (std::size_t i = 0; i < iob.size(); ++i) {
    if (parsed[i].kind == 'O') continue;
    const Role r = parsed[i].role;
    const bool run_continues = i + 1 < iob.size() && parsed[i + 1].kind == 'I' &&
                               parsed[i + 1].role == r;
    if (parsed[i].kind == 'B') {
      out[i] = run_continues ? tag_b(r) : tag_s(r);
    } else {
      out[i] = run_continues ? tag_i(r) : tag_e(r);
    }
  }
  return out;
}

}  // namespace ace
