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

#ifndef ACE_GRAPH_HPP_
#define ACE_GRAPH_HPP_

#include <vector>

#include "ace/tensor.hpp"

namespace ace {

// Head index marking the root token.
inline constexpr int kRoot = -1;

// A validated dependency tree over n tokens: heads[i] is the 0-based head of
// token i, kRoot for the single root. The edge set is guaranteed connected
// and acyclic.
struct DepTree {
  int n = 0;
  std::vector<int> heads;
};

// Checks the head list (exactly one root, in-range heads, acyclic) and wraps
// it. Errors name the specific violation.
DepTree validate_tree(const std::vector<int>& heads);

// Symmetric adjacency with self-loops and its row sums: a_tilde[i][j] is 1
// when i == j or an edge connects i and j, 0 otherwise; degrees[i] >= 1.
struct AdjMatrix {
  int n = 0;
  std::vector<double> a_tilde;  // n x n, row-major
  std::vector<double> degrees;

  double at(int i, int j) const { return a_tilde[i * n + j]; }
};

AdjMatrix build_adjacency(const DepTree& tree);

// Degree-normalized adjacency D^-1 (A + I) as a constant tensor, the linear
// operator applied by each graph-convolution layer.
Tensor normalized_adjacency(const AdjMatrix& adj);

}  // namespace ace

#endif  // ACE_GRAPH_HPP_
