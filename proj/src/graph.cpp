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

#include "ace/graph.hpp"

#include <string>

namespace ace {

DepTree validate_tree(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) throw Error("dependency tree: empty head list");

  int root = -1;
  for (int i = 0; i < n; ++i) {
    if (heads[i] == kRoot) {
      if (root >= 0)
        throw Error("dependency tree: multiple roots at tokens " +
                    std::to_string(root) + " and " + std::to_string(i));
      root = i;
    } else if (heads[i] < 0 || heads[i] >= n) {
      throw Error("dependency tree: head of token " + std::to_string(i) +
                  " out of range: " + std::to_string(heads[i]));
    } else if (heads[i] == i) {
      throw Error("dependency tree: token " + std::to_string(i) +
                  " is its own head");
    }
  }
  if (root < 0) throw Error("dependency tree: no root token");

  // Walk each token to the root; n head edges with one root and no cycle
  // imply a connected tree.
  std::vector<int> seen(n, -1);
  for (int i = 0; i < n; ++i) {
    int cur = i;
    while (cur != root) {
      if (seen[cur] == i)
        throw Error("dependency tree: cycle through token " +
                    std::to_string(cur));
      seen[cur] = i;
      cur = heads[cur];
    }
  }
  return DepTree{n, heads};
}

AdjMatrix build_adjacency(const DepTree& tree) {
  AdjMatrix adj;
  adj.n = tree.n;
  adj.a_tilde.assign(static_cast<std::size_t>(tree.n) * tree.n, 0.0);
  for (int i = 0; i < tree.n; ++i) {
    adj.a_tilde[i * tree.n + i] = 1.0;
    const int h = tree.heads[i];
    if (h != kRoot) {
      adj.a_tilde[i * tree.n + h] = 1.0;
      adj.a_tilde[h * tree.n + i] = 1.0;
    }
  }
  adj.degrees.assign(tree.n, 0.0);
  for (int i = 0; i < tree.n; ++i) {
    double d = 0.0;
    for (int j = 0; j < tree.n; ++j) d += adj.a_tilde[i * tree.n + j];
    adj.degrees[i] = d;
  }
  return adj;
}

Tensor normalized_adjacency(const AdjMatrix& adj) {
  std::vector<double> values(adj.a_tilde.size());
  for (int i = 0; i < adj.n; ++i)
    for (int j = 0; j < adj.n; ++j)
      values[i * adj.n + j] = adj.a_tilde[i * adj.n + j] / adj.degrees[i];
  return Tensor::leaf({adj.n, adj.n}, std::move(values));
}

}  // namespace ace
