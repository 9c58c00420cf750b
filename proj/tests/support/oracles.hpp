#pragma once

// Slow, obviously-correct reference implementations used to pin expected
// values in tests. Nothing here shares code with the library.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace prefcon::testing {

using Adjacency = std::vector<std::vector<bool>>;

/// Reachability (with identity) by depth-first search from every node.
inline Adjacency dfs_reachability(const Adjacency& adj) {
  const std::size_t n = adj.size();
  Adjacency reach(n, std::vector<bool>(n, false));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (adj[u][v] && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    reach[s] = seen;
  }
  return reach;
}

/// Fraction of oriented pairs whose endpoints are mutually reachable,
/// complemented; -1 when nothing is oriented.
inline double dfs_transitivity(const Adjacency& adj) {
  const auto reach = dfs_reachability(adj);
  std::size_t resolved = 0;
  std::size_t on_cycle = 0;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    for (std::size_t j = i + 1; j < adj.size(); ++j) {
      if (!adj[i][j] && !adj[j][i]) continue;
      ++resolved;
      if (reach[i][j] && reach[j][i]) ++on_cycle;
    }
  }
  if (resolved == 0) return -1.0;
  return static_cast<double>(resolved - on_cycle) / static_cast<double>(resolved);
}

/// Plain exponential recursion; fine for lengths up to about 6.
inline std::size_t naive_edit_distance(const std::vector<std::size_t>& a, std::size_t i,
                                       const std::vector<std::size_t>& b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  if (a[i] == b[j]) return naive_edit_distance(a, i + 1, b, j + 1);
  return 1 + std::min({naive_edit_distance(a, i + 1, b, j), naive_edit_distance(a, i, b, j + 1),
                       naive_edit_distance(a, i + 1, b, j + 1)});
}

inline std::size_t naive_edit_distance(const std::vector<std::size_t>& a,
                                       const std::vector<std::size_t>& b) {
  return naive_edit_distance(a, 0, b, 0);
}

/// Memoised recursion over (i, j); the exhaustive DP used for the full
/// length <= 4 sweep where plain recursion is too slow.
inline std::size_t memo_edit_distance(const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  auto go = [&](auto&& self, std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
    const std::size_t d =
        a[i] == b[j] ? self(self, i + 1, j + 1)
                     : 1 + std::min({self(self, i + 1, j), self(self, i, j + 1), self(self, i + 1, j + 1)});
    memo[{i, j}] = d;
    return d;
  };
  return go(go, 0, 0);
}

/// Every sequence over {0..alphabet-1} of length 0..max_len.
inline std::vector<std::vector<std::size_t>> all_sequences(std::size_t max_len, std::size_t alphabet) {
  std::vector<std::vector<std::size_t>> out{{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t k = begin; k < end; ++k) {
      for (std::size_t c = 0; c < alphabet; ++c) {
        auto s = out[k];
        s.push_back(c);
        out.push_back(std::move(s));
      }
    }
    begin = end;
  }
  return out;
}

/// Stable sort by descending score; equal scores keep ascending index order.
inline std::vector<std::size_t> stable_sort_ranking(const std::map<std::size_t, double>& scores) {
  std::vector<std::pair<std::size_t, double>> items(scores.begin(), scores.end());
  // Insertion sort: moves an item left only past strictly smaller scores.
  for (std::size_t i = 1; i < items.size(); ++i) {
    for (std::size_t k = i; k > 0 && items[k - 1].second < items[k].second; --k) {
      std::swap(items[k - 1], items[k]);
    }
  }
  std::vector<std::size_t> out;
  for (const auto& [idx, score] : items) out.push_back(idx);
  return out;
}

/// Tournament on n nodes from the bits of `mask`, pairs in row-major order.
inline Adjacency tournament(std::size_t n, std::uint64_t mask) {
  Adjacency adj(n, std::vector<bool>(n, false));
  std::size_t bit = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++bit) {
      if ((mask >> bit) & 1U) {
        adj[i][j] = true;
      } else {
        adj[j][i] = true;
      }
    }
  }
  return adj;
}

}  // namespace prefcon::testing
