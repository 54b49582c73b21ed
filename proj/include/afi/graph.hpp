#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

namespace afi::graph {

/// Plain adjacency list over dense node ids.
using Adjacency = std::vector<std::vector<std::uint32_t>>;

/// Tarjan's algorithm without recursion. Returns component id per node;
/// components are numbered in reverse topological order.
inline std::vector<std::uint32_t> strongly_connected_components(const Adjacency& adj) {
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  const auto n = static_cast<std::uint32_t>(adj.size());
  std::vector<std::uint32_t> index(n, unset), low(n, 0), comp(n, unset);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::uint32_t counter = 0, components = 0;
  struct Frame {
    std::uint32_t node;
    std::size_t edge;
  };
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != unset) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& frame = call.back();
      const auto v = frame.node;
      if (frame.edge < adj[v].size()) {
        const auto w = adj[v][frame.edge++];
        if (index[w] == unset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = components;
        } while (w != v);
        ++components;
      }
      call.pop_back();
      if (!call.empty()) {
        const auto parent = call.back().node;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return comp;
}

/// True when `node` lies on some cycle (non-trivial SCC or self-loop).
inline std::vector<char> on_some_cycle(const Adjacency& adj) {
  const auto comp = strongly_connected_components(adj);
  std::vector<std::uint32_t> size(adj.size(), 0);
  for (auto c : comp) ++size[c];
  std::vector<char> out(adj.size(), 0);
  for (std::uint32_t v = 0; v < adj.size(); ++v) {
    if (size[comp[v]] > 1) out[v] = 1;
    for (auto w : adj[v])
      if (w == v) out[v] = 1;
  }
  return out;
}

/// Shortest path (as node list, both ends included) using only nodes accepted
/// by `allowed`. Empty when unreachable.
inline std::vector<std::uint32_t> shortest_path(const Adjacency& adj, std::uint32_t from, std::uint32_t to,
                                                const std::function<bool(std::uint32_t)>& allowed) {
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> parent(adj.size(), unset);
  std::deque<std::uint32_t> queue{from};
  parent[from] = from;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    if (v == to) break;
    for (auto w : adj[v]) {
      if (parent[w] != unset || !allowed(w)) continue;
      parent[w] = v;
      queue.push_back(w);
    }
  }
  if (parent[to] == unset) return {};
  std::vector<std::uint32_t> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace afi::graph
