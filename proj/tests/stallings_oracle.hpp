#pragma once

// Reference Stallings folding over a free group given by plain integer
// letters (+g / -g for generator g-1), with union-find vertex merging.
// Independent of the library's folding and cover code.

#include <cstddef>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

namespace oracle {

  struct StallingsGraph {
    std::size_t                                         vertices = 0;
    std::set<std::tuple<std::size_t, int, std::size_t>> edges;  // (from, generator, to), generator > 0
  };

  namespace detail {
    inline std::size_t find(std::vector<std::size_t>& p, std::size_t x) {
      while (p[x] != x) {
        p[x] = p[p[x]];
        x    = p[x];
      }
      return x;
    }
  }  // namespace detail

  // Folded core graph of <words>; base vertex 0, vertices renumbered in
  // BFS order following letters 1, -1, 2, -2, ...
  inline StallingsGraph stallings(std::vector<std::vector<int>> const& words, int rank) {
    std::vector<std::tuple<std::size_t, int, std::size_t>> raw;
    std::size_t                                            n = 1;
    for (auto const& w : words) {
      if (w.empty()) {
        continue;
      }
      std::size_t cur = 0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        std::size_t next = i + 1 == w.size() ? 0 : n++;
        if (w[i] > 0) {
          raw.emplace_back(cur, w[i], next);
        } else {
          raw.emplace_back(next, -w[i], cur);
        }
        cur = next;
      }
    }
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<std::pair<std::size_t, int>, std::size_t> out;  // (vertex, signed letter) -> target
      for (auto const& [a, g, b] : raw) {
        std::size_t const x = detail::find(p, a), y = detail::find(p, b);
        for (auto [from, l, to] : {std::tuple(x, g, y), std::tuple(y, -g, x)}) {
          auto [it, fresh] = out.emplace(std::pair(from, l), to);
          if (!fresh && detail::find(p, it->second) != detail::find(p, to)) {
            std::size_t const u = detail::find(p, it->second), v = detail::find(p, to);
            p[std::max(u, v)] = std::min(u, v);
            changed           = true;
          }
        }
        if (changed) {
          break;
        }
      }
    }
    std::set<std::tuple<std::size_t, int, std::size_t>> merged;
    for (auto const& [a, g, b] : raw) {
      merged.emplace(detail::find(p, a), g, detail::find(p, b));
    }
    // BFS renumbering
    std::map<std::size_t, std::size_t> id;
    std::queue<std::size_t>            q;
    id[detail::find(p, 0)] = 0;
    q.push(detail::find(p, 0));
    while (!q.empty()) {
      std::size_t const x = q.front();
      q.pop();
      for (int g = 1; g <= rank; ++g) {
        for (int s : {1, -1}) {
          for (auto const& [a, h, b] : merged) {
            if (h != g) {
              continue;
            }
            std::size_t const y = s > 0 && a == x ? b : s < 0 && b == x ? a : SIZE_MAX;
            if (y != SIZE_MAX && !id.count(y)) {
              id[y] = id.size();
              q.push(y);
            }
          }
        }
      }
    }
    StallingsGraph out;
    out.vertices = id.size();
    for (auto const& [a, g, b] : merged) {
      out.edges.emplace(id.at(a), g, id.at(b));
    }
    return out;
  }

  inline bool is_full_cover(StallingsGraph const& g, int rank) {
    for (std::size_t v = 0; v < g.vertices; ++v) {
      for (int h = 1; h <= rank; ++h) {
        bool out = false, in = false;
        for (auto const& [a, k, b] : g.edges) {
          out = out || (k == h && a == v);
          in  = in || (k == h && b == v);
        }
        if (!out || !in) {
          return false;
        }
      }
    }
    return true;
  }

}  // namespace oracle
