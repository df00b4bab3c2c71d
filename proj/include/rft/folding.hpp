#pragma once

// Stallings folding of finitely generated subgroups of a free group.
//
// Every edge carries, besides its generator label, a word over the
// subgroup generators.  With a potential p(v) (label of some path from
// the base to v) the invariant is
//   eval(expr(e)) == p(src) * label(e) * p(tgt)^-1,
// so reading a closed path at the base multiplies the edge expressions
// into an expression of the read word in the subgroup generators.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "rft/words.hpp"

namespace rft {

  class SubgroupGraph {
   public:
    struct Edge {
      std::size_t src;
      std::size_t tgt;
      std::size_t gen;   // label is gen^+1 from src to tgt
      Word        expr;  // over the subgroup generators
    };

    SubgroupGraph(std::vector<Word> const& subgens) {
      nodes_ = 1;
      for (std::size_t i = 0; i < subgens.size(); ++i) {
        Word const w = reduce(subgens[i]);
        if (w.empty()) {
          continue;
        }
        std::size_t prev = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
          bool const  last = k + 1 == w.size();
          std::size_t next = last ? 0 : nodes_++;
          Word        expr = last ? Word{letter(i)} : Word{};
          add_edge(prev, next, w[k], std::move(expr));
          prev = next;
        }
      }
      fold();
    }

    std::size_t base() const noexcept { return 0; }
    std::size_t node_count() const noexcept { return alive_nodes_; }
    std::vector<Edge> const& edges() const noexcept { return edges_; }

    // Follows w from the base.  Returns the expression when the path
    // closes at the base, std::nullopt otherwise.
    std::optional<Word> express(Word const& w) const {
      Word        expr;
      std::size_t v = 0;
      for (Letter l : reduce(w)) {
        auto step = follow(v, l);
        if (!step) {
          return std::nullopt;
        }
        v = step->first;
        expr.append(step->second);
      }
      if (v != 0) {
        return std::nullopt;
      }
      return reduce(expr);
    }

    bool contains(Word const& w) const { return express(w).has_value(); }

    // Endpoint of reading w from v, if the whole word can be read.
    std::optional<std::size_t> read(std::size_t v, Word const& w) const {
      for (Letter l : w) {
        auto step = follow(v, l);
        if (!step) {
          return std::nullopt;
        }
        v = step->first;
      }
      return v;
    }

    std::optional<std::pair<std::size_t, Word>> follow(std::size_t v, Letter l) const {
      for (auto const& e : edges_) {
        if (l > 0 && e.src == v && e.gen == generator_of(l)) {
          return std::make_pair(e.tgt, e.expr);
        }
        if (l < 0 && e.tgt == v && e.gen == generator_of(l)) {
          return std::make_pair(e.src, inverse(e.expr));
        }
      }
      return std::nullopt;
    }

    // Rank of the subgroup: |E| - |V| + 1 of the folded graph.
    std::size_t rank() const { return edges_.size() + 1 - alive_nodes_; }

    // Removes hanging trees not containing the base.
    void trim() {
      bool changed = true;
      while (changed) {
        changed = false;
        std::map<std::size_t, std::size_t> degree;
        for (auto const& e : edges_) {
          ++degree[e.src];
          ++degree[e.tgt];
        }
        for (std::size_t i = 0; i < edges_.size(); ++i) {
          auto const& e = edges_[i];
          for (std::size_t v : {e.src, e.tgt}) {
            if (v != 0 && degree[v] == 1) {
              edges_.erase(edges_.begin() + static_cast<std::ptrdiff_t>(i));
              --alive_nodes_;
              changed = true;
              break;
            }
          }
          if (changed) {
            break;
          }
        }
      }
    }

    // Nodes renumbered 0.. in order of first visit by a BFS from the base
    // that scans letters in shortlex order; returns (node count, sorted
    // edge triples) which is a complete invariant of the based graph.
    std::pair<std::size_t, std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>>
    canonical_form(std::size_t rank_hint) const {
      std::map<std::size_t, std::size_t> order{{0, 0}};
      std::vector<std::size_t>           queue{0};
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        std::size_t v = queue[qi];
        for (Letter l : ordered_letters(rank_hint)) {
          if (auto step = follow(v, l); step && !order.count(step->first)) {
            order.emplace(step->first, order.size());
            queue.push_back(step->first);
          }
        }
      }
      std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> out;
      for (auto const& e : edges_) {
        out.emplace_back(order.at(e.src), e.gen, order.at(e.tgt));
      }
      std::sort(out.begin(), out.end());
      return {order.size(), out};
    }

   private:
    void add_edge(std::size_t from, std::size_t to, Letter l, Word expr) {
      if (l > 0) {
        edges_.push_back({from, to, generator_of(l), std::move(expr)});
      } else {
        edges_.push_back({to, from, generator_of(l), inverse(expr)});
      }
    }

    void fold() {
      alive_nodes_ = nodes_;
      while (fold_once()) {
      }
    }

    bool fold_once() {
      for (std::size_t i = 0; i < edges_.size(); ++i) {
        for (std::size_t j = i + 1; j < edges_.size(); ++j) {
          Edge const& a = edges_[i];
          Edge const& b = edges_[j];
          if (a.gen != b.gen) {
            continue;
          }
          if (a.src == b.src) {
            // outgoing pair: merge b.tgt into a.tgt
            merge(a.tgt, b.tgt, a.expr, b.expr, j, /*outgoing=*/true);
            return true;
          }
          if (a.tgt == b.tgt) {
            // incoming pair, seen from the common target with inverse labels
            merge(a.src, b.src, inverse(a.expr), inverse(b.expr), j, /*outgoing=*/false);
            return true;
          }
        }
      }
      return false;
    }

    // Folds edge `drop` onto its twin; x1/x2 are the expressions of the
    // twin edges oriented away from the common vertex towards keep / gone.
    void merge(std::size_t keep, std::size_t gone, Word const& x1, Word const& x2,
               std::size_t drop, bool) {
      Word const shift = reduce(inverse(x1) * x2);  // p(keep) p(gone)^-1
      edges_.erase(edges_.begin() + static_cast<std::ptrdiff_t>(drop));
      if (keep == gone) {
        return;
      }
      if (gone == 0) {  // keep the base as representative
        std::swap(keep, gone);
        Word const inv = inverse(shift);
        relabel(keep, gone, inv);
        return;
      }
      relabel(keep, gone, shift);
    }

    void relabel(std::size_t keep, std::size_t gone, Word const& shift) {
      for (auto& e : edges_) {
        bool const s = e.src == gone, t = e.tgt == gone;
        if (s) {
          e.src  = keep;
          e.expr = shift * e.expr;
        }
        if (t) {
          e.tgt  = keep;
          e.expr = e.expr * inverse(shift);
        }
      }
      --alive_nodes_;
    }

    std::size_t       nodes_       = 0;
    std::size_t       alive_nodes_ = 0;
    std::vector<Edge> edges_;
  };

}  // namespace rft
