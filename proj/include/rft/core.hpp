#pragma once

// Finite cores of covers.  The cover of a graph of groups that belongs to
// a finitely generated subgroup H is built as a folded graph whose cover
// vertices carry subgroups of the base vertex groups and whose cover edges
// carry labels on both ends.  Tracing the generators of H and folding gives
// the generated portion; extra expansion rounds add one frontier lift per
// missing edge incidence.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rft/errors.hpp"
#include "rft/folding.hpp"
#include "rft/graph_of_groups.hpp"
#include "rft/lattice.hpp"
#include "rft/tower.hpp"
#include "rft/words.hpp"

namespace rft {

  struct CoverVertex {
    std::size_t       base_vertex = 0;
    std::vector<Word> subgroup;  // local words of the base vertex group
    bool              frontier = false;
    bool              alive    = true;
  };

  // Reading a . cross(base_edge) . b from `from` (a lift of the base edge's
  // src) to `to` (a lift of its tgt).
  struct CoverEdge {
    std::size_t base_edge = 0;
    std::size_t from = 0, to = 0;
    Word        a, b;
    bool        frontier = false;
    bool        alive    = true;
  };

  struct Incidence {
    std::size_t edge;
    int         side;  // 0: the vertex is `from`, 1: it is `to`
  };

  struct EdgeStabilizer {
    std::vector<lattice::Vector> basis;  // coordinates in the base edge group
    bool                         exact = true;
  };

  class CoverGraph {
   public:
    CoverGraph(std::shared_ptr<GraphOfGroups const> base, std::size_t budget)
        : base_(std::move(base)), budget_(budget) {
      vertices_.push_back({base_->base(), {}, false, true});
    }

    GraphOfGroups const& base() const noexcept { return *base_; }
    std::shared_ptr<GraphOfGroups const> const& base_ptr() const noexcept { return base_; }
    std::size_t root() const noexcept { return 0; }
    std::size_t budget() const noexcept { return budget_; }
    std::vector<CoverVertex> const& vertices() const noexcept { return vertices_; }
    std::vector<CoverEdge> const& edges() const noexcept { return edges_; }
    std::vector<Word> const& generators() const noexcept { return generators_; }
    std::vector<std::string> const& warnings() const noexcept { return warnings_; }
    std::size_t rounds() const noexcept { return rounds_; }
    // every double-coset query was decided exactly
    bool fold_exact() const noexcept { return fold_exact_; }
    // no fold was skipped because it would move the base frame
    bool fold_complete() const noexcept { return fold_complete_; }

    std::vector<std::size_t> alive_vertices() const {
      std::vector<std::size_t> out;
      for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (vertices_[i].alive) {
          out.push_back(i);
        }
      }
      return out;
    }
    std::vector<std::size_t> alive_edges() const {
      std::vector<std::size_t> out;
      for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (edges_[i].alive) {
          out.push_back(i);
        }
      }
      return out;
    }

    std::vector<Incidence> incidences(std::size_t x) const {
      std::vector<Incidence> out;
      for (std::size_t f = 0; f < edges_.size(); ++f) {
        if (!edges_[f].alive) {
          continue;
        }
        if (edges_[f].from == x) {
          out.push_back({f, 0});
        }
        if (edges_[f].to == x) {
          out.push_back({f, 1});
        }
      }
      return out;
    }

    Word outward(Incidence i) const {
      auto const& f = edges_[i.edge];
      return i.side == 0 ? f.a : inverse(f.b);
    }
    Word far_label(Incidence i) const {
      auto const& f = edges_[i.edge];
      return i.side == 0 ? f.b : inverse(f.a);
    }
    std::size_t far_vertex(Incidence i) const {
      auto const& f = edges_[i.edge];
      return i.side == 0 ? f.to : f.from;
    }

    // Global word read along the edge from `from` to `to`.
    Word edge_reading(std::size_t f) const {
      auto const& e = edges_[f];
      auto const& g = *base_;
      Word        out = g.to_global(vertices_[e.from].base_vertex, e.a);
      if (auto s = g.stable_letter(e.base_edge)) {
        out.push_back(letter(*s));
      }
      out.append(g.to_global(vertices_[e.to].base_vertex, e.b));
      return reduce(out);
    }

    // Add the generator's normal-form loop at the root.
    void trace(Word const& w) {
      NormalForm const nf = base_->normal_form(w, budget_);
      if (nf.verdict == Verdict::trivial) {
        warnings_.push_back("generator '" + format_word(w, base_->alphabet())
                            + "' is trivial and was dropped");
        return;
      }
      if (nf.verdict == Verdict::unknown) {
        throw domain_error("generator '" + format_word(w, base_->alphabet())
                           + "' has an undecided word problem within budget "
                           + std::to_string(budget_));
      }
      generators_.push_back(reduce(w));
      if (nf.crossings.empty()) {
        add_to_subgroup(root(), nf.syllables.front().element);
        return;
      }
      std::size_t       cur = root();
      std::size_t const n   = nf.crossings.size();
      for (std::size_t i = 0; i < n; ++i) {
        Crossing const c    = nf.crossings[i];
        bool const     last = i + 1 == n;
        std::size_t    next = root();
        if (!last) {
          next = vertices_.size();
          vertices_.push_back({base_->crossing_target(c), {}, false, true});
        }
        Word const u = nf.syllables[i].element;
        Word const v = last ? nf.syllables[n].element : Word{};
        if (c.dir > 0) {
          edges_.push_back({c.edge, cur, next, u, v, false, true});
        } else {
          edges_.push_back({c.edge, next, cur, inverse(v), inverse(u), false, true});
        }
        cur = next;
      }
    }

    // Folds and edge-group transfers to a fixed point.
    void fold() {
      for (std::size_t guard = 0; guard < 4096; ++guard) {
        if (fold_once()) {
          continue;
        }
        if (!transfer_once()) {
          return;
        }
      }
      warnings_.push_back("folding stopped after 4096 steps");
      fold_complete_ = false;
    }

    // One frontier lift for every missing edge incidence; returns the
    // number of edges added.
    std::size_t expand_round() {
      std::size_t added = 0;
      for (auto x : alive_vertices()) {
        auto const              inc = incidences(x);
        std::set<std::pair<std::size_t, int>> present;
        for (auto i : inc) {
          present.insert({edges_[i.edge].base_edge, i.side});
        }
        std::size_t const v = vertices_[x].base_vertex;
        for (std::size_t e = 0; e < base_->edges().size(); ++e) {
          auto const& ed = base_->edge(e);
          for (int side = 0; side < 2; ++side) {
            if (ed.endpoint(side) != v || present.count({e, side})) {
              continue;
            }
            std::size_t const y = vertices_.size();
            vertices_.push_back({ed.endpoint(1 - side), {}, true, true});
            if (side == 0) {
              edges_.push_back({e, x, y, {}, {}, true, true});
            } else {
              edges_.push_back({e, y, x, {}, {}, true, true});
            }
            ++added;
          }
        }
      }
      ++rounds_;
      fold();
      return added;
    }

    // u2 in H_x u1 K, where K is the image of the base edge group on the
    // given side; returns the edge-group coordinates of the K factor.
    std::optional<lattice::Vector> double_coset(std::size_t x, std::size_t e, int side,
                                                Word const& u1, Word const& u2) {
      auto const&       ed = base_->edge(e);
      std::size_t const v  = vertices_[x].base_vertex;
      auto const&       vg = base_->vertex(v);
      auto const&       H  = vertices_[x].subgroup;
      std::size_t const r  = ed.rank;
      if (r == 0) {
        auto m = vg.membership(H, u2 * inverse(u1), budget_);
        note(m);
        return m.is_member() ? std::optional<lattice::Vector>(lattice::Vector{}) : std::nullopt;
      }
      if (H.empty()) {
        Membership m;
        auto       c = base_->edge_coordinates(e, side, inverse(u1) * u2, budget_, &m);
        note(m);
        return c;
      }
      if (vg.kind() == VertexKind::free_abelian) {
        std::vector<lattice::Vector> gens;
        for (auto const& h : H) {
          gens.push_back(abelianize(h, vg.alphabet()));
        }
        for (auto const& k : ed.images(side)) {
          gens.push_back(abelianize(k, vg.alphabet()));
        }
        auto sol = lattice::express(gens, abelianize(inverse(u1) * u2, vg.alphabet()));
        if (!sol) {
          return std::nullopt;
        }
        return lattice::Vector(sol->end() - static_cast<std::ptrdiff_t>(r), sol->end());
      }
      // bounded search over the K factor, by increasing max-norm
      std::int64_t const           span = r == 1 ? static_cast<std::int64_t>(budget_) : 2;
      std::vector<lattice::Vector> box;
      lattice::Vector              p(r, -span);
      while (true) {
        box.push_back(p);
        std::size_t i = 0;
        while (i < r && p[i] == span) {
          p[i++] = -span;
        }
        if (i == r) {
          break;
        }
        ++p[i];
      }
      auto norm = [](lattice::Vector const& v) {
        std::int64_t m = 0;
        for (auto q : v) {
          m = std::max(m, q < 0 ? -q : q);
        }
        return m;
      };
      std::stable_sort(box.begin(), box.end(),
                       [&](auto const& x, auto const& y) { return norm(x) < norm(y); });
      for (auto const& p : box) {
        Word const k = base_->edge_element(e, side, p);
        auto       m = vg.membership(H, u2 * inverse(k) * inverse(u1), budget_);
        if (m.is_member()) {
          return p;
        }
      }
      fold_exact_ = false;
      return std::nullopt;
    }

    EdgeStabilizer stabilizer(std::size_t f, int side) {
      auto const&       ed = base_->edge(edges_[f].base_edge);
      std::size_t const x  = side == 0 ? edges_[f].from : edges_[f].to;
      auto const&       vg = base_->vertex(vertices_[x].base_vertex);
      auto const&       H  = vertices_[x].subgroup;
      std::size_t const r  = ed.rank;
      Word const        u  = outward({f, side});
      EdgeStabilizer    out;
      if (r == 0 || H.empty()) {
        return out;
      }
      if (vg.kind() == VertexKind::free_abelian) {
        std::vector<lattice::Vector> cols;
        for (auto const& h : H) {
          cols.push_back(abelianize(h, vg.alphabet()));
        }
        for (auto const& k : ed.images(side)) {
          cols.push_back(abelianize(k, vg.alphabet()));
        }
        auto const kernel
            = lattice::integer_kernel(lattice::columns_to_matrix(cols, vg.alphabet().size()), cols.size());
        std::vector<lattice::Vector> proj;
        for (auto const& k : kernel) {
          proj.emplace_back(k.end() - static_cast<std::ptrdiff_t>(r), k.end());
        }
        auto const ech = lattice::column_echelon(lattice::columns_to_matrix(proj, r), proj.size());
        for (std::size_t c = 0; c < ech.rank; ++c) {
          lattice::Vector b(r);
          for (std::size_t i = 0; i < r; ++i) {
            b[i] = ech.h[i][c];
          }
          out.basis.push_back(std::move(b));
        }
        return out;
      }
      // in a free locus the least p with u k^p u^-1 in H is at most the
      // node count of H's folded graph
      std::int64_t limit = static_cast<std::int64_t>(budget_);
      if (vg.is_free_locus()) {
        limit = std::max(limit, static_cast<std::int64_t>(SubgroupGraph(H).node_count()));
      }
      for (std::size_t i = 0; i < r; ++i) {
        bool found = false;
        for (std::int64_t p = 1; p <= limit && !found; ++p) {
          lattice::Vector c(r, 0);
          c[i]         = p;
          Word const k = conjugate(u, base_->edge_element(ed_index(f), side, c));
          auto       m = vg.membership(H, k, budget_);
          if (m.is_member()) {
            out.basis.push_back(c);
            found = true;
          } else if (!m.is_nonmember() || !vg.is_exact()) {
            out.exact = false;
          }
        }
        if (!found && !vg.is_free_locus()) {
          out.exact = false;
        }
      }
      if (r >= 2) {
        out.exact = false;
      }
      return out;
    }

    // Local subgroup generator list grows only by non-members.
    bool add_to_subgroup(std::size_t x, Word const& w) {
      Word const r = reduce(w);
      auto const& vg = base_->vertex(vertices_[x].base_vertex);
      if (r.empty() || vg.word_problem(r, budget_) == Verdict::trivial) {
        return false;
      }
      auto& H = vertices_[x].subgroup;
      if (!H.empty() && vg.membership(H, r, budget_).is_member()) {
        return false;
      }
      H.push_back(r);
      return true;
    }

   private:
    std::size_t ed_index(std::size_t f) const { return edges_[f].base_edge; }

    void note(Membership const& m) {
      if (m.is_unknown()) {
        fold_exact_ = false;
      }
    }

    void set_outward(Incidence i, Word const& u) {
      auto& f = edges_[i.edge];
      if (i.side == 0) {
        f.a = reduce(u);
      } else {
        f.b = reduce(inverse(u));
      }
    }

    bool is_trivial_local(std::size_t x, Word const& g) const {
      Word const r = reduce(g);
      return r.empty()
             || base_->vertex(vertices_[x].base_vertex).word_problem(r, budget_) == Verdict::trivial;
    }

    // Change the frame at p by g: outward labels u -> g^-1 u, H -> g^-1 H g.
    void reframe(std::size_t p, Word const& g) {
      if (reduce(g).empty()) {
        return;
      }
      for (auto i : incidences(p)) {
        set_outward(i, inverse(g) * outward(i));
      }
      for (auto& h : vertices_[p].subgroup) {
        h = inverse(g) * h * g;
      }
    }

    void merge(std::size_t keep, std::size_t gone) {
      for (auto& f : edges_) {
        if (!f.alive) {
          continue;
        }
        if (f.from == gone) {
          f.from = keep;
        }
        if (f.to == gone) {
          f.to = keep;
        }
      }
      auto moved = std::move(vertices_[gone].subgroup);
      vertices_[gone].alive = false;
      vertices_[keep].frontier = vertices_[keep].frontier && vertices_[gone].frontier;
      for (auto const& h : moved) {
        add_to_subgroup(keep, h);
      }
    }

    bool fold_once() {
      for (auto x : alive_vertices()) {
        auto const inc = incidences(x);
        for (std::size_t i = 0; i < inc.size(); ++i) {
          for (std::size_t j = i + 1; j < inc.size(); ++j) {
            auto const i1 = inc[i], i2 = inc[j];
            std::size_t const e = edges_[i1.edge].base_edge;
            if (edges_[i2.edge].base_edge != e || i1.side != i2.side) {
              continue;
            }
            auto c = double_coset(x, e, i1.side, outward(i1), outward(i2));
            if (c && fold_pair(x, i1, i2, *c)) {
              return true;
            }
          }
        }
      }
      return false;
    }

    // outward(i2) = h outward(i1) K(c) with h in H_x.
    bool fold_pair(std::size_t x, Incidence i1, Incidence i2, lattice::Vector const& c) {
      std::size_t const e   = edges_[i1.edge].base_edge;
      Word const        cp  = base_->edge_element(e, 1 - i1.side, c);
      Word const        v1  = far_label(i1);
      Word const        v2p = cp * far_label(i2);
      std::size_t const y1  = far_vertex(i1);
      std::size_t const y2  = far_vertex(i2);
      if (y1 == y2) {
        Word const extra = inverse(v1) * v2p;
        edges_[i2.edge].alive = false;
        add_to_subgroup(y1, extra);
        return true;
      }
      Word const g = inverse(v2p) * v1;  // reframe y2 by g makes i2 read like i1
      auto blocked = [&](std::size_t p) { return p == root() || p == x; };
      Incidence   keep_i = i1, drop_i = i2;
      std::size_t keep = y1, gone = y2;
      Word        frame = g;
      if (blocked(y2) && !blocked(y1)) {
        std::swap(keep_i, drop_i);
        std::swap(keep, gone);
        frame = inverse(g);
      }
      if (blocked(gone) && !is_trivial_local(gone, frame)) {
        fold_complete_ = false;
        return false;
      }
      if (gone == root()) {
        std::swap(keep, gone);
        std::swap(keep_i, drop_i);
      }
      edges_[drop_i.edge].alive = false;
      reframe(gone, frame);
      merge(keep, gone);
      return true;
    }

    // Push stabilized edge-group elements across their edge.
    bool transfer_once() {
      bool changed = false;
      for (auto f : alive_edges()) {
        for (int side = 0; side < 2; ++side) {
          auto const st = stabilizer(f, side);
          if (st.basis.empty()) {
            continue;
          }
          Incidence const   other{f, 1 - side};
          std::size_t const y = side == 0 ? edges_[f].to : edges_[f].from;
          Word const        u = outward(other);
          for (auto const& c : st.basis) {
            Word const k = conjugate(u, base_->edge_element(edges_[f].base_edge, 1 - side, c));
            changed      = add_to_subgroup(y, k) || changed;
          }
        }
        if (changed) {
          return true;
        }
      }
      return false;
    }

    std::shared_ptr<GraphOfGroups const> base_;
    std::size_t                          budget_;
    std::vector<CoverVertex>             vertices_;
    std::vector<CoverEdge>               edges_;
    std::vector<Word>                    generators_;
    std::vector<std::string>             warnings_;
    std::size_t                          rounds_        = 0;
    bool                                 fold_exact_    = true;
    bool                                 fold_complete_ = true;
  };

  // Height 0: free summands become trivial vertices with one loop edge per
  // generator; higher stages use the top graph of groups.
  inline std::shared_ptr<GraphOfGroups const> cover_base(Tower const& t) {
    if (t.height() > 0) {
      return std::shared_ptr<GraphOfGroups const>(t.top_ptr(), &t.top().graph());
    }
    auto const&              g0 = t.top().graph();
    std::vector<VertexGroup> vertices;
    std::vector<EdgeGroup>   edges;
    for (std::size_t v = 0; v < g0.vertices().size(); ++v) {
      auto const& vg = g0.vertex(v);
      if (vg.kind() == VertexKind::free) {
        vertices.push_back(VertexGroup::free(vg.label(), Alphabet{}));
      } else {
        vertices.push_back(vg);
      }
    }
    for (auto const& e : g0.edges()) {
      edges.push_back(e);
    }
    for (std::size_t v = 0; v < g0.vertices().size(); ++v) {
      auto const& vg = g0.vertex(v);
      if (vg.kind() != VertexKind::free) {
        continue;
      }
      for (auto const& n : vg.alphabet().names()) {
        edges.push_back({n, 0, v, v, {}, {}});
      }
    }
    return std::make_shared<GraphOfGroups const>(std::move(vertices), std::move(edges));
  }

  // Rewrite a word between alphabets that share generator names.
  inline Word rename_word(Word const& w, Alphabet const& from, Alphabet const& to) {
    Word out;
    for (Letter l : w) {
      out.push_back(letter(to.index(from.name(generator_of(l))), l > 0 ? 1 : -1));
    }
    return out;
  }

  inline CoverGraph expand_cover(std::shared_ptr<GraphOfGroups const> base,
                                 std::vector<Word> const& subgens, std::size_t depth_budget,
                                 std::size_t budget = GraphOfGroups::default_budget) {
    CoverGraph c(std::move(base), budget);
    for (auto const& w : subgens) {
      c.trace(w);
      c.fold();
    }
    for (std::size_t i = 0; i < depth_budget; ++i) {
      c.expand_round();
    }
    return c;
  }

  inline CoverGraph expand_cover(Tower const& t, std::vector<Word> const& subgens,
                                 std::size_t depth_budget,
                                 std::size_t budget = GraphOfGroups::default_budget) {
    auto              base = cover_base(t);
    std::vector<Word> ws;
    for (auto const& w : subgens) {
      ws.push_back(rename_word(w, t.alphabet(), base->alphabet()));
    }
    return expand_cover(base, ws, depth_budget, budget);
  }

  ////////////////////////////////////////////////////////////////////////
  // Core extraction
  ////////////////////////////////////////////////////////////////////////

  enum class PieceKind { strip, annulus, torus_tube };

  inline char const* to_string(PieceKind k) {
    switch (k) {
      case PieceKind::strip:
        return "strip";
      case PieceKind::annulus:
        return "annulus";
      default:
        return "torus-tube";
    }
  }

  struct CoreCells {
    std::vector<std::size_t> vertices;  // cover vertex ids
    std::vector<std::size_t> edges;     // cover edge ids
  };

  struct CoreEdge {
    std::size_t     id = 0;  // cover edge id
    std::size_t     from = 0, to = 0;  // positions in CoreReport::vertices
    std::string     base_edge;
    EdgeStabilizer  stabilizer;
    bool            tree = true;
  };

  struct EdgePiece {
    std::size_t edge = 0;  // position in CoreReport::edges
    PieceKind   kind = PieceKind::strip;
    std::size_t stabilizer_rank = 0;
    bool        exact = true;
    // the piece is supported on its two incident core vertices
    bool        support_in_core = true;
  };

  struct LoopTrace {
    std::vector<std::size_t> vertices;  // cover vertex ids, root first and last
    std::vector<Incidence>   steps;
    std::vector<Word>        elements;  // H-elements at each visited vertex
  };

  struct CoreReport {
    explicit CoreReport(CoverGraph c) : cover(std::move(c)) {}

    CoverGraph                      cover;
    std::vector<std::size_t>        vertices;  // cover vertex ids, BFS order from the root
    std::vector<CoreEdge>           edges;
    std::vector<Word>               tree_words;  // root-to-vertex readings along the BFS tree
    std::vector<EdgePiece>          pieces;
    Presentation                    pi1;
    bool                            pi1_complete = true;
    GroupHom                        realization;  // pi1 generators -> base alphabet
    std::vector<Word>               generators;   // over the base alphabet
    std::vector<Word>               loop_expressions;  // over the pi1 alphabet
    std::int64_t                    euler_characteristic = 0;
    std::size_t                     graph_betti = 0;
    std::vector<std::size_t>        vertex_ranks;
    bool                            vertex_ranks_exact = true;
    std::int64_t                    rank_estimate = 0;
    bool                            free_exact = false;  // pi1 free of rank rank_estimate
    std::optional<std::size_t>      index;  // finite index when the core is a full cover
    std::vector<std::int64_t>       rank_history;
    bool                            stabilized = false;
    std::string                     criterion
        = "heuristic: generator loops closed and two expansion rounds add no rank";
    bool                            exact = false;
    std::vector<bool>               required_covered;
    std::string                     canonical;
    std::vector<std::string>        warnings;
  };

  namespace detail {

    inline std::optional<LoopTrace> read_loop(CoverGraph& c, Word const& w) {
      auto const&      g  = c.base();
      NormalForm const nf = g.normal_form(w, c.budget());
      if (nf.verdict == Verdict::unknown) {
        return std::nullopt;
      }
      LoopTrace   t;
      std::size_t x   = c.root();
      Word        res = nf.syllables.front().element;
      t.vertices.push_back(x);
      for (std::size_t i = 0; i < nf.crossings.size(); ++i) {
        Crossing const cr   = nf.crossings[i];
        int const      side = cr.dir > 0 ? 0 : 1;
        bool           moved = false;
        for (auto inc : c.incidences(x)) {
          if (c.edges()[inc.edge].base_edge != cr.edge || inc.side != side) {
            continue;
          }
          Word const u  = c.outward(inc);
          auto const co = c.double_coset(x, cr.edge, side, u, res);
          if (!co) {
            continue;
          }
          Word const k = g.edge_element(cr.edge, side, *co);
          t.elements.push_back(res * inverse(k) * inverse(u));
          t.steps.push_back(inc);
          Word const kp = g.edge_element(cr.edge, 1 - side, *co);
          res           = inverse(c.far_label(inc)) * kp * nf.syllables[i + 1].element;
          x             = c.far_vertex(inc);
          t.vertices.push_back(x);
          moved = true;
          break;
        }
        if (!moved) {
          return std::nullopt;
        }
      }
      if (x != c.root()) {
        return std::nullopt;
      }
      auto const& vg = g.vertex(c.vertices()[x].base_vertex);
      if (!reduce(res).empty() && !vg.membership(c.vertices()[x].subgroup, res, c.budget()).is_member()) {
        return std::nullopt;
      }
      t.elements.push_back(reduce(res));
      return t;
    }

    inline std::size_t subgroup_rank(VertexGroup const& vg, std::vector<Word> const& H, bool& exact) {
      if (H.empty()) {
        return 0;
      }
      if (vg.is_free_locus()) {
        return SubgroupGraph(H).rank();
      }
      if (vg.kind() == VertexKind::free_abelian) {
        std::vector<lattice::Vector> vs;
        for (auto const& h : H) {
          vs.push_back(abelianize(h, vg.alphabet()));
        }
        return lattice::rank(lattice::columns_to_matrix(vs, vg.alphabet().size()), vs.size());
      }
      exact = false;
      return H.size();
    }

    inline std::int64_t total_rank(CoverGraph& c) {
      auto const   vs = c.alive_vertices();
      auto const   es = c.alive_edges();
      bool         exact = true;
      std::int64_t r = static_cast<std::int64_t>(es.size()) - static_cast<std::int64_t>(vs.size()) + 1;
      for (auto x : vs) {
        r += static_cast<std::int64_t>(
            subgroup_rank(c.base().vertex(c.vertices()[x].base_vertex), c.vertices()[x].subgroup, exact));
      }
      for (auto f : es) {
        r -= static_cast<std::int64_t>(c.stabilizer(f, 0).basis.size());
      }
      return r;
    }

  }  // namespace detail

  inline CoreReport extract_core(CoverGraph const& cover, CoreCells const& required = {}) {
    CoreReport rep(cover);
    CoverGraph& c = rep.cover;
    auto const& g = c.base();
    rep.warnings  = c.warnings();
    rep.generators = c.generators();

    // generator loop supports
    std::set<std::size_t>  vset{c.root()}, eset;
    std::vector<LoopTrace> traces;
    for (auto const& w : c.generators()) {
      auto t = detail::read_loop(c, w);
      if (!t) {
        throw domain_error("generator loop for '" + format_word(w, g.alphabet())
                           + "' does not close; raise the depth budget");
      }
      vset.insert(t->vertices.begin(), t->vertices.end());
      for (auto s : t->steps) {
        eset.insert(s.edge);
      }
      traces.push_back(std::move(*t));
    }
    for (auto v : required.vertices) {
      bool const ok = v < c.vertices().size() && c.vertices()[v].alive;
      rep.required_covered.push_back(ok);
      if (ok) {
        vset.insert(v);
      }
    }
    for (auto f : required.edges) {
      bool const ok = f < c.edges().size() && c.edges()[f].alive;
      rep.required_covered.push_back(ok);
      if (ok) {
        eset.insert(f);
        vset.insert(c.edges()[f].from);
        vset.insert(c.edges()[f].to);
      }
    }

    // connectivity along a BFS tree of the whole generated portion
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> parent;  // vertex -> (edge, prev)
    {
      std::queue<std::size_t> q;
      std::set<std::size_t>   seen{c.root()};
      q.push(c.root());
      while (!q.empty()) {
        std::size_t const x = q.front();
        q.pop();
        for (auto inc : c.incidences(x)) {
          std::size_t const y = c.far_vertex(inc);
          if (seen.insert(y).second) {
            parent[y] = {inc.edge, x};
            q.push(y);
          }
        }
      }
    }
    for (auto v : std::vector<std::size_t>(vset.begin(), vset.end())) {
      for (std::size_t x = v; x != c.root();) {
        auto [f, prev] = parent.at(x);
        eset.insert(f);
        vset.insert(prev);
        x = prev;
      }
    }

    // canonical BFS order inside the core
    auto key = [&](std::size_t x, Incidence i) {
      std::ostringstream os;
      os << c.edges()[i.edge].base_edge << ':' << i.side << ':'
         << format_word(c.outward(i), g.vertex(c.vertices()[x].base_vertex).alphabet()) << ':'
         << format_word(c.far_label(i), g.vertex(c.vertices()[c.far_vertex(i)].base_vertex).alphabet());
      return os.str();
    };
    std::map<std::size_t, std::size_t> pos;
    std::set<std::size_t>              tree_edges;
    {
      std::queue<std::size_t> q;
      q.push(c.root());
      pos[c.root()] = 0;
      rep.vertices.push_back(c.root());
      while (!q.empty()) {
        std::size_t const x = q.front();
        q.pop();
        auto inc = c.incidences(x);
        std::erase_if(inc, [&](Incidence i) { return !eset.count(i.edge); });
        std::sort(inc.begin(), inc.end(),
                  [&](Incidence p, Incidence r) { return key(x, p) < key(x, r); });
        for (auto i : inc) {
          std::size_t const y = c.far_vertex(i);
          if (!pos.count(y)) {
            pos[y] = rep.vertices.size();
            rep.vertices.push_back(y);
            tree_edges.insert(i.edge);
            q.push(y);
          }
        }
      }
    }
    std::vector<std::size_t> ordered_edges(eset.begin(), eset.end());
    std::sort(ordered_edges.begin(), ordered_edges.end(), [&](std::size_t p, std::size_t r) {
      auto const& ep = c.edges()[p];
      auto const& er = c.edges()[r];
      return std::tuple(pos.at(ep.from), pos.at(ep.to), key(ep.from, {p, 0}))
             < std::tuple(pos.at(er.from), pos.at(er.to), key(er.from, {r, 0}));
    });
    for (auto f : ordered_edges) {
      auto const& e = c.edges()[f];
      rep.edges.push_back({f, pos.at(e.from), pos.at(e.to), g.edge(e.base_edge).label,
                           c.stabilizer(f, 0), tree_edges.count(f) > 0});
    }

    // pi1 presentation: H-generators per vertex, one letter per non-tree edge
    std::vector<std::string>              names;
    std::vector<Word>                     images;
    std::vector<std::vector<std::size_t>> hgen(rep.vertices.size());
    std::vector<Word>                     tree_word(rep.vertices.size());
    // tree words from the root
    for (std::size_t i = 1; i < rep.vertices.size(); ++i) {
      std::size_t const x = rep.vertices[i];
      for (auto const& ce : rep.edges) {
        if (!ce.tree) {
          continue;
        }
        auto const& e = c.edges()[ce.id];
        if (e.to == x && pos.at(e.from) < i) {
          tree_word[i] = tree_word[pos.at(e.from)] * c.edge_reading(ce.id);
          break;
        }
        if (e.from == x && pos.at(e.to) < i) {
          tree_word[i] = tree_word[pos.at(e.to)] * inverse(c.edge_reading(ce.id));
          break;
        }
      }
    }
    for (std::size_t i = 0; i < rep.vertices.size(); ++i) {
      std::size_t const x = rep.vertices[i];
      for (std::size_t j = 0; j < c.vertices()[x].subgroup.size(); ++j) {
        hgen[i].push_back(names.size());
        names.push_back("h" + std::to_string(i) + "_" + std::to_string(j + 1));
        images.push_back(conjugate(tree_word[i],
                                   g.to_global(c.vertices()[x].base_vertex, c.vertices()[x].subgroup[j])));
      }
    }
    std::map<std::size_t, std::size_t> edge_letter;
    for (std::size_t k = 0; k < rep.edges.size(); ++k) {
      auto const& ce = rep.edges[k];
      if (ce.tree) {
        continue;
      }
      edge_letter[ce.id] = names.size();
      names.push_back("f" + std::to_string(k + 1));
      images.push_back(tree_word[ce.from] * c.edge_reading(ce.id) * inverse(tree_word[ce.to]));
    }
    rep.tree_words = tree_word;
    Alphabet const pa(names);
    rep.pi1.alphabet = pa;
    rep.realization  = GroupHom(pa, g.alphabet(), images);

    // Express a local element of H at core position i in pi1 letters.
    auto express = [&](std::size_t i, Word const& h) -> std::optional<Word> {
      std::size_t const x  = rep.vertices[i];
      auto const&       vg = g.vertex(c.vertices()[x].base_vertex);
      if (reduce(h).empty()) {
        return Word{};
      }
      auto m = vg.membership(c.vertices()[x].subgroup, h, c.budget());
      if (!m.is_member()) {
        return std::nullopt;
      }
      Word out;
      for (Letter l : m.expression) {
        out.push_back(letter(hgen[i][generator_of(l)], l > 0 ? 1 : -1));
      }
      return out;
    };
    for (auto const& ce : rep.edges) {
      auto const& e  = c.edges()[ce.id];
      for (auto const& co : ce.stabilizer.basis) {
        Word const hx = conjugate(c.outward({ce.id, 0}), g.edge_element(e.base_edge, 0, co));
        Word const hy = conjugate(c.outward({ce.id, 1}), g.edge_element(e.base_edge, 1, co));
        auto const ex = express(ce.from, hx);
        auto const ey = express(ce.to, hy);
        if (!ex || !ey) {
          rep.pi1_complete = false;
          continue;
        }
        Word rel = *ex;
        if (!ce.tree) {
          Word const fl{letter(edge_letter.at(ce.id))};
          rel = rel * fl * inverse(*ey) * inverse(fl);
        } else {
          rel = rel * inverse(*ey);
        }
        if (!rel.empty()) {
          rep.pi1.relators.push_back(rel);
        }
      }
    }

    // loop expressions
    for (std::size_t k = 0; k < traces.size(); ++k) {
      auto const& t = traces[k];
      Word        expr;
      bool        ok = true;
      for (std::size_t s = 0; s < t.elements.size(); ++s) {
        auto ex = express(pos.at(t.vertices[s]), t.elements[s]);
        if (!ex) {
          ok = false;
          break;
        }
        expr.append(*ex);
        if (s < t.steps.size()) {
          auto const st = t.steps[s];
          if (edge_letter.count(st.edge)) {
            expr.push_back(letter(edge_letter.at(st.edge), st.side == 0 ? 1 : -1));
          }
        }
      }
      if (!ok) {
        throw domain_error("generator '" + format_word(rep.generators[k], g.alphabet())
                           + "' has no loop expression in the core");
      }
      expr = reduce(expr);
      if (g.word_problem(rep.realization(expr) * inverse(rep.generators[k]), c.budget())
          != Verdict::trivial) {
        throw domain_error("loop expression of '" + format_word(rep.generators[k], g.alphabet())
                           + "' does not read the generator");
      }
      rep.loop_expressions.push_back(expr);
    }

    // Betti bookkeeping
    rep.euler_characteristic
        = static_cast<std::int64_t>(rep.vertices.size()) - static_cast<std::int64_t>(rep.edges.size());
    rep.graph_betti = static_cast<std::size_t>(1 - rep.euler_characteristic);
    std::int64_t r  = static_cast<std::int64_t>(rep.graph_betti);
    bool         free_vertices = true;
    for (auto x : rep.vertices) {
      auto const& vg = g.vertex(c.vertices()[x].base_vertex);
      rep.vertex_ranks.push_back(detail::subgroup_rank(vg, c.vertices()[x].subgroup, rep.vertex_ranks_exact));
      r += static_cast<std::int64_t>(rep.vertex_ranks.back());
      if (!c.vertices()[x].subgroup.empty() && !vg.is_free_locus()
          && !(vg.kind() == VertexKind::free_abelian && rep.vertex_ranks.back() <= 1)) {
        free_vertices = false;
      }
    }
    bool all_trivial_stabs = true;
    bool stabs_exact       = true;
    for (std::size_t k = 0; k < rep.edges.size(); ++k) {
      auto const&       st = rep.edges[k].stabilizer;
      std::size_t const sr = st.basis.size();
      r -= static_cast<std::int64_t>(sr);
      all_trivial_stabs = all_trivial_stabs && sr == 0;
      stabs_exact       = stabs_exact && st.exact;
      rep.pieces.push_back({k, sr == 0 ? PieceKind::strip : sr == 1 ? PieceKind::annulus : PieceKind::torus_tube,
                            sr, st.exact, true});
    }
    rep.rank_estimate = r;
    rep.free_exact    = all_trivial_stabs && stabs_exact && free_vertices && rep.vertex_ranks_exact;

    // full cover of a base with trivial vertex groups
    bool full = true;
    for (auto x : rep.vertices) {
      std::size_t const v = c.vertices()[x].base_vertex;
      full = full && g.vertex(v).alphabet().empty();
      std::set<std::pair<std::size_t, int>> present;
      for (auto inc : c.incidences(x)) {
        if (eset.count(inc.edge)) {
          present.insert({c.edges()[inc.edge].base_edge, inc.side});
        }
      }
      for (std::size_t e = 0; e < g.edges().size(); ++e) {
        for (int side = 0; side < 2; ++side) {
          if (g.edge(e).endpoint(side) == v && !present.count({e, side})) {
            full = false;
          }
        }
      }
    }
    if (full) {
      rep.index = rep.vertices.size();
    }

    // stabilization evidence
    CoverGraph probe = c;
    rep.rank_history.push_back(detail::total_rank(probe));
    for (int i = 0; i < 2; ++i) {
      probe.expand_round();
      rep.rank_history.push_back(detail::total_rank(probe));
    }
    rep.stabilized = rep.rank_history[0] == rep.rank_history[1] && rep.rank_history[1] == rep.rank_history[2];
    bool trivial_vertices = true;
    for (auto const& vg : g.vertices()) {
      trivial_vertices = trivial_vertices && vg.alphabet().empty();
    }
    rep.exact = c.fold_exact() && c.fold_complete() && (trivial_vertices || rep.index.has_value());
    if (rep.exact) {
      rep.criterion = "exact: folded cover of a graph with trivial vertex groups";
    }

    // canonical form
    std::ostringstream os;
    for (std::size_t i = 0; i < rep.vertices.size(); ++i) {
      std::size_t const x  = rep.vertices[i];
      auto const&       vg = g.vertex(c.vertices()[x].base_vertex);
      os << 'v' << i << ':' << vg.label() << '[';
      for (auto const& h : c.vertices()[x].subgroup) {
        os << format_word(h, vg.alphabet()) << ';';
      }
      os << "]\n";
    }
    for (auto const& ce : rep.edges) {
      os << 'e' << ce.from << "->" << ce.to << ':' << ce.base_edge << ':' << key(c.edges()[ce.id].from, {ce.id, 0})
         << '\n';
    }
    rep.canonical = os.str();
    if (!c.fold_complete()) {
      rep.warnings.push_back("some folds were skipped because they would move the base frame");
    }
    return rep;
  }

  inline std::vector<EdgePiece> classify_edge_pieces(CoreReport const& r) { return r.pieces; }

}  // namespace rft
