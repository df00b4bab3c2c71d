#pragma once

// Graphs of groups with free-abelian edge groups: fundamental-group
// presentations and the Bass–Serre (Britton / amalgam) normal form that
// decides the word problem relative to the vertex groups.
//
// Conventions.  Edge e runs src -> tgt with images alpha (in src) and
// omega (in tgt).  A tree edge identifies alpha(x) = omega(x); a non-tree
// edge has a stable letter named after the edge with
//   t omega(x) t^-1 = alpha(x),
// so a pinch is  t^-1 alpha(x) t  or  t omega(x) t^-1.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rft/errors.hpp"
#include "rft/lattice.hpp"
#include "rft/presentation.hpp"
#include "rft/vertex_group.hpp"
#include "rft/words.hpp"

namespace rft {

  struct EdgeGroup {
    std::string       label;
    std::size_t       rank = 0;
    std::size_t       src  = 0;
    std::size_t       tgt  = 0;
    std::vector<Word> src_images;  // local words of the src vertex group
    std::vector<Word> tgt_images;  // local words of the tgt vertex group

    std::vector<Word> const& images(int side) const { return side == 0 ? src_images : tgt_images; }
    std::size_t endpoint(int side) const { return side == 0 ? src : tgt; }
  };

  // dir = +1 crosses src -> tgt, dir = -1 crosses tgt -> src.
  struct Crossing {
    std::size_t edge;
    int         dir;
    friend bool operator==(Crossing const&, Crossing const&) = default;
  };

  struct Syllable {
    std::size_t vertex;
    Word        element;  // local word of the vertex group
  };

  struct NormalForm {
    std::vector<Syllable>    syllables;  // syllables.size() == crossings.size() + 1
    std::vector<Crossing>    crossings;
    Verdict                  verdict = Verdict::unknown;
    std::vector<std::string> notes;  // budget-limited membership queries
  };

  class GraphOfGroups {
   public:
    static constexpr std::size_t default_budget = 16;

    GraphOfGroups(std::vector<VertexGroup> vertices, std::vector<EdgeGroup> edges,
                  std::size_t base = 0)
        : vertices_(std::move(vertices)), edges_(std::move(edges)), base_(base) {
      if (vertices_.empty()) {
        throw domain_error("graph of groups needs at least one vertex");
      }
      if (base_ >= vertices_.size()) {
        throw domain_error("base vertex out of range");
      }
      validate_edges();
      build_tree();
      build_alphabet();
    }

    std::vector<VertexGroup> const& vertices() const noexcept { return vertices_; }
    std::vector<EdgeGroup> const& edges() const noexcept { return edges_; }
    VertexGroup const& vertex(std::size_t v) const { return vertices_.at(v); }
    EdgeGroup const& edge(std::size_t e) const { return edges_.at(e); }
    std::size_t base() const noexcept { return base_; }
    bool is_tree_edge(std::size_t e) const { return in_tree_.at(e); }
    Alphabet const& alphabet() const noexcept { return alphabet_; }

    std::optional<std::size_t> find_vertex(std::string const& label) const {
      for (std::size_t v = 0; v < vertices_.size(); ++v) {
        if (vertices_[v].label() == label) {
          return v;
        }
      }
      return std::nullopt;
    }

    // Local word of vertex v rewritten over the global alphabet (hidden
    // generators substituted through their tree edge).
    Word to_global(std::size_t v, Word const& local) const {
      Word out;
      for (Letter l : local) {
        auto const& m = local_to_global_[v][generator_of(l)];
        out.append(l > 0 ? m : inverse(m));
      }
      return reduce(out);
    }

    Presentation fundamental_presentation() const {
      Presentation p{alphabet_, {}};
      auto         add = [&](Word const& r) {
        Word red = reduce(r);
        if (!red.empty()) {
          p.relators.push_back(std::move(red));
        }
      };
      for (std::size_t v = 0; v < vertices_.size(); ++v) {
        for (auto const& r : vertices_[v].relators()) {
          add(to_global(v, r));
        }
      }
      for (std::size_t e = 0; e < edges_.size(); ++e) {
        auto const& ed = edges_[e];
        for (std::size_t i = 0; i < ed.rank; ++i) {
          Word a = to_global(ed.src, ed.src_images[i]);
          Word o = to_global(ed.tgt, ed.tgt_images[i]);
          if (in_tree_[e]) {
            if (eliminates_hidden(e, i)) {
              continue;
            }
            add(a * inverse(o));
          } else {
            Word t{letter(stable_letter_.at(e))};
            add(t * o * inverse(t) * inverse(a));
          }
        }
      }
      return p;
    }

    NormalForm normal_form(Word const& w, std::size_t budget = default_budget) const {
      check_word(alphabet_, w);
      Reducer red(*this, budget);
      for (Letter l : reduce(w)) {
        auto const& [kind, index] = letter_home_[generator_of(l)];
        if (kind == Home::vertex) {
          red.move_to(index);
          red.append(local_letter(l));
        } else {
          auto const& ed   = edges_[index];
          int const   dir  = sign_of(l);
          red.move_to(dir > 0 ? ed.src : ed.tgt);
          red.cross({index, dir});
        }
      }
      red.move_to(base_);
      return red.finish();
    }

    Verdict word_problem(Word const& w, std::size_t budget = default_budget) const {
      return normal_form(w, budget).verdict;
    }

    // Which edge-image coordinates represent g on the given side of edge e.
    std::optional<std::vector<std::int64_t>> edge_coordinates(std::size_t e, int side,
                                                              Word const& g, std::size_t budget,
                                                              Membership* detail = nullptr) const {
      auto const& ed = edges_[e];
      auto const& vg = vertices_[ed.endpoint(side)];
      Membership  m  = vg.membership(ed.images(side), g, budget, /*known_abelian=*/true);
      if (detail) {
        *detail = m;
      }
      if (!m.is_member()) {
        return std::nullopt;
      }
      return abelianize(m.expression, ed.rank);
    }

    Word edge_element(std::size_t e, int side, std::vector<std::int64_t> const& coords) const {
      auto const& ed = edges_[e];
      Word        out;
      for (std::size_t i = 0; i < ed.rank; ++i) {
        out.append(power(ed.images(side)[i], coords[i]));
      }
      return reduce(out);
    }

    // Tree path between two vertices as crossings.
    std::vector<Crossing> tree_path(std::size_t from, std::size_t to) const {
      std::vector<Crossing> up, down;
      std::size_t           a = from, b = to;
      while (depth_[a] > depth_[b]) {
        up.push_back(step_to_parent(a));
        a = parent_[a];
      }
      while (depth_[b] > depth_[a]) {
        down.push_back(step_to_parent(b));
        b = parent_[b];
      }
      while (a != b) {
        up.push_back(step_to_parent(a));
        a = parent_[a];
        down.push_back(step_to_parent(b));
        b = parent_[b];
      }
      for (auto it = down.rbegin(); it != down.rend(); ++it) {
        up.push_back({it->edge, -it->dir});
      }
      return up;
    }

    // Vertex reached after crossing c from its origin.
    std::size_t crossing_target(Crossing c) const {
      auto const& ed = edges_[c.edge];
      return c.dir > 0 ? ed.tgt : ed.src;
    }
    std::size_t crossing_origin(Crossing c) const {
      auto const& ed = edges_[c.edge];
      return c.dir > 0 ? ed.src : ed.tgt;
    }

    // Global word of a path of syllables and crossings.
    Word path_word(std::vector<Syllable> const& syl, std::vector<Crossing> const& cr) const {
      Word out = to_global(syl.front().vertex, syl.front().element);
      for (std::size_t i = 0; i < cr.size(); ++i) {
        if (!in_tree_[cr[i].edge]) {
          out.push_back(letter(stable_letter_.at(cr[i].edge), cr[i].dir));
        }
        out.append(to_global(syl[i + 1].vertex, syl[i + 1].element));
      }
      return reduce(out);
    }

    std::optional<std::size_t> stable_letter(std::size_t e) const {
      if (in_tree_[e]) {
        return std::nullopt;
      }
      return stable_letter_.at(e);
    }

    // Global generator of vertex v's local generator g, if it is not hidden.
    std::optional<std::size_t> global_generator(std::size_t v, std::size_t g) const {
      auto const& w = local_to_global_[v][g];
      if (vertices_[v].is_hidden(g) || w.size() != 1) {
        return std::nullopt;
      }
      return generator_of(w[0]);
    }

   private:
    enum class Home { vertex, edge };

    class Reducer {
     public:
      Reducer(GraphOfGroups const& g, std::size_t budget) : g_(g), budget_(budget) {
        syl_.push_back({g.base_, {}});
      }

      void append(Letter local) { syl_.back().element.push_back(local); }

      void move_to(std::size_t v) {
        std::size_t here = syl_.back().vertex;
        if (here == v) {
          return;
        }
        for (auto c : g_.tree_path(here, v)) {
          cross(c);
        }
      }

      void cross(Crossing c) {
        if (!cr_.empty() && cr_.back().edge == c.edge && cr_.back().dir == -c.dir) {
          int const   side = c.dir > 0 ? 0 : 1;  // side of the element between
          Word const  elem = g_.vertices_[syl_.back().vertex].normalize(syl_.back().element);
          Membership  m;
          auto coords = g_.edge_coordinates(c.edge, side, elem, budget_, &m);
          if (coords) {
            Word across = g_.edge_element(c.edge, 1 - side, *coords);
            syl_.pop_back();
            cr_.pop_back();
            syl_.back().element.append(across);
            syl_.back().element = reduce(syl_.back().element);
            return;
          }
          if (m.is_unknown()) {
            notes_.push_back("edge " + g_.edges_[c.edge].label + ": " + m.reason);
          }
        }
        syl_.back().element = g_.vertices_[syl_.back().vertex].normalize(syl_.back().element);
        cr_.push_back(c);
        syl_.push_back({g_.crossing_target(c), {}});
      }

      NormalForm finish() {
        NormalForm nf;
        syl_.back().element = g_.vertices_[syl_.back().vertex].normalize(syl_.back().element);
        if (cr_.empty()) {
          nf.verdict = g_.vertices_[syl_.front().vertex].word_problem(syl_.front().element, budget_);
        } else {
          nf.verdict = notes_.empty() ? Verdict::nontrivial : Verdict::unknown;
        }
        nf.syllables = std::move(syl_);
        nf.crossings = std::move(cr_);
        nf.notes     = std::move(notes_);
        return nf;
      }

     private:
      GraphOfGroups const&     g_;
      std::size_t              budget_;
      std::vector<Syllable>    syl_;
      std::vector<Crossing>    cr_;
      std::vector<std::string> notes_;
    };

    Letter local_letter(Letter global) const {
      return letter(letter_local_[generator_of(global)], sign_of(global));
    }

    Crossing step_to_parent(std::size_t v) const {
      auto const& ed = edges_[parent_edge_[v]];
      return {parent_edge_[v], ed.src == v ? 1 : -1};
    }

    bool eliminates_hidden(std::size_t e, std::size_t i) const {
      auto const& ed = edges_[e];
      auto        hidden_letter = [&](std::size_t v, Word const& w) {
        return w.size() == 1 && w[0] > 0 && vertices_[v].is_hidden(generator_of(w[0]));
      };
      return hidden_letter(ed.tgt, ed.tgt_images[i]) || hidden_letter(ed.src, ed.src_images[i]);
    }

    void validate_edges() {
      for (auto const& ed : edges_) {
        if (ed.src >= vertices_.size() || ed.tgt >= vertices_.size()) {
          throw domain_error("edge " + ed.label + " has an endpoint out of range");
        }
        if (ed.src_images.size() != ed.rank || ed.tgt_images.size() != ed.rank) {
          throw domain_error("edge " + ed.label + " needs one image per edge generator on each side");
        }
        for (int side = 0; side < 2; ++side) {
          auto const& vg = vertices_[ed.endpoint(side)];
          for (auto const& w : ed.images(side)) {
            check_word(vg.alphabet(), w);
          }
          check_monomorphism(ed, side);
        }
      }
    }

    void check_monomorphism(EdgeGroup const& ed, int side) const {
      auto const& vg   = vertices_[ed.endpoint(side)];
      auto const& imgs = ed.images(side);
      if (ed.rank == 1) {
        if (vg.word_problem(imgs[0], default_budget) != Verdict::nontrivial) {
          throw domain_error("edge " + ed.label + ": image in " + vg.label()
                             + " is not certified nontrivial");
        }
        return;
      }
      if (ed.rank < 2) {
        return;
      }
      switch (vg.kind()) {
        case VertexKind::free_abelian: {
          lattice::Matrix m;
          for (auto const& w : imgs) {
            m.push_back(abelianize(w, vg.alphabet()));
          }
          if (lattice::rank(m, vg.alphabet().size()) != ed.rank) {
            throw domain_error("edge " + ed.label + ": images in " + vg.label()
                               + " are linearly dependent");
          }
          return;
        }
        case VertexKind::composite: {
          for (std::size_t i = 0; i < imgs.size(); ++i) {
            for (std::size_t j = i + 1; j < imgs.size(); ++j) {
              if (vg.word_problem(commutator(imgs[i], imgs[j]), default_budget)
                  != Verdict::trivial) {
                throw domain_error("edge " + ed.label + ": images in " + vg.label()
                                   + " do not commute");
              }
            }
          }
          if (vg.oracle()->certified_rank(imgs) != ed.rank) {
            throw domain_error("edge " + ed.label + ": cannot certify that the images in "
                               + vg.label() + " generate a free abelian group of rank "
                               + std::to_string(ed.rank));
          }
          return;
        }
        default:
          throw domain_error("edge " + ed.label + ": " + to_string(vg.kind())
                             + " groups have no free abelian subgroups of rank >= 2");
      }
    }

    void build_tree() {
      std::size_t const n = vertices_.size();
      parent_.assign(n, n);
      parent_edge_.assign(n, 0);
      depth_.assign(n, 0);
      in_tree_.assign(edges_.size(), false);
      std::vector<bool>       seen(n, false);
      std::deque<std::size_t> queue{base_};
      seen[base_] = true;
      while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t e = 0; e < edges_.size(); ++e) {
          auto const& ed = edges_[e];
          if (ed.src != v && ed.tgt != v) {
            continue;
          }
          std::size_t u = ed.src == v ? ed.tgt : ed.src;
          if (!seen[u]) {
            seen[u]        = true;
            in_tree_[e]    = true;
            parent_[u]     = v;
            parent_edge_[u] = e;
            depth_[u]      = depth_[v] + 1;
            queue.push_back(u);
          }
        }
      }
      if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw domain_error("graph of groups is disconnected");
      }
    }

    void build_alphabet() {
      std::vector<std::string> names;
      local_to_global_.resize(vertices_.size());
      for (std::size_t v = 0; v < vertices_.size(); ++v) {
        auto const& vg = vertices_[v];
        for (std::size_t g = 0; g < vg.alphabet().size(); ++g) {
          if (vg.is_hidden(g)) {
            continue;
          }
          letter_home_.push_back({Home::vertex, v});
          letter_local_.push_back(g);
          names.push_back(vg.alphabet().name(g));
        }
      }
      for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (in_tree_[e]) {
          continue;
        }
        stable_letter_[e] = names.size();
        letter_home_.push_back({Home::edge, e});
        letter_local_.push_back(0);
        names.push_back(edges_[e].label);
      }
      alphabet_ = Alphabet(names);  // throws on duplicate names
      for (std::size_t v = 0; v < vertices_.size(); ++v) {
        local_to_global_[v].assign(vertices_[v].alphabet().size(), Word{});
      }
      for (std::size_t g = 0; g < letter_home_.size(); ++g) {
        if (letter_home_[g].first == Home::vertex) {
          local_to_global_[letter_home_[g].second][letter_local_[g]] = Word{letter(g)};
        }
      }
      // hidden generators: substitute the image on the other side of a tree edge
      std::vector<std::vector<bool>> done(vertices_.size());
      for (std::size_t v = 0; v < vertices_.size(); ++v) {
        done[v].assign(vertices_[v].alphabet().size(), true);
        for (std::size_t g = 0; g < vertices_[v].alphabet().size(); ++g) {
          if (vertices_[v].is_hidden(g)) {
            done[v][g] = false;
          }
        }
      }
      bool progress = true;
      while (progress) {
        progress = false;
        for (std::size_t e = 0; e < edges_.size(); ++e) {
          if (!in_tree_[e]) {
            continue;
          }
          auto const& ed = edges_[e];
          for (std::size_t i = 0; i < ed.rank; ++i) {
            for (int side = 0; side < 2; ++side) {
              std::size_t v = ed.endpoint(side), u = ed.endpoint(1 - side);
              Word const& w = ed.images(side)[i];
              if (w.size() != 1 || w[0] < 0 || !vertices_[v].is_hidden(generator_of(w[0]))
                  || done[v][generator_of(w[0])]) {
                continue;
              }
              Word const& other = ed.images(1 - side)[i];
              bool        ready = true;
              for (Letter l : other) {
                ready = ready && done[u][generator_of(l)];
              }
              if (ready) {
                local_to_global_[v][generator_of(w[0])] = to_global(u, other);
                done[v][generator_of(w[0])]             = true;
                progress                                = true;
              }
            }
          }
        }
      }
      for (std::size_t v = 0; v < vertices_.size(); ++v) {
        for (std::size_t g = 0; g < done[v].size(); ++g) {
          if (!done[v][g]) {
            throw domain_error("hidden generator " + vertices_[v].alphabet().name(g) + " of "
                               + vertices_[v].label()
                               + " is not the image of a tree-edge generator");
          }
        }
      }
    }

    std::vector<VertexGroup> vertices_;
    std::vector<EdgeGroup>   edges_;
    std::size_t              base_;

    std::vector<std::size_t> parent_, parent_edge_, depth_;
    std::vector<bool>        in_tree_;

    Alphabet                                      alphabet_;
    std::vector<std::pair<Home, std::size_t>>     letter_home_;
    std::vector<std::size_t>                      letter_local_;
    std::map<std::size_t, std::size_t>            stable_letter_;
    std::vector<std::vector<Word>>                local_to_global_;
  };

  inline Presentation fundamental_presentation(GraphOfGroups const& g) {
    return g.fundamental_presentation();
  }

  inline NormalForm normal_form(GraphOfGroups const& g, Word const& w,
                                std::size_t budget = GraphOfGroups::default_budget) {
    return g.normal_form(w, budget);
  }

  inline Verdict word_problem(GraphOfGroups const& g, Word const& w,
                              std::size_t budget = GraphOfGroups::default_budget) {
    return g.word_problem(w, budget);
  }

  inline Membership subgroup_membership(VertexGroup const& v, std::vector<Word> const& subgens,
                                        Word const& w,
                                        std::size_t budget = GraphOfGroups::default_budget) {
    return v.membership(subgens, w, budget);
  }

}  // namespace rft
