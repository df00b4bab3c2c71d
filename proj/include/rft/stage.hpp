#pragma once

// ω-residually free towers built from a wedge of circles, tori and closed
// surfaces by abelian (A), quadratic (Q) and torus (T) blocks.
//
// Every stage is a two-vertex graph of groups (previous stage, new piece)
// and doubles as the word-problem strategy of the next stage.  A stage
// also carries "probes": homomorphisms onto free groups (the retraction
// down the tower composed with a resolution of the base, plus integer
// characters).  A nontrivial probe image proves nontriviality, and probe
// images pin down exponents in abelian membership queries.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rft/errors.hpp"
#include "rft/graph_of_groups.hpp"
#include "rft/lattice.hpp"
#include "rft/presentation.hpp"
#include "rft/surface.hpp"
#include "rft/word_syntax.hpp"
#include "rft/words.hpp"

namespace rft {

  struct Summand {
    VertexKind               kind = VertexKind::free;  // free, free_abelian or surface
    std::vector<std::string> gens;
    std::size_t              genus     = 0;
    std::size_t              punctures = 0;

    static Summand free(std::vector<std::string> g) { return {VertexKind::free, std::move(g)}; }
    static Summand abelian(std::vector<std::string> g) {
      return {VertexKind::free_abelian, std::move(g)};
    }
    static Summand surface(std::size_t genus, std::vector<std::string> g,
                           std::size_t punctures = 0) {
      return {VertexKind::surface, std::move(g), genus, punctures};
    }
  };

  // Words refer to the alphabet of the stage the block is attached to.
  struct AbelianBlock {
    Word                     attach;
    std::size_t              rank = 2;  // m: the new torus is T^m
    std::vector<std::string> letters;   // m - 1 new letters
  };

  struct QuadraticBlock {
    SurfacePresentation               surface = SurfacePresentation::bounded(1, 1, {"x", "y"});
    std::vector<std::pair<Word, Word>> boundary;   // surface word -> attaching word
    std::vector<Word>                 retraction;  // image of each surface generator
    std::vector<std::string>          stable_letters;      // one per boundary after the first
    std::vector<Word>                 stable_retraction;   // their images
  };

  struct TorusBlock {
    std::vector<Word>        attach;  // k generators of a maximal abelian subgroup
    std::size_t              rank = 2;  // l > k
    std::vector<std::string> letters;   // l - k new letters
  };

  enum class BlockKind { abelian, quadratic, torus };

  inline char const* to_string(BlockKind k) {
    switch (k) {
      case BlockKind::abelian:
        return "A";
      case BlockKind::quadratic:
        return "Q";
      default:
        return "T";
    }
  }

  enum class AttachPolicy {
    strict,          // every obligation must be verified
    assume_unknown,  // budget-limited obligations are ledgered
    force            // refuted obligations are ledgered too
  };

  struct Block {
    std::variant<AbelianBlock, QuadraticBlock, TorusBlock> data;
    AttachPolicy                                           policy = AttachPolicy::strict;

    BlockKind kind() const noexcept { return static_cast<BlockKind>(data.index()); }
  };

  struct Obligation {
    enum class Status { verified, refuted, budget_limited };

    std::size_t stage = 0;
    std::string check;
    Status      status = Status::verified;
    std::string detail;
  };

  inline char const* to_string(Obligation::Status s) {
    switch (s) {
      case Obligation::Status::verified:
        return "verified";
      case Obligation::Status::refuted:
        return "refuted";
      default:
        return "budget-limited";
    }
  }

  // Lattice of a torus added during the construction (rank >= 2).
  struct TorusLattice {
    std::vector<Word> gens;  // over the alphabet of the stage holding it
    std::size_t       stage = 0;
    std::string       origin;
  };

  class Stage final : public GroupOracle {
   public:
    Stage(std::size_t index, std::shared_ptr<Stage const> previous,
          std::shared_ptr<GraphOfGroups const> graph, std::optional<Block> block,
          GroupHom retraction, std::vector<std::size_t> new_letters,
          std::vector<TorusLattice> lattices)
        : index_(index),
          previous_(std::move(previous)),
          graph_(std::move(graph)),
          presentation_(graph_->fundamental_presentation()),
          block_(std::move(block)),
          retraction_(std::move(retraction)),
          new_letters_(std::move(new_letters)),
          lattices_(std::move(lattices)) {}

    std::size_t index() const noexcept { return index_; }
    std::shared_ptr<Stage const> const& previous() const noexcept { return previous_; }
    GraphOfGroups const& graph() const noexcept { return *graph_; }
    Presentation const& presentation() const noexcept { return presentation_; }
    std::optional<Block> const& block() const noexcept { return block_; }
    GroupHom const& retraction() const noexcept { return retraction_; }
    std::vector<std::size_t> const& new_letters() const noexcept { return new_letters_; }
    std::vector<TorusLattice> const& lattices() const noexcept { return lattices_; }
    std::vector<GroupHom> const& probes() const noexcept { return probes_; }
    bool retraction_verified() const noexcept { return retraction_verified_; }

    void set_probes(std::vector<GroupHom> p) { probes_ = std::move(p); }
    void set_retraction_verified(bool v) { retraction_verified_ = v; }

    // GroupOracle
    Alphabet const& alphabet() const override { return presentation_.alphabet; }
    std::vector<Word> relators() const override { return presentation_.relators; }
    std::string name() const override { return "stage " + std::to_string(index_); }

    Verdict word_problem(Word const& w, std::size_t budget) const override {
      Word const r = reduce(alphabet(), w);
      if (r.empty()) {
        return Verdict::trivial;
      }
      for (auto const& p : probes_) {
        if (!p(r).empty()) {
          return Verdict::nontrivial;
        }
      }
      return graph_->word_problem(r, budget);
    }

    // Equations sum_i c_i e_i = e from every probe in which the subgroup
    // has nontrivial image; std::nullopt when a probe already shows that
    // w is outside the subgroup.
    struct ProbeSystem {
      lattice::Matrix rows;
      lattice::Vector rhs;
      bool            refuted = false;
      std::string     reason;
    };

    ProbeSystem probe_system(std::vector<Word> const& subgens, Word const* w) const {
      ProbeSystem sys;
      for (std::size_t pi = 0; pi < probes_.size(); ++pi) {
        auto const&       p = probes_[pi];
        std::vector<Word> imgs;
        for (auto const& s : subgens) {
          imgs.push_back(p(s));
        }
        Word const img_w = w ? p(*w) : Word{};
        auto       nz    = std::find_if(imgs.begin(), imgs.end(), [](Word const& x) { return !x.empty(); });
        if (nz == imgs.end()) {
          if (!img_w.empty()) {
            sys.refuted = true;
            sys.reason  = "probe " + std::to_string(pi) + " kills the subgroup but not the word";
            return sys;
          }
          continue;
        }
        Word const      root = primitive_root(*nz).root;
        lattice::Vector row;
        bool            usable = true;
        for (auto const& x : imgs) {
          auto e = power_exponent(x, root);
          if (!e) {
            usable = false;
            break;
          }
          row.push_back(*e);
        }
        if (!usable) {
          continue;
        }
        auto e = power_exponent(img_w, root);
        if (!e) {
          sys.refuted = true;
          sys.reason  = "probe " + std::to_string(pi) + " image is not a power of the subgroup root";
          return sys;
        }
        sys.rows.push_back(std::move(row));
        sys.rhs.push_back(*e);
      }
      return sys;
    }

    Membership abelian_membership(std::vector<Word> const& subgens, Word const& w,
                                  std::size_t budget) const override {
      std::size_t const k   = subgens.size();
      ProbeSystem       sys = probe_system(subgens, &w);
      if (sys.refuted) {
        return Membership::nonmember(sys.reason);
      }
      auto const verify = [&](lattice::Vector const& c) -> std::optional<Membership> {
        Word candidate = w;
        for (std::size_t i = 0; i < k; ++i) {
          candidate.append(power(subgens[i], -c[i]));
        }
        switch (word_problem(candidate, budget)) {
          case Verdict::trivial:
            return Membership::member(abelian_word(c));
          case Verdict::nontrivial:
            return std::nullopt;
          default:
            return Membership::unknown("candidate exponents could not be verified within budget");
        }
      };
      auto particular = lattice::solve(sys.rows, sys.rhs, k);
      if (!particular) {
        return Membership::nonmember("probe equations have no integer solution");
      }
      auto kernel = lattice::integer_kernel(sys.rows, k);
      if (kernel.empty()) {
        if (auto m = verify(*particular)) {
          return *m;
        }
        return Membership::nonmember("the unique exponent candidate is not a solution");
      }
      // Underdetermined: bounded search along the kernel.
      auto const      bound = static_cast<std::int64_t>(std::min<std::size_t>(budget, 8));
      std::vector<std::int64_t> coef(kernel.size(), -bound);
      std::size_t               tried = 0;
      while (tried++ < 4096) {
        lattice::Vector c = *particular;
        for (std::size_t j = 0; j < kernel.size(); ++j) {
          for (std::size_t i = 0; i < k; ++i) {
            c[i] += coef[j] * kernel[j][i];
          }
        }
        auto m = verify(c);
        if (m && m->is_member()) {
          return *m;
        }
        std::size_t j = 0;
        while (j < coef.size() && ++coef[j] > bound) {
          coef[j++] = -bound;
        }
        if (j == coef.size()) {
          break;
        }
      }
      return Membership::unknown("probes leave " + std::to_string(kernel.size())
                                 + " free exponent(s); no solution within the search bound");
    }

    std::size_t certified_rank(std::vector<Word> const& commuting) const override {
      auto sys = probe_system(commuting, nullptr);
      return lattice::rank(sys.rows, commuting.size());
    }

   private:
    std::size_t                          index_;
    std::shared_ptr<Stage const>         previous_;
    std::shared_ptr<GraphOfGroups const> graph_;
    Presentation                         presentation_;
    std::optional<Block>                 block_;
    GroupHom                             retraction_;
    std::vector<std::size_t>             new_letters_;
    std::vector<TorusLattice>            lattices_;
    std::vector<GroupHom>                probes_;
    bool                                 retraction_verified_ = true;
  };

  ////////////////////////////////////////////////////////////////////////
  // Resolutions: parametrized homomorphisms from a stage onto a free group
  ////////////////////////////////////////////////////////////////////////

  struct ParamSpec {
    std::string  role;
    std::int64_t lo = 0;
  };

  namespace detail {

    inline std::vector<Stage const*> chain(Stage const& top) {
      std::vector<Stage const*> out;
      for (Stage const* s = &top; s; s = s->previous().get()) {
        out.push_back(s);
      }
      return out;  // top first, stage 0 last
    }

    inline std::size_t block_param_count(Stage const& s) {
      if (!s.block()) {
        return 0;
      }
      auto const& b = *s.block();
      switch (b.kind()) {
        case BlockKind::abelian:
          return std::get<AbelianBlock>(b.data).rank - 1;
        case BlockKind::torus: {
          auto const& t = std::get<TorusBlock>(b.data);
          return t.rank - t.attach.size();
        }
        default:
          return 1;
      }
    }

    // Fresh target names that avoid the stage-0 alphabet.
    inline std::string fresh_name(Alphabet const& avoid, std::vector<std::string> const& taken,
                                  std::size_t& counter) {
      while (true) {
        std::string n = "f" + std::to_string(++counter);
        if (!avoid.contains(n) && std::find(taken.begin(), taken.end(), n) == taken.end()) {
          return n;
        }
      }
    }

    struct BaseTarget {
      std::vector<std::string> names;
      // per base summand vertex: first target letter index
      std::vector<std::size_t> first;
    };

    inline BaseTarget base_target(Stage const& base) {
      BaseTarget  t;
      std::size_t counter = 0;
      auto const& g       = base.graph();
      for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        auto const& vg = g.vertex(v);
        t.first.push_back(t.names.size());
        if (vg.is_free_locus()) {
          for (auto const& n : vg.alphabet().names()) {
            t.names.push_back(n);
          }
        } else if (vg.kind() == VertexKind::free_abelian) {
          t.names.push_back(fresh_name(base.alphabet(), t.names, counter));
        } else {
          for (int i = 0; i < 2; ++i) {
            t.names.push_back(fresh_name(base.alphabet(), t.names, counter));
          }
        }
      }
      return t;
    }

  }  // namespace detail

  // Blocks from the top stage down, then the base summands.
  inline std::vector<ParamSpec> parameter_layout(Stage const& top) {
    std::vector<ParamSpec> out;
    for (Stage const* s : detail::chain(top)) {
      if (s->index() == 0) {
        auto const& g = s->graph();
        for (std::size_t v = 0; v < g.vertices().size(); ++v) {
          auto const& vg = g.vertex(v);
          if (vg.kind() == VertexKind::free_abelian) {
            for (auto const& n : vg.alphabet().names()) {
              out.push_back({"base " + vg.label() + ": " + n + " -> f^N", 1});
            }
          } else if (vg.kind() == VertexKind::surface && vg.surface_presentation()->is_closed()) {
            out.push_back({"base " + vg.label() + ": separating twist power", 0});
          }
        }
        continue;
      }
      auto const  n    = detail::block_param_count(*s);
      auto const& name = s->alphabet();
      for (std::size_t i = 0; i < n; ++i) {
        std::string role = "stage " + std::to_string(s->index()) + " ";
        if (s->block()->kind() == BlockKind::quadratic) {
          role += "boundary twist power";
        } else {
          role += name.name(s->new_letters()[i]) + " -> (attaching word)^N";
        }
        out.push_back({role, 0});
      }
    }
    return out;
  }

  // Stage-n retraction with block letters sent to powers of the attaching
  // data and quadratic blocks precomposed with Dehn twist powers.
  inline GroupHom twisted_retraction(Stage const& s, std::span<std::int64_t const> params) {
    auto images = s.retraction().images();
    if (!s.block()) {
      return s.retraction();
    }
    auto const& b = *s.block();
    switch (b.kind()) {
      case BlockKind::abelian: {
        auto const& a = std::get<AbelianBlock>(b.data);
        for (std::size_t i = 0; i < s.new_letters().size(); ++i) {
          images[s.new_letters()[i]] = power(a.attach, params[i]);
        }
        break;
      }
      case BlockKind::torus: {
        auto const& t = std::get<TorusBlock>(b.data);
        for (std::size_t i = 0; i < s.new_letters().size(); ++i) {
          images[s.new_letters()[i]] = power(t.attach.front(), params[i]);
        }
        break;
      }
      case BlockKind::quadratic: {
        // conjugating the surface by powers of the first boundary image
        auto const&  q = std::get<QuadraticBlock>(b.data);
        Word const   z = power(q.boundary.front().second, params[0]);
        std::size_t const n = q.surface.alphabet().size();
        for (std::size_t i = 0; i < s.new_letters().size(); ++i) {
          Word& im = images[s.new_letters()[i]];
          im       = i < n ? conjugate(z, im) : z * im;
        }
        break;
      }
    }
    return GroupHom(s.alphabet(), s.retraction().target(), std::move(images));
  }

  inline GroupHom base_resolution(Stage const& base, std::span<std::int64_t const> params) {
    auto const        target = detail::base_target(base);
    Alphabet const    tgt(target.names);
    std::vector<Word> images(base.alphabet().size());
    std::size_t       pi = 0;
    auto const&       g  = base.graph();
    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
      auto const& vg    = g.vertex(v);
      std::size_t first = target.first[v];
      auto        gl    = [&](std::size_t local) { return *g.global_generator(v, local); };
      if (vg.is_free_locus()) {
        for (std::size_t i = 0; i < vg.alphabet().size(); ++i) {
          images[gl(i)] = Word{letter(first + i)};
        }
      } else if (vg.kind() == VertexKind::free_abelian) {
        for (std::size_t i = 0; i < vg.alphabet().size(); ++i) {
          images[gl(i)] = power(Word{letter(first)}, params[pi++]);
        }
      } else {
        // handle i goes to c^(iN) (X,Y) c^(-iN) or its mirror (Y,X), with
        // c = [X,Y]; an odd last handle goes to the commuting pair (X, X^2)
        std::size_t const  genus = vg.surface_presentation()->genus();
        std::int64_t const p     = params[pi++];
        Word const         X{letter(first)}, Y{letter(first + 1)};
        Word const         c = commutator(X, Y);
        for (std::size_t h = 0; h < genus; ++h) {
          Word const z = power(c, static_cast<std::int64_t>(h) * p);
          Word       u = h % 2 == 0 ? X : Y, v = h % 2 == 0 ? Y : X;
          if (genus % 2 == 1 && h + 1 == genus) {
            u = X;
            v = power(X, 2);
          }
          images[gl(2 * h)]     = conjugate(z, u);
          images[gl(2 * h + 1)] = conjugate(z, v);
        }
      }
    }
    return GroupHom(base.alphabet(), tgt, std::move(images));
  }

  inline GroupHom resolution(Stage const& top, std::span<std::int64_t const> params) {
    GroupHom    h  = GroupHom::identity(top.alphabet());
    std::size_t at = 0;
    for (Stage const* s : detail::chain(top)) {
      if (s->index() == 0) {
        return compose(base_resolution(*s, params.subspan(at)), h);
      }
      auto const n = detail::block_param_count(*s);
      h            = compose(twisted_retraction(*s, params.subspan(at, n)), h);
      at += n;
    }
    return h;
  }

  inline bool resolution_is_sound(Stage const& top) {
    for (Stage const* s : detail::chain(top)) {
      if (!s->retraction_verified()) {
        return false;
      }
    }
    return true;
  }

  inline std::vector<GroupHom> build_probes(Stage const& s) {
    std::vector<GroupHom> out;
    Alphabet const        z({"z"});
    for (auto const& y : integer_characters(s.presentation())) {
      std::vector<Word> images;
      for (auto c : y) {
        images.push_back(power(Word{letter(0)}, c));
      }
      out.emplace_back(s.alphabet(), z, std::move(images));
    }
    if (!resolution_is_sound(s)) {
      return out;
    }
    auto const layout = parameter_layout(s);
    for (std::int64_t round = 0; round < 4; ++round) {
      std::vector<std::int64_t> params;
      for (std::size_t i = 0; i < layout.size(); ++i) {
        params.push_back(layout[i].lo + (round * static_cast<std::int64_t>(i + 1) + round) % 4);
      }
      out.push_back(resolution(s, params));
    }
    return out;
  }

}  // namespace rft
