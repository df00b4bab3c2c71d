#pragma once

// Vertex groups of a graph of groups and their exact (or budgeted)
// word and membership problems.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rft/errors.hpp"
#include "rft/folding.hpp"
#include "rft/lattice.hpp"
#include "rft/surface.hpp"
#include "rft/words.hpp"

namespace rft {

  enum class Verdict { trivial, nontrivial, unknown };

  inline char const* to_string(Verdict v) {
    switch (v) {
      case Verdict::trivial:
        return "Trivial";
      case Verdict::nontrivial:
        return "Nontrivial";
      default:
        return "Unknown";
    }
  }

  struct Membership {
    enum class Status { member, nonmember, unknown };

    Status      status = Status::unknown;
    Word        expression;  // letters index the subgroup generators
    std::string reason;

    static Membership member(Word expr) { return {Status::member, std::move(expr), {}}; }
    static Membership nonmember(std::string why) { return {Status::nonmember, {}, std::move(why)}; }
    static Membership unknown(std::string why) { return {Status::unknown, {}, std::move(why)}; }

    bool is_member() const noexcept { return status == Status::member; }
    bool is_nonmember() const noexcept { return status == Status::nonmember; }
    bool is_unknown() const noexcept { return status == Status::unknown; }
  };

  // Word-problem strategy of a group that is not one of the exact kinds,
  // in practice an earlier tower stage.
  class GroupOracle {
   public:
    virtual ~GroupOracle() = default;

    virtual Alphabet const&   alphabet() const                                 = 0;
    virtual std::vector<Word> relators() const                                 = 0;
    virtual Verdict           word_problem(Word const& w, std::size_t budget) const = 0;
    // subgens must pairwise commute
    virtual Membership abelian_membership(std::vector<Word> const& subgens, Word const& w,
                                          std::size_t budget) const
        = 0;
    // A lower bound for the rank of the abelian subgroup generated by
    // pairwise commuting words, certified by homomorphisms.
    virtual std::size_t certified_rank(std::vector<Word> const& commuting) const = 0;
    virtual std::string name() const                                            = 0;
  };

  enum class VertexKind { free, free_abelian, surface, composite };

  inline char const* to_string(VertexKind k) {
    switch (k) {
      case VertexKind::free:
        return "free";
      case VertexKind::free_abelian:
        return "abelian";
      case VertexKind::surface:
        return "surface";
      default:
        return "composite";
    }
  }

  inline Word abelian_word(lattice::Vector const& v) {
    Word w;
    for (std::size_t g = 0; g < v.size(); ++g) {
      w.append(power(Word{letter(g)}, v[g]));
    }
    return w;
  }

  class VertexGroup {
   public:
    static VertexGroup free(std::string label, Alphabet gens) {
      return VertexGroup(VertexKind::free, std::move(label), std::move(gens));
    }

    // Generators named in `hidden` exist only inside the vertex group and
    // are eliminated from presentations through a tree edge.
    static VertexGroup free_abelian(std::string label, Alphabet gens,
                                    std::set<std::string> hidden = {}) {
      VertexGroup v(VertexKind::free_abelian, std::move(label), std::move(gens));
      v.hidden_ = std::move(hidden);
      return v;
    }

    static VertexGroup surface(std::string label, SurfacePresentation s) {
      VertexGroup v(VertexKind::surface, std::move(label), s.alphabet());
      v.surface_ = std::move(s);
      return v;
    }

    static VertexGroup composite(std::string label, std::shared_ptr<GroupOracle const> oracle) {
      if (!oracle) {
        throw domain_error("composite vertex group needs a word-problem strategy");
      }
      VertexGroup v(VertexKind::composite, std::move(label), oracle->alphabet());
      v.oracle_ = std::move(oracle);
      return v;
    }

    VertexKind kind() const noexcept { return kind_; }
    std::string const& label() const noexcept { return label_; }
    Alphabet const& alphabet() const noexcept { return alphabet_; }
    bool is_hidden(std::size_t g) const { return hidden_.count(alphabet_.name(g)) > 0; }
    std::set<std::string> const& hidden() const noexcept { return hidden_; }
    std::optional<SurfacePresentation> const& surface_presentation() const noexcept {
      return surface_;
    }
    std::shared_ptr<GroupOracle const> const& oracle() const noexcept { return oracle_; }

    // Free groups and surfaces with boundary: reduced words are normal forms.
    bool is_free_locus() const noexcept {
      return kind_ == VertexKind::free || (kind_ == VertexKind::surface && !surface_->is_closed());
    }
    bool is_exact() const noexcept { return kind_ != VertexKind::composite; }

    std::vector<Word> relators() const {
      std::vector<Word> out;
      switch (kind_) {
        case VertexKind::free_abelian:
          for (std::size_t i = 0; i < alphabet_.size(); ++i) {
            for (std::size_t j = i + 1; j < alphabet_.size(); ++j) {
              out.push_back(commutator(Word{letter(i)}, Word{letter(j)}));
            }
          }
          break;
        case VertexKind::surface:
          if (surface_->is_closed()) {
            out.push_back(surface_->relator());
          }
          break;
        case VertexKind::composite:
          out = oracle_->relators();
          break;
        default:
          break;
      }
      return out;
    }

    Word normalize(Word const& w) const {
      switch (kind_) {
        case VertexKind::free_abelian:
          return abelian_word(abelianize(w, alphabet_));
        case VertexKind::surface:
          return surface_->is_closed() ? dehn_reduce(*surface_, w) : reduce(w);
        default:
          return reduce(w);
      }
    }

    Verdict word_problem(Word const& w, std::size_t budget) const {
      check_word(alphabet_, w);
      switch (kind_) {
        case VertexKind::free:
          return reduce(w).empty() ? Verdict::trivial : Verdict::nontrivial;
        case VertexKind::free_abelian:
          return lattice::is_zero(abelianize(w, alphabet_)) ? Verdict::trivial
                                                            : Verdict::nontrivial;
        case VertexKind::surface:
          return normalize(w).empty() ? Verdict::trivial : Verdict::nontrivial;
        default:
          return oracle_->word_problem(w, budget);
      }
    }

    // Is w in <subgens>?  On success the expression spells w in subgens.
    Membership membership(std::vector<Word> const& subgens, Word const& w, std::size_t budget,
                          bool known_abelian = false) const {
      check_word(alphabet_, w);
      for (auto const& s : subgens) {
        check_word(alphabet_, s);
      }
      if (subgens.empty()) {
        switch (word_problem(w, budget)) {
          case Verdict::trivial:
            return Membership::member({});
          case Verdict::nontrivial:
            return Membership::nonmember("nontrivial element of the trivial subgroup");
          default:
            return Membership::unknown("word problem exhausted its budget");
        }
      }
      if (is_free_locus()) {
        SubgroupGraph graph(subgens);
        if (auto expr = graph.express(w)) {
          return Membership::member(*expr);
        }
        return Membership::nonmember("folded subgroup graph does not read the word as a loop");
      }
      if (kind_ == VertexKind::free_abelian) {
        std::vector<lattice::Vector> vs;
        for (auto const& s : subgens) {
          vs.push_back(abelianize(s, alphabet_));
        }
        if (auto c = lattice::express(vs, abelianize(w, alphabet_))) {
          return Membership::member(abelian_word(*c));
        }
        return Membership::nonmember("exponent vector outside the sublattice");
      }
      if (kind_ == VertexKind::surface) {
        return surface_cyclic_membership(subgens, w, budget);
      }
      if (!known_abelian) {
        for (std::size_t i = 0; i < subgens.size(); ++i) {
          for (std::size_t j = i + 1; j < subgens.size(); ++j) {
            if (oracle_->word_problem(commutator(subgens[i], subgens[j]), budget)
                != Verdict::trivial) {
              if (auto expr = short_expression(subgens, w, budget)) {
                return Membership::member(*expr);
              }
              return Membership::unknown(
                  "no short product of the generators equals the word; membership in non-abelian "
                  "subgroups of composite groups is semi-decided only");
            }
          }
        }
      }
      return oracle_->abelian_membership(subgens, w, budget);
    }

   private:
    // Products of the generators by increasing length, at most 1000 candidates.
    std::optional<Word> short_expression(std::vector<Word> const& subgens, Word const& w,
                                         std::size_t budget) const {
      std::size_t radius = 0, count = 1;
      while (radius < budget && count * 2 * subgens.size() <= 1000) {
        count *= 2 * subgens.size();
        ++radius;
      }
      for (auto const& e : enumerate_ball(subgens.size(), radius)) {
        Word img;
        for (auto l : e) {
          Word const& g = subgens[generator_of(l)];
          img.append(sign_of(l) > 0 ? g : inverse(g));
        }
        if (oracle_->word_problem(reduce(img) * inverse(w), budget) == Verdict::trivial) {
          return e;
        }
      }
      return std::nullopt;
    }

    VertexGroup(VertexKind kind, std::string label, Alphabet gens)
        : kind_(kind), label_(std::move(label)), alphabet_(std::move(gens)) {}

    Membership surface_cyclic_membership(std::vector<Word> const& subgens, Word const& w,
                                         std::size_t budget) const {
      Word const& u = subgens.front();
      for (std::size_t i = 1; i < subgens.size(); ++i) {
        if (!normalize(subgens[i] * inverse(u)).empty()) {
          return Membership::unknown(
              "membership in non-cyclic subgroups of closed surface groups is not implemented");
        }
      }
      auto const uab = abelianize(u, alphabet_);
      auto const wab = abelianize(w, alphabet_);
      auto const accept = [&](std::int64_t k) {
        Word expr = power(Word{letter(0)}, k);
        return Membership::member(expr);
      };
      if (!lattice::is_zero(uab)) {
        std::optional<std::int64_t> k;
        for (std::size_t g = 0; g < uab.size(); ++g) {
          if (uab[g] != 0) {
            if (wab[g] % uab[g] != 0) {
              return Membership::nonmember("abelianization is not a multiple");
            }
            k = wab[g] / uab[g];
            break;
          }
        }
        for (std::size_t g = 0; g < uab.size(); ++g) {
          if (wab[g] != *k * uab[g]) {
            return Membership::nonmember("abelianization is not a multiple");
          }
        }
        if (normalize(w * power(u, -*k)).empty()) {
          return accept(*k);
        }
        return Membership::nonmember("the only candidate power fails Dehn's algorithm");
      }
      if (!lattice::is_zero(wab)) {
        return Membership::nonmember("abelianization is nonzero but the generator's is zero");
      }
      auto const bound = static_cast<std::int64_t>(budget);
      for (std::int64_t k = -bound; k <= bound; ++k) {
        if (normalize(w * power(u, -k)).empty()) {
          return accept(k);
        }
      }
      return Membership::unknown("no power up to the budget");
    }

    VertexKind                         kind_;
    std::string                        label_;
    Alphabet                           alphabet_;
    std::set<std::string>              hidden_;
    std::optional<SurfacePresentation> surface_;
    std::shared_ptr<GroupOracle const> oracle_;
  };

}  // namespace rft
