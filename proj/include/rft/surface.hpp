#pragma once

// Orientable surface groups: closed ones with the standard one-relator
// presentation (decided by Dehn's algorithm) and ones with boundary,
// which are free on 2g + p - 1 generators.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rft/errors.hpp"
#include "rft/words.hpp"

namespace rft {

  class SurfacePresentation {
   public:
    static SurfacePresentation closed(std::size_t genus, std::vector<std::string> gens = {}) {
      if (genus < 2) {
        throw domain_error("closed surface presentations need genus >= 2 (genus 1 is a torus)");
      }
      return SurfacePresentation(genus, 0, std::move(gens));
    }

    static SurfacePresentation bounded(std::size_t genus, std::size_t punctures,
                                       std::vector<std::string> gens = {}) {
      if (punctures == 0) {
        throw domain_error("bounded surface needs at least one boundary component");
      }
      return SurfacePresentation(genus, punctures, std::move(gens));
    }

    std::size_t genus() const noexcept { return genus_; }
    std::size_t punctures() const noexcept { return punctures_; }
    bool is_closed() const noexcept { return punctures_ == 0; }
    std::int64_t euler_characteristic() const noexcept {
      return 2 - 2 * static_cast<std::int64_t>(genus_) - static_cast<std::int64_t>(punctures_);
    }
    Alphabet const& alphabet() const noexcept { return alphabet_; }

    // Closed case only.
    Word const& relator() const {
      if (!is_closed()) {
        throw domain_error("a surface with boundary has no relator");
      }
      return relator_;
    }

    // Bounded case: one word per boundary circle; their product (in order)
    // is the inverse of the product of the handle commutators.
    std::vector<Word> const& boundary_words() const noexcept { return boundary_; }

    // Maximal length of a piece among the symmetrized relators.
    std::size_t max_piece_length() const {
      std::size_t best = 0;
      for (std::size_t i = 0; i < symmetrized_.size(); ++i) {
        for (std::size_t j = 0; j < symmetrized_.size(); ++j) {
          if (i == j) {
            continue;
          }
          auto const& x = symmetrized_[i];
          auto const& y = symmetrized_[j];
          std::size_t k = 0;
          while (k < x.size() && k < y.size() && x[k] == y[k]) {
            ++k;
          }
          best = std::max(best, k);
        }
      }
      return best;
    }

    // All cyclic permutations of the relator and its inverse.
    std::vector<Word> const& symmetrized_relators() const noexcept { return symmetrized_; }

    friend bool operator==(SurfacePresentation const& x, SurfacePresentation const& y) {
      return x.genus_ == y.genus_ && x.punctures_ == y.punctures_ && x.alphabet_ == y.alphabet_;
    }

   private:
    SurfacePresentation(std::size_t genus, std::size_t punctures, std::vector<std::string> gens)
        : genus_(genus), punctures_(punctures) {
      std::size_t const rank = punctures == 0 ? 2 * genus : 2 * genus + punctures - 1;
      if (gens.empty()) {
        for (std::size_t i = 1; i <= genus; ++i) {
          gens.push_back("a" + std::to_string(i));
          gens.push_back("b" + std::to_string(i));
        }
        for (std::size_t i = 1; i + 1 <= punctures && gens.size() < rank; ++i) {
          gens.push_back("d" + std::to_string(i));
        }
      }
      if (gens.size() != rank) {
        throw domain_error("surface of genus " + std::to_string(genus) + " with "
                           + std::to_string(punctures) + " boundary components needs "
                           + std::to_string(rank) + " generators, got "
                           + std::to_string(gens.size()));
      }
      alphabet_ = Alphabet(std::move(gens));
      Word handles;
      for (std::size_t i = 0; i < genus; ++i) {
        handles.append(commutator(Word{letter(2 * i)}, Word{letter(2 * i + 1)}));
      }
      if (punctures == 0) {
        relator_ = reduce(handles);
        for (Word const& r : {relator_, inverse(relator_)}) {
          for (std::size_t s = 0; s < r.size(); ++s) {
            Word c = r.subword(s, r.size() - s);
            c.append(r.subword(0, s));
            symmetrized_.push_back(std::move(c));
          }
        }
        if (6 * max_piece_length() >= relator_.size()) {
          throw domain_error("surface relator fails the C'(1/6) condition needed by Dehn's algorithm");
        }
      } else {
        // boundary words: d_1, ..., d_{p-1}, and (handles d_1 ... d_{p-1})^-1
        Word last = handles;
        for (std::size_t i = 0; i + 1 < punctures; ++i) {
          Word d{letter(2 * genus + i)};
          boundary_.push_back(d);
          last.append(d);
        }
        boundary_.push_back(inverse(reduce(last)));
      }
    }

    std::size_t       genus_;
    std::size_t       punctures_;
    Alphabet          alphabet_;
    Word              relator_;
    std::vector<Word> symmetrized_;
    std::vector<Word> boundary_;
  };

  // Dehn's algorithm: replace the leftmost, then longest, subword that is
  // more than half of a symmetrized relator by the inverse of its
  // complement; freely reduce; repeat.  Returns the empty word iff w is
  // trivial in the closed surface group.
  inline Word dehn_reduce(SurfacePresentation const& s, Word const& w) {
    if (!s.is_closed()) {
      throw domain_error("Dehn's algorithm applies to closed surfaces; use free reduction for "
                         "surfaces with boundary");
    }
    check_word(s.alphabet(), w);
    auto const&       rels = s.symmetrized_relators();
    std::size_t const len  = s.relator().size();
    Word              cur  = reduce(w);
    while (true) {
      bool moved = false;
      for (std::size_t i = 0; i < cur.size() && !moved; ++i) {
        std::size_t best_len = 0, best_rel = 0;
        for (std::size_t r = 0; r < rels.size(); ++r) {
          std::size_t k = 0;
          while (k < len && i + k < cur.size() && cur[i + k] == rels[r][k]) {
            ++k;
          }
          if (2 * k > len && k > best_len) {
            best_len = k;
            best_rel = r;
          }
        }
        if (best_len > 0) {
          auto const& rel = rels[best_rel];
          Word        out = cur.subword(0, i);
          out.append(inverse(rel.subword(best_len, len - best_len)));
          out.append(cur.subword(i + best_len, cur.size() - i - best_len));
          cur   = reduce(out);
          moved = true;
        }
      }
      if (!moved) {
        return cur;
      }
    }
  }

}  // namespace rft
