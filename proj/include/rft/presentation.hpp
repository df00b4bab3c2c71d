#pragma once

#include <string>
#include <vector>

#include "rft/lattice.hpp"
#include "rft/word_syntax.hpp"
#include "rft/words.hpp"

namespace rft {

  struct Presentation {
    Alphabet          alphabet;
    std::vector<Word> relators;

    friend bool operator==(Presentation const&, Presentation const&) = default;
  };

  // "⟨a,b,t | [[a,b],t]⟩" rendered as "<a,b,t | a b a^-1 b^-1 t ...>".
  inline std::string format_presentation(Presentation const& p) {
    std::string out = "<";
    for (std::size_t i = 0; i < p.alphabet.size(); ++i) {
      out += (i ? "," : "") + p.alphabet.name(i);
    }
    out += " |";
    for (std::size_t i = 0; i < p.relators.size(); ++i) {
      out += (i ? ", " : " ") + format_word(p.relators[i], p.alphabet);
    }
    return out + ">";
  }

  // Relation matrix: one row per relator, exponent sums per generator.
  inline lattice::Matrix relation_matrix(Presentation const& p) {
    lattice::Matrix m;
    for (auto const& r : p.relators) {
      m.push_back(abelianize(r, p.alphabet));
    }
    return m;
  }

  // Torsion-free rank of the abelianization.
  inline std::size_t abelianized_rank(Presentation const& p) {
    return p.alphabet.size() - lattice::rank(relation_matrix(p), p.alphabet.size());
  }

  // Integer vectors y with y . (exponent sums of r) == 0 for every
  // relator r: each one is a homomorphism onto Z.
  inline std::vector<lattice::Vector> integer_characters(Presentation const& p) {
    auto const n = p.alphabet.size();
    return lattice::integer_kernel(relation_matrix(p), n);
  }

}  // namespace rft
