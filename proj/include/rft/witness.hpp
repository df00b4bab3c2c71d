#pragma once

// Residual-freeness witnesses: a homomorphism from a tower onto a free
// group that is injective on a finite word set, found by enumerating the
// parametrized resolutions in order of increasing parameter max-norm.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rft/stage.hpp"
#include "rft/tower.hpp"
#include "rft/words.hpp"

namespace rft {

  struct WitnessAttempt {
    std::vector<std::int64_t> params;
    std::string               collision;  // empty for the accepted attempt
  };

  struct WitnessCertificate {
    GroupHom                    hom;      // tower alphabet -> free target
    std::vector<Word>           words;    // W over the tower alphabet
    std::vector<Word>           images;
    std::vector<Word>           relators;  // tower relators; each must map to ""
    bool                        valid = false;
    std::vector<ParamSpec>      layout;
    std::vector<std::int64_t>   params;
    std::vector<WitnessAttempt> trace;    // the first max_trace attempts
    std::size_t                 attempts = 0;
    std::size_t                 budget   = 0;
    std::uint64_t               seed     = 0;
  };

  namespace detail {

    // Why h is not injective on ws (empty when it is).
    inline std::string collision(GroupHom const& h, std::vector<Word> const& ws,
                                 std::vector<Word>& images) {
      images.clear();
      std::map<Word, std::size_t> seen;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        images.push_back(h(ws[i]));
        if (images.back().empty() && !ws[i].empty()) {
          return "'" + format_word(ws[i], h.source()) + "' maps to the identity";
        }
        auto [it, fresh] = seen.emplace(images.back(), i);
        if (!fresh) {
          return "'" + format_word(ws[it->second], h.source()) + "' and '"
                 + format_word(ws[i], h.source()) + "' both map to '"
                 + format_word(images.back(), h.target()) + "'";
        }
      }
      return {};
    }

    // Vectors p with lo <= p_i <= s and max_i p_i == s, lexicographic.
    inline std::vector<std::vector<std::int64_t>> shell(std::vector<std::int64_t> const& lo,
                                                       std::int64_t s) {
      std::vector<std::vector<std::int64_t>> out;
      std::vector<std::int64_t>              p = lo;
      if (lo.empty()) {
        if (s == 0) {
          out.push_back({});
        }
        return out;
      }
      for (auto x : lo) {
        if (x > s) {
          return out;
        }
      }
      while (true) {
        if (*std::max_element(p.begin(), p.end()) == s) {
          out.push_back(p);
        }
        std::size_t i = p.size();
        while (i > 0) {
          --i;
          if (p[i] < s) {
            ++p[i];
            break;
          }
          p[i] = lo[i];
          if (i == 0) {
            return out;
          }
        }
      }
    }

  }  // namespace detail

  // Independent re-check: the map kills every relator, and recomputed
  // images are pairwise distinct and nontrivial.
  inline bool check_witness(WitnessCertificate const& c) {
    for (auto const& r : c.relators) {
      if (!c.hom(r).empty()) {
        return false;
      }
    }
    std::vector<Word> images;
    if (!detail::collision(c.hom, c.words, images).empty()) {
      return false;
    }
    return images == c.images;
  }

  // Parameters run over increasing max-norm shells up to budget; seed 0
  // keeps lexicographic order inside a shell, other seeds shuffle it.
  inline WitnessCertificate find_rf_witness(Tower const& t, std::vector<Word> const& ws,
                                            std::size_t budget, std::uint64_t seed = 0,
                                            std::size_t max_attempts = 200000,
                                            std::size_t max_trace    = 64) {
    WitnessCertificate cert;
    cert.layout = parameter_layout(t.top());
    cert.budget = budget;
    cert.seed   = seed;
    cert.relators = t.presentation().relators;
    for (auto const& w : ws) {
      Word r = reduce(t.alphabet(), w);
      if (std::find(cert.words.begin(), cert.words.end(), r) == cert.words.end()) {
        cert.words.push_back(std::move(r));
      }
    }
    std::vector<std::int64_t> lo;
    for (auto const& p : cert.layout) {
      lo.push_back(p.lo);
    }
    std::mt19937_64 rng(seed);
    for (std::int64_t s = 0; s <= static_cast<std::int64_t>(budget); ++s) {
      auto candidates = detail::shell(lo, s);
      if (seed != 0) {
        std::shuffle(candidates.begin(), candidates.end(), rng);
      }
      for (auto const& p : candidates) {
        if (cert.attempts >= max_attempts) {
          return cert;
        }
        ++cert.attempts;
        GroupHom          h = resolution(t.top(), p);
        std::vector<Word> images;
        std::string       why = detail::collision(h, cert.words, images);
        for (auto const& r : cert.relators) {
          if (why.empty() && !h(r).empty()) {
            why = "relator '" + format_word(r, t.alphabet()) + "' is not killed";
          }
        }
        if (cert.trace.size() < max_trace) {
          cert.trace.push_back({p, why});
        }
        if (why.empty()) {
          cert.hom    = std::move(h);
          cert.images = std::move(images);
          cert.params = p;
          cert.valid  = true;
          return cert;
        }
      }
    }
    return cert;
  }

}  // namespace rft
