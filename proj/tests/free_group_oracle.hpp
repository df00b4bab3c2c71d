#pragma once

// Plain free-group arithmetic on integer letters (+g / -g for generator
// g-1), independent of the library's word type.

#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

namespace oracle {

  using Letters = std::vector<int>;

  inline Letters free_reduce(Letters const& w) {
    Letters out;
    for (int l : w) {
      if (!out.empty() && out.back() == -l) {
        out.pop_back();
      } else {
        out.push_back(l);
      }
    }
    return out;
  }

  inline Letters inverse(Letters const& w) {
    Letters out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      out.push_back(-*it);
    }
    return out;
  }

  inline Letters concat(Letters a, Letters const& b) {
    a.insert(a.end(), b.begin(), b.end());
    return free_reduce(a);
  }

  inline Letters power(Letters const& w, std::int64_t n) {
    Letters out;
    Letters const base = n < 0 ? inverse(w) : w;
    for (std::int64_t i = 0; i < (n < 0 ? -n : n); ++i) {
      out = concat(out, base);
    }
    return out;
  }

  // Exponent sums per generator.
  inline std::vector<std::int64_t> abelianize(Letters const& w, std::size_t rank) {
    std::vector<std::int64_t> v(rank, 0);
    for (int l : w) {
      v[static_cast<std::size_t>((l > 0 ? l : -l) - 1)] += l > 0 ? 1 : -1;
    }
    return v;
  }

  // Substitutes images[g-1] for generator g.
  inline Letters substitute(Letters const& w, std::vector<Letters> const& images) {
    Letters out;
    for (int l : w) {
      Letters const& img = images[static_cast<std::size_t>((l > 0 ? l : -l) - 1)];
      out                = concat(out, l > 0 ? img : inverse(img));
    }
    return out;
  }

  // All reduced words of length <= r over `rank` generators.
  inline std::vector<Letters> ball(std::size_t rank, std::size_t r) {
    std::vector<Letters> out{{}};
    std::vector<Letters> layer{{}};
    for (std::size_t len = 0; len < r; ++len) {
      std::vector<Letters> next;
      for (auto const& w : layer) {
        for (int g = 1; g <= static_cast<int>(rank); ++g) {
          for (int l : {g, -g}) {
            if (!w.empty() && w.back() == -l) {
              continue;
            }
            Letters x = w;
            x.push_back(l);
            next.push_back(x);
          }
        }
      }
      out.insert(out.end(), next.begin(), next.end());
      layer = std::move(next);
    }
    return out;
  }

  // Is the substitution injective on `ws`, with no word sent to 1 unless it is 1?
  inline bool injective_on(std::vector<Letters> const& ws, std::vector<Letters> const& images) {
    std::set<Letters> seen;
    for (auto const& w : ws) {
      Letters const img = substitute(w, images);
      if ((img.empty() && !free_reduce(w).empty()) || !seen.insert(img).second) {
        return false;
      }
    }
    return true;
  }

}  // namespace oracle
