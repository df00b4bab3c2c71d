#pragma once

// Free-group word algebra: letters, reduction, cyclic words, roots,
// homomorphisms, abelianization and ball enumeration.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rft/errors.hpp"

namespace rft {

  // A letter is +(g+1) for generator g and -(g+1) for its inverse.
  using Letter = std::int32_t;

  constexpr Letter letter(std::size_t gen, int sign = 1) noexcept {
    return sign > 0 ? static_cast<Letter>(gen + 1) : -static_cast<Letter>(gen + 1);
  }
  constexpr std::size_t generator_of(Letter l) noexcept {
    return static_cast<std::size_t>(l > 0 ? l : -l) - 1;
  }
  constexpr int sign_of(Letter l) noexcept { return l > 0 ? 1 : -1; }

  class Word {
   public:
    using value_type     = Letter;
    using const_iterator = std::vector<Letter>::const_iterator;

    Word() = default;
    explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}
    Word(std::initializer_list<Letter> letters) : letters_(letters) {}

    std::size_t size() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }
    Letter operator[](std::size_t i) const { return letters_[i]; }
    Letter back() const { return letters_.back(); }
    const_iterator begin() const noexcept { return letters_.begin(); }
    const_iterator end() const noexcept { return letters_.end(); }
    std::vector<Letter> const& letters() const noexcept { return letters_; }

    void push_back(Letter l) { letters_.push_back(l); }
    void pop_back() { letters_.pop_back(); }
    void append(Word const& w) { letters_.insert(letters_.end(), w.begin(), w.end()); }

    Word subword(std::size_t pos, std::size_t len) const {
      return Word(std::vector<Letter>(letters_.begin() + pos, letters_.begin() + pos + len));
    }

    friend bool operator==(Word const&, Word const&) = default;
    friend auto operator<=>(Word const&, Word const&) = default;

   private:
    std::vector<Letter> letters_;
  };

  class Alphabet {
   public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> names) {
      for (auto& n : names) {
        add(std::move(n));
      }
    }

    std::size_t size() const noexcept { return names_.size(); }
    bool empty() const noexcept { return names_.empty(); }
    std::string const& name(std::size_t g) const { return names_.at(g); }
    std::vector<std::string> const& names() const noexcept { return names_; }

    std::optional<std::size_t> find(std::string_view name) const {
      auto it = index_.find(std::string(name));
      if (it == index_.end()) {
        return std::nullopt;
      }
      return it->second;
    }
    std::size_t index(std::string_view name) const {
      auto g = find(name);
      if (!g) {
        throw alphabet_error("undeclared generator '" + std::string(name) + "'");
      }
      return *g;
    }
    bool contains(std::string_view name) const { return find(name).has_value(); }

    std::size_t add(std::string name) {
      if (contains(name)) {
        throw alphabet_error("duplicate generator '" + name + "'");
      }
      index_.emplace(name, names_.size());
      names_.push_back(std::move(name));
      return names_.size() - 1;
    }

    friend bool operator==(Alphabet const& x, Alphabet const& y) { return x.names_ == y.names_; }

   private:
    std::vector<std::string>              names_;
    std::map<std::string, std::size_t, std::less<>> index_;
  };

  // Throws alphabet_error when w uses a generator outside a.
  inline void check_word(Alphabet const& a, Word const& w) {
    for (Letter l : w) {
      if (l == 0 || generator_of(l) >= a.size()) {
        throw alphabet_error("letter " + std::to_string(l) + " outside alphabet of size "
                             + std::to_string(a.size()));
      }
    }
  }

  inline Word inverse(Word const& w) {
    std::vector<Letter> out(w.size());
    std::transform(w.begin(), w.end(), out.rbegin(), [](Letter l) { return -l; });
    return Word(std::move(out));
  }

  inline Word reduce(Word const& w) {
    std::vector<Letter> out;
    out.reserve(w.size());
    for (Letter l : w) {
      if (!out.empty() && out.back() == -l) {
        out.pop_back();
      } else {
        out.push_back(l);
      }
    }
    return Word(std::move(out));
  }

  inline Word reduce(Alphabet const& a, Word const& w) {
    check_word(a, w);
    return reduce(w);
  }

  inline bool is_reduced(Word const& w) {
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (w[i] == -w[i - 1]) {
        return false;
      }
    }
    return true;
  }

  // Reduced product.
  inline Word operator*(Word const& u, Word const& v) {
    Word r = u;
    r.append(v);
    return reduce(r);
  }

  inline Word power(Word const& w, std::int64_t k) {
    Word base = k < 0 ? inverse(w) : w;
    Word out;
    for (std::int64_t i = 0; i < (k < 0 ? -k : k); ++i) {
      out.append(base);
    }
    return reduce(out);
  }

  inline Word commutator(Word const& u, Word const& v) {
    return u * v * inverse(u) * inverse(v);
  }

  inline Word conjugate(Word const& g, Word const& w) { return g * w * inverse(g); }

  struct CyclicDecomposition {
    Word core;        // cyclically reduced
    Word conjugator;  // w = conjugator * core * conjugator^-1
  };

  inline CyclicDecomposition cyclic_reduce(Word const& w) {
    Word r = reduce(w);
    std::size_t i = 0, j = r.size();
    while (j >= i + 2 && r[i] == -r[j - 1]) {
      ++i;
      --j;
    }
    return {r.subword(i, j - i), r.subword(0, i)};
  }

  inline bool is_cyclically_reduced(Word const& w) {
    return is_reduced(w) && (w.size() < 2 || w[0] != -w.back());
  }

  struct PowerDecomposition {
    Word         root;
    std::int64_t exponent;
  };

  // Root of maximal exponent; exponent 1 when w is not a proper power.
  inline PowerDecomposition primitive_root(Word const& w) {
    auto [core, conj] = cyclic_reduce(w);
    if (core.empty()) {
      throw domain_error("the trivial word has no root");
    }
    std::size_t const n = core.size();
    for (std::size_t p = 1; p <= n; ++p) {
      if (n % p != 0) {
        continue;
      }
      bool periodic = true;
      for (std::size_t i = p; i < n && periodic; ++i) {
        periodic = core[i] == core[i - p];
      }
      if (periodic) {
        return {conjugate(conj, core.subword(0, p)), static_cast<std::int64_t>(n / p)};
      }
    }
    return {w, 1};  // unreachable: p == n always succeeds
  }

  inline std::optional<PowerDecomposition> is_proper_power(Word const& w) {
    auto d = primitive_root(w);
    if (d.exponent >= 2) {
      return d;
    }
    return std::nullopt;
  }

  // If w == root^k for some integer k, returns k.  root must be nontrivial.
  inline std::optional<std::int64_t> power_exponent(Word const& w, Word const& root) {
    Word rw = reduce(w);
    if (rw.empty()) {
      return 0;
    }
    auto [rc, rconj] = cyclic_reduce(root);
    if (rc.empty()) {
      throw domain_error("power_exponent with trivial root");
    }
    Word inner = reduce(inverse(rconj) * rw * rconj);
    auto k     = static_cast<std::int64_t>(inner.size() / rc.size());
    if (inner.size() % rc.size() != 0) {
      return std::nullopt;
    }
    if (inner == power(rc, k)) {
      return k;
    }
    if (inner == power(rc, -k)) {
      return -k;
    }
    return std::nullopt;
  }

  // Returns g with v == g u g^-1 in the free group, if u and v are conjugate.
  inline std::optional<Word> free_conjugator(Word const& u, Word const& v) {
    auto [uc, ug] = cyclic_reduce(u);
    auto [vc, vg] = cyclic_reduce(v);
    if (uc.size() != vc.size()) {
      return std::nullopt;
    }
    std::size_t const n = uc.size();
    if (n == 0) {
      return Word{};
    }
    for (std::size_t i = 0; i < n; ++i) {
      bool match = true;
      for (std::size_t j = 0; j < n && match; ++j) {
        match = vc[j] == uc[(i + j) % n];
      }
      if (match) {
        Word s = uc.subword(0, i);  // vc = s^-1 uc s
        return vg * inverse(s) * inverse(ug);
      }
    }
    return std::nullopt;
  }

  inline std::vector<std::int64_t> abelianize(Word const& w, std::size_t rank) {
    std::vector<std::int64_t> v(rank, 0);
    for (Letter l : w) {
      auto g = generator_of(l);
      if (g >= rank) {
        throw alphabet_error("letter outside alphabet in abelianize");
      }
      v[g] += sign_of(l);
    }
    return v;
  }

  inline std::vector<std::int64_t> abelianize(Word const& w, Alphabet const& a) {
    return abelianize(w, a.size());
  }

  // Homomorphism between free groups on the given alphabets (the images
  // may later be interpreted in a quotient of the target).
  class GroupHom {
   public:
    GroupHom() = default;
    GroupHom(Alphabet source, Alphabet target, std::vector<Word> images)
        : source_(std::move(source)), target_(std::move(target)), images_(std::move(images)) {
      if (images_.size() != source_.size()) {
        throw domain_error("homomorphism must give an image for every source generator");
      }
      for (auto& w : images_) {
        w = reduce(target_, w);
      }
    }

    static GroupHom identity(Alphabet const& a) {
      std::vector<Word> images;
      for (std::size_t g = 0; g < a.size(); ++g) {
        images.push_back(Word{letter(g)});
      }
      return GroupHom(a, a, std::move(images));
    }

    Alphabet const& source() const noexcept { return source_; }
    Alphabet const& target() const noexcept { return target_; }
    Word const& image(std::size_t g) const { return images_.at(g); }
    std::vector<Word> const& images() const noexcept { return images_; }

    Word operator()(Word const& w) const {
      check_word(source_, w);
      Word out;
      for (Letter l : w) {
        Word const& im = images_[generator_of(l)];
        out.append(l > 0 ? im : inverse(im));
      }
      return reduce(out);
    }

    friend bool operator==(GroupHom const&, GroupHom const&) = default;

   private:
    Alphabet          source_;
    Alphabet          target_;
    std::vector<Word> images_;
  };

  inline Word apply_hom(GroupHom const& h, Word const& w) { return h(w); }

  // outer ∘ inner
  inline GroupHom compose(GroupHom const& outer, GroupHom const& inner) {
    if (!(inner.target() == outer.source())) {
      throw alphabet_error("composition of homomorphisms with mismatched alphabets");
    }
    std::vector<Word> images;
    for (auto const& w : inner.images()) {
      images.push_back(outer(w));
    }
    return GroupHom(inner.source(), outer.target(), std::move(images));
  }

  // Letters in shortlex order: g0, g0^-1, g1, g1^-1, ...
  inline std::vector<Letter> ordered_letters(std::size_t rank) {
    std::vector<Letter> out;
    for (std::size_t g = 0; g < rank; ++g) {
      out.push_back(letter(g, 1));
      out.push_back(letter(g, -1));
    }
    return out;
  }

  inline std::vector<Word> enumerate_ball(std::size_t rank, std::size_t radius) {
    std::vector<Word> out{Word{}};
    auto const        letters = ordered_letters(rank);
    std::size_t       begin = 0, end = 1;
    for (std::size_t len = 1; len <= radius; ++len) {
      for (std::size_t i = begin; i < end; ++i) {
        for (Letter l : letters) {
          Word const& w = out[i];
          if (!w.empty() && w.back() == -l) {
            continue;
          }
          Word next = w;
          next.push_back(l);
          out.push_back(std::move(next));
        }
      }
      begin = end;
      end   = out.size();
    }
    return out;
  }

  inline std::vector<Word> enumerate_ball(Alphabet const& a, std::size_t radius) {
    return enumerate_ball(a.size(), radius);
  }

  // 1 + sum_{i=1..r} 2n(2n-1)^{i-1}
  inline std::size_t ball_size(std::size_t rank, std::size_t radius) {
    std::size_t total = 1, layer = 2 * rank;
    for (std::size_t i = 1; i <= radius; ++i) {
      total += layer;
      layer *= (2 * rank - 1);
    }
    return total;
  }

}  // namespace rft
