#pragma once

// Textual word syntax: whitespace-separated `g`, `g^-1`, `g^k`, with
// commutator sugar `[u,v]` and grouping `(u)`, both accepting `^k`.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "rft/errors.hpp"
#include "rft/words.hpp"

namespace rft {

  inline bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  inline bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }
  inline bool is_valid_name(std::string_view s) {
    if (s.empty() || !is_name_start(s[0])) {
      return false;
    }
    for (char c : s) {
      if (!is_name_char(c)) {
        return false;
      }
    }
    return true;
  }

  namespace detail {

    class WordParser {
     public:
      WordParser(std::string_view text, Alphabet const& a) : text_(text), alphabet_(a) {}

      Word parse() {
        Word w = sequence();
        skip_ws();
        if (pos_ != text_.size()) {
          fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return reduce(w);
      }

     private:
      [[noreturn]] void fail(std::string const& msg) const {
        throw parse_error("word \"" + std::string(text_) + "\": " + msg, 1, pos_ + 1);
      }

      void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      }

      bool at(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
      }

      void expect(char c) {
        if (!at(c)) {
          fail(std::string("expected '") + c + "'");
        }
        ++pos_;
      }

      Word sequence() {
        Word w;
        while (true) {
          skip_ws();
          if (pos_ >= text_.size()) {
            break;
          }
          char c = text_[pos_];
          if (c == ',' || c == ']' || c == ')') {
            break;
          }
          w.append(item());
        }
        return w;
      }

      Word item() {
        Word base;
        char c = text_[pos_];
        if (c == '[') {
          ++pos_;
          Word u = sequence();
          expect(',');
          Word v = sequence();
          expect(']');
          base = commutator(reduce(u), reduce(v));
        } else if (c == '(') {
          ++pos_;
          base = reduce(sequence());
          expect(')');
        } else if (is_name_start(c)) {
          std::size_t start = pos_;
          while (pos_ < text_.size() && is_name_char(text_[pos_])) {
            ++pos_;
          }
          auto name = text_.substr(start, pos_ - start);
          auto g    = alphabet_.find(name);
          if (!g) {
            throw alphabet_error("undeclared generator '" + std::string(name) + "' in word \""
                                 + std::string(text_) + "\"");
          }
          base = Word{letter(*g)};
        } else {
          fail("unexpected '" + std::string(1, c) + "'");
        }
        if (pos_ < text_.size() && text_[pos_] == '^') {
          ++pos_;
          return power(base, exponent());
        }
        return base;
      }

      std::int64_t exponent() {
        bool neg = false;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
          neg = text_[pos_] == '-';
          ++pos_;
        }
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          fail("expected integer exponent");
        }
        std::int64_t k = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          k = 10 * k + (text_[pos_] - '0');
          if (k > 1000000) {
            fail("exponent too large");
          }
          ++pos_;
        }
        return neg ? -k : k;
      }

      std::string_view text_;
      Alphabet const&  alphabet_;
      std::size_t      pos_ = 0;
    };

  }  // namespace detail

  // Parses and freely reduces.
  inline Word parse_word(std::string_view text, Alphabet const& a) {
    return detail::WordParser(text, a).parse();
  }

  // Run-length form: "a^3 b^-1 a".  The empty word prints as "".
  inline std::string format_word(Word const& w, Alphabet const& a) {
    std::string out;
    for (std::size_t i = 0; i < w.size();) {
      std::size_t j = i;
      while (j < w.size() && w[j] == w[i]) {
        ++j;
      }
      if (!out.empty()) {
        out += ' ';
      }
      out += a.name(generator_of(w[i]));
      auto run = static_cast<std::int64_t>(j - i) * sign_of(w[i]);
      if (run != 1) {
        out += '^' + std::to_string(run);
      }
      i = j;
    }
    return out;
  }

}  // namespace rft
