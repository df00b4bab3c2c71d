#pragma once

// Tower description language.
//
//   tower NAME {
//     base { free(a, b); abelian(rank=2: x, y); surface(genus=2, punctures=0: c1, d1, c2, d2) }
//     block A { attach="[a,b]"; rank=2; letters=t }
//     block T { attach=("[a,b]", "t"); rank=3; letters=s; assume=unknown }
//     block Q { surface=(genus=1, punctures=1: x, y); boundary={ b1 -> "[a,b]" };
//               retract={ x -> "a", y -> "b" }; letters=u2 }
//   }
//
// `#` starts a comment.  Boundary keys are `bN` (the N-th standard
// boundary word of the surface) or a quoted surface word.  `letters` in a
// Q block names the stable letters; their retraction images go in
// `retract`.  `assume=unknown` ledgers budget-limited obligations and
// `assume=all` also ledgers refuted ones.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rft/errors.hpp"
#include "rft/stage.hpp"
#include "rft/surface.hpp"
#include "rft/tower.hpp"
#include "rft/word_syntax.hpp"
#include "rft/words.hpp"

namespace rft {

  // Source text with its position; equality ignores the position.
  struct Located {
    std::string value;
    std::size_t line = 0, column = 0;

    bool operator==(Located const& o) const { return value == o.value; }
  };

  struct SummandDecl {
    VertexKind               kind = VertexKind::free;
    std::vector<std::string> gens;
    std::size_t              genus = 0, punctures = 0;

    bool operator==(SummandDecl const&) const = default;
  };

  struct ABlockDecl {
    Located                  attach;
    std::size_t              rank = 2;
    std::vector<std::string> letters;

    bool operator==(ABlockDecl const&) const = default;
  };

  struct TBlockDecl {
    std::vector<Located>     attach;
    std::size_t              rank = 2;
    std::vector<std::string> letters;

    bool operator==(TBlockDecl const&) const = default;
  };

  struct QBlockDecl {
    std::size_t                                     genus = 1, punctures = 1;
    std::vector<std::string>                        gens;
    std::vector<std::pair<Located, Located>>        boundary;  // key is "bN" or a surface word
    std::vector<std::pair<std::string, Located>>    retract;
    std::vector<std::string>                        letters;

    bool operator==(QBlockDecl const&) const = default;
  };

  struct BlockDecl {
    std::variant<ABlockDecl, QBlockDecl, TBlockDecl> data;
    AttachPolicy                                     policy = AttachPolicy::strict;
    std::size_t                                      line = 0, column = 0;

    bool operator==(BlockDecl const& o) const { return data == o.data && policy == o.policy; }
  };

  struct TowerDocument {
    std::string              name;
    std::vector<SummandDecl> base;
    std::vector<BlockDecl>   blocks;

    bool operator==(TowerDocument const&) const = default;
  };

  namespace detail {

    struct Token {
      enum class Kind { name, number, string, punct, end };
      Kind        kind = Kind::end;
      std::string text;
      std::size_t line = 1, column = 1;
    };

    class DslLexer {
     public:
      explicit DslLexer(std::string_view text) : text_(text) {}

      std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
          skip_space();
          Token t;
          t.line   = line_;
          t.column = column_;
          if (pos_ >= text_.size()) {
            out.push_back(t);
            return out;
          }
          char const c = text_[pos_];
          if (is_name_start(c)) {
            t.kind = Token::Kind::name;
            while (pos_ < text_.size() && is_name_char(text_[pos_])) {
              t.text += advance();
            }
          } else if (std::isdigit(static_cast<unsigned char>(c))) {
            t.kind = Token::Kind::number;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
              t.text += advance();
            }
          } else if (c == '"') {
            t.kind = Token::Kind::string;
            advance();
            while (pos_ < text_.size() && text_[pos_] != '"') {
              if (text_[pos_] == '\n') {
                throw parse_error("unterminated string", t.line, t.column);
              }
              t.text += advance();
            }
            if (pos_ >= text_.size()) {
              throw parse_error("unterminated string", t.line, t.column);
            }
            advance();
          } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            t.kind = Token::Kind::punct;
            t.text = "->";
            advance();
            advance();
          } else if (std::string_view("{}();,=:").find(c) != std::string_view::npos) {
            t.kind = Token::Kind::punct;
            t.text = std::string(1, advance());
          } else {
            throw parse_error(std::string("unexpected character '") + c + "'", line_, column_);
          }
          out.push_back(std::move(t));
        }
      }

     private:
      char advance() {
        char const c = text_[pos_++];
        if (c == '\n') {
          ++line_;
          column_ = 1;
        } else {
          ++column_;
        }
        return c;
      }

      void skip_space() {
        while (pos_ < text_.size()) {
          char const c = text_[pos_];
          if (c == '#') {
            while (pos_ < text_.size() && text_[pos_] != '\n') {
              advance();
            }
          } else if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
          } else {
            return;
          }
        }
      }

      std::string_view text_;
      std::size_t      pos_ = 0, line_ = 1, column_ = 1;
    };

    class DslParser {
     public:
      explicit DslParser(std::string_view text) : toks_(DslLexer(text).run()) {}

      TowerDocument document() {
        TowerDocument d;
        keyword("tower");
        d.name = name();
        punct("{");
        keyword("base");
        punct("{");
        d.base.push_back(summand());
        while (accept(";")) {
          if (peek_punct("}")) {
            break;
          }
          d.base.push_back(summand());
        }
        punct("}");
        while (peek_name("block")) {
          d.blocks.push_back(block());
        }
        punct("}");
        if (cur().kind != Token::Kind::end) {
          fail("trailing input after the tower");
        }
        return d;
      }

     private:
      Token const& cur() const { return toks_[i_]; }
      Token const& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

      [[noreturn]] void fail(std::string const& msg) const {
        Token const& t    = cur();
        std::string  seen = t.kind == Token::Kind::end ? "end of input" : "'" + t.text + "'";
        throw parse_error(msg + " (found " + seen + ")", t.line, t.column);
      }

      bool peek_punct(std::string_view p) const {
        return cur().kind == Token::Kind::punct && cur().text == p;
      }
      bool peek_name(std::string_view n) const {
        return cur().kind == Token::Kind::name && cur().text == n;
      }
      bool accept(std::string_view p) {
        if (peek_punct(p)) {
          take();
          return true;
        }
        return false;
      }
      void punct(std::string_view p) {
        if (!accept(p)) {
          fail("expected '" + std::string(p) + "'");
        }
      }
      void keyword(std::string_view k) {
        if (!peek_name(k)) {
          fail("expected '" + std::string(k) + "'");
        }
        take();
      }
      std::string name() {
        if (cur().kind != Token::Kind::name) {
          fail("expected a name");
        }
        return take().text;
      }
      std::size_t number() {
        if (cur().kind != Token::Kind::number) {
          fail("expected a number");
        }
        Token const& t = cur();
        if (t.text.size() > 9) {
          fail("number too large");
        }
        take();
        return std::stoul(t.text);
      }
      Located word() {
        if (cur().kind != Token::Kind::string) {
          fail("expected a quoted word");
        }
        Token const& t = take();
        return {t.text, t.line, t.column};
      }
      std::size_t numbered(std::string_view key) {
        keyword(key);
        punct("=");
        return number();
      }
      // Possibly empty when followed by ';', '}' or ')'.
      std::vector<std::string> names() {
        std::vector<std::string> out;
        if (peek_punct(";") || peek_punct("}") || peek_punct(")")) {
          return out;
        }
        out.push_back(name());
        while (accept(",")) {
          out.push_back(name());
        }
        return out;
      }

      SummandDecl summand() {
        SummandDecl s;
        if (peek_name("free")) {
          take();
          punct("(");
          s.gens = names();
          punct(")");
          if (s.gens.empty()) {
            fail("a free summand needs at least one generator");
          }
        } else if (peek_name("abelian")) {
          take();
          s.kind = VertexKind::free_abelian;
          punct("(");
          std::size_t const line = cur().line, col = cur().column;
          std::size_t const r    = numbered("rank");
          punct(":");
          s.gens = names();
          punct(")");
          if (s.gens.size() != r || r == 0) {
            throw parse_error("abelian(rank=" + std::to_string(r) + ") needs exactly that many generators",
                              line, col);
          }
        } else if (peek_name("surface")) {
          take();
          s.kind = VertexKind::surface;
          punct("(");
          surface_shape(s.genus, s.punctures, s.gens, 0);
          punct(")");
        } else {
          fail("expected 'free', 'abelian' or 'surface'");
        }
        return s;
      }

      void surface_shape(std::size_t& genus, std::size_t& punctures, std::vector<std::string>& gens,
                         std::size_t default_punctures) {
        genus     = numbered("genus");
        punctures = default_punctures;
        if (accept(",")) {
          punctures = numbered("punctures");
        }
        punct(":");
        gens = names();
      }

      AttachPolicy assume() {
        std::string const v = name();
        if (v == "unknown") {
          return AttachPolicy::assume_unknown;
        }
        if (v == "all") {
          return AttachPolicy::force;
        }
        --i_;
        fail("expected 'unknown' or 'all'");
      }

      BlockDecl block() {
        BlockDecl b;
        b.line   = cur().line;
        b.column = cur().column;
        keyword("block");
        std::string const kind = name();
        if (kind != "A" && kind != "Q" && kind != "T") {
          --i_;
          fail("expected block kind A, Q or T");
        }
        punct("{");
        if (kind == "A") {
          ABlockDecl a;
          bool       attached = false;
          fields([&](std::string const& f) {
            if (f == "attach") {
              a.attach = word();
              attached = true;
            } else if (f == "rank") {
              a.rank = number();
            } else if (f == "letters") {
              a.letters = names();
            } else if (f == "assume") {
              b.policy = assume();
            } else {
              return false;
            }
            return true;
          });
          if (!attached) {
            fail("block A needs an attach word");
          }
          b.data = std::move(a);
        } else if (kind == "T") {
          TBlockDecl tb;
          fields([&](std::string const& f) {
            if (f == "attach") {
              punct("(");
              tb.attach.push_back(word());
              while (accept(",")) {
                tb.attach.push_back(word());
              }
              punct(")");
            } else if (f == "rank") {
              tb.rank = number();
            } else if (f == "letters") {
              tb.letters = names();
            } else if (f == "assume") {
              b.policy = assume();
            } else {
              return false;
            }
            return true;
          });
          if (tb.attach.empty()) {
            fail("block T needs attach words");
          }
          b.data = std::move(tb);
        } else {
          QBlockDecl q;
          fields([&](std::string const& f) {
            if (f == "surface") {
              punct("(");
              surface_shape(q.genus, q.punctures, q.gens, 1);
              punct(")");
            } else if (f == "boundary") {
              map_entries([&] {
                Located key;
                if (cur().kind == Token::Kind::name) {
                  key = {cur().text, cur().line, cur().column};
                  take();
                } else {
                  key = word();
                }
                punct("->");
                q.boundary.emplace_back(std::move(key), word());
              });
            } else if (f == "retract") {
              map_entries([&] {
                std::string g = name();
                punct("->");
                q.retract.emplace_back(std::move(g), word());
              });
            } else if (f == "letters") {
              q.letters = names();
            } else if (f == "assume") {
              b.policy = assume();
            } else {
              return false;
            }
            return true;
          });
          b.data = std::move(q);
        }
        return b;
      }

      // field (';' field)* ';'? '}'
      template <class F>
      void fields(F&& field) {
        while (!accept("}")) {
          std::string const f = name();
          punct("=");
          if (!field(f)) {
            i_ -= 2;
            fail("unknown field");
          }
          if (!accept(";") && !peek_punct("}")) {
            fail("expected ';' or '}'");
          }
        }
      }

      template <class F>
      void map_entries(F&& entry) {
        punct("{");
        if (accept("}")) {
          return;
        }
        entry();
        while (accept(",")) {
          entry();
        }
        punct("}");
      }

      std::vector<Token> toks_;
      std::size_t        i_ = 0;
    };

    inline std::string join(std::vector<std::string> const& xs) {
      std::string out;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        out += (i ? ", " : "") + xs[i];
      }
      return out;
    }

    inline std::string quoted(Located const& w) { return "\"" + w.value + "\""; }

    inline char const* policy_text(AttachPolicy p) {
      return p == AttachPolicy::force ? "all" : "unknown";
    }

    // Parses a word of the document, reporting errors at its position.
    inline Word doc_word(Located const& w, Alphabet const& a) {
      try {
        return parse_word(w.value, a);
      } catch (parse_error const& e) {
        throw parse_error(e.what(), w.line, w.column + e.column());
      } catch (alphabet_error const& e) {
        throw parse_error(e.what(), w.line, w.column);
      }
    }

  }  // namespace detail

  inline TowerDocument parse_tower_dsl(std::string_view text) { return detail::DslParser(text).document(); }

  // Canonical text; parse_tower_dsl(print_tower_dsl(d)) == d.
  inline std::string print_tower_dsl(TowerDocument const& d) {
    using detail::join;
    using detail::quoted;
    std::string out = "tower " + d.name + " {\n  base { ";
    for (std::size_t i = 0; i < d.base.size(); ++i) {
      auto const& s = d.base[i];
      out += i ? "; " : "";
      switch (s.kind) {
        case VertexKind::free_abelian:
          out += "abelian(rank=" + std::to_string(s.gens.size()) + ": " + join(s.gens) + ")";
          break;
        case VertexKind::surface:
          out += "surface(genus=" + std::to_string(s.genus) + ", punctures=" + std::to_string(s.punctures)
                 + ": " + join(s.gens) + ")";
          break;
        default:
          out += "free(" + join(s.gens) + ")";
      }
    }
    out += " }\n";
    for (auto const& b : d.blocks) {
      std::vector<std::string> fs;
      std::string              kind;
      if (auto const* a = std::get_if<ABlockDecl>(&b.data)) {
        kind = "A";
        fs.push_back("attach=" + quoted(a->attach));
        fs.push_back("rank=" + std::to_string(a->rank));
        if (!a->letters.empty()) {
          fs.push_back("letters=" + join(a->letters));
        }
      } else if (auto const* t = std::get_if<TBlockDecl>(&b.data)) {
        kind = "T";
        std::vector<std::string> ws;
        for (auto const& w : t->attach) {
          ws.push_back(quoted(w));
        }
        fs.push_back("attach=(" + join(ws) + ")");
        fs.push_back("rank=" + std::to_string(t->rank));
        if (!t->letters.empty()) {
          fs.push_back("letters=" + join(t->letters));
        }
      } else {
        auto const& q = std::get<QBlockDecl>(b.data);
        kind          = "Q";
        fs.push_back("surface=(genus=" + std::to_string(q.genus) + ", punctures=" + std::to_string(q.punctures)
                     + ": " + join(q.gens) + ")");
        std::vector<std::string> es;
        for (auto const& [k, w] : q.boundary) {
          bool const bare = is_valid_name(k.value) && k.value[0] == 'b';
          es.push_back((bare ? k.value : quoted(k)) + " -> " + quoted(w));
        }
        fs.push_back("boundary={ " + join(es) + " }");
        es.clear();
        for (auto const& [g, w] : q.retract) {
          es.push_back(g + " -> " + quoted(w));
        }
        fs.push_back("retract={ " + join(es) + " }");
        if (!q.letters.empty()) {
          fs.push_back("letters=" + join(q.letters));
        }
      }
      if (b.policy != AttachPolicy::strict) {
        fs.push_back(std::string("assume=") + detail::policy_text(b.policy));
      }
      out += "  block " + kind + " { ";
      for (std::size_t i = 0; i < fs.size(); ++i) {
        out += (i ? "; " : "") + fs[i];
      }
      out += " }\n";
    }
    return out + "}\n";
  }

  inline std::vector<Summand> base_summands(TowerDocument const& d) {
    std::vector<Summand> out;
    for (auto const& s : d.base) {
      switch (s.kind) {
        case VertexKind::free_abelian:
          out.push_back(Summand::abelian(s.gens));
          break;
        case VertexKind::surface:
          out.push_back(Summand::surface(s.genus, s.gens, s.punctures));
          break;
        default:
          out.push_back(Summand::free(s.gens));
      }
    }
    return out;
  }

  // Block against the alphabet of the tower it is attached to.
  inline Block resolve_block(BlockDecl const& b, Alphabet const& a) {
    using detail::doc_word;
    Block out;
    out.policy = b.policy;
    if (auto const* ad = std::get_if<ABlockDecl>(&b.data)) {
      out.data = AbelianBlock{doc_word(ad->attach, a), ad->rank, ad->letters};
    } else if (auto const* td = std::get_if<TBlockDecl>(&b.data)) {
      TorusBlock tb{{}, td->rank, td->letters};
      for (auto const& w : td->attach) {
        tb.attach.push_back(doc_word(w, a));
      }
      out.data = std::move(tb);
    } else {
      auto const&    qd = std::get<QBlockDecl>(b.data);
      QuadraticBlock q;
      q.surface        = SurfacePresentation::bounded(qd.genus, qd.punctures, qd.gens);
      auto const& sa   = q.surface.alphabet();
      auto const& std_ = q.surface.boundary_words();
      for (auto const& [k, w] : qd.boundary) {
        Word key;
        if (k.value.size() > 1 && k.value[0] == 'b'
            && k.value.find_first_not_of("0123456789", 1) == std::string::npos) {
          std::size_t const n = std::stoul(k.value.substr(1));
          if (n == 0 || n > std_.size()) {
            throw parse_error("no boundary component " + k.value, k.line, k.column);
          }
          key = std_[n - 1];
        } else {
          key = doc_word(k, sa);
        }
        q.boundary.emplace_back(key, doc_word(w, a));
      }
      q.retraction.resize(sa.size());
      std::vector<bool> seen(sa.size(), false);
      q.stable_letters = qd.letters;
      q.stable_retraction.resize(qd.letters.size());
      for (auto const& [g, w] : qd.retract) {
        if (auto const i = sa.find(g)) {
          q.retraction[*i] = doc_word(w, a);
          seen[*i]         = true;
          continue;
        }
        auto const it = std::find(qd.letters.begin(), qd.letters.end(), g);
        if (it == qd.letters.end()) {
          throw parse_error("retract names '" + g + "', which is neither a surface generator nor a stable letter",
                            w.line, w.column);
        }
        q.stable_retraction[static_cast<std::size_t>(it - qd.letters.begin())] = doc_word(w, a);
      }
      for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
          throw parse_error("retract misses surface generator '" + sa.name(i) + "'", b.line, b.column);
        }
      }
      out.data = std::move(q);
    }
    return out;
  }

  // Builds the tower; attach validation failures propagate unchanged.
  inline Tower build_tower(TowerDocument const& d, std::size_t budget = GraphOfGroups::default_budget) {
    Tower t = Tower::height0(base_summands(d));
    for (auto const& b : d.blocks) {
      t = t.attach(resolve_block(b, t.alphabet()), budget);
    }
    return t;
  }

}  // namespace rft
