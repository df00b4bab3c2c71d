// Acceptance suite: one PASS/FAIL line per criterion; exits 1 on any failure.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "free_group_oracle.hpp"
#include "rft/core.hpp"
#include "rft/dsl.hpp"
#include "rft/embed.hpp"
#include "rft/flats.hpp"
#include "rft/surface.hpp"
#include "rft/witness.hpp"
#include "stallings_oracle.hpp"

using namespace rft;

namespace {

  std::string const corpus = RFT_CORPUS_DIR;

  struct Outcome {
    bool        pass = true;
    std::string note;
  };

  // Records the first failed expectation.
  struct Checker {
    Outcome o;
    void    expect(bool cond, std::string const& what) {
      if (!cond && o.pass) {
        o.pass = false;
        o.note = what;
      }
    }
  };

  Word W(std::string const& s, Alphabet const& a) { return parse_word(s, a); }

  Word to_word(oracle::Letters const& w) {
    Word out;
    for (int l : w) {
      out.push_back(l);
    }
    return out;
  }

  oracle::Letters to_letters(Word const& w) { return {w.begin(), w.end()}; }

  Tower load(std::string const& file) {
    std::ifstream      in(corpus + "/" + file);
    std::ostringstream s;
    s << in.rdbuf();
    return build_tower(parse_tower_dsl(s.str()));
  }

  Tower example1() { return load("genus2host.rft"); }

  // All letter sequences (not necessarily reduced) of length <= n over `rank` generators.
  std::vector<oracle::Letters> all_words(int rank, std::size_t n) {
    std::vector<oracle::Letters> out{{}}, layer{{}};
    for (std::size_t len = 0; len < n; ++len) {
      std::vector<oracle::Letters> next;
      for (auto const& w : layer) {
        for (int g = 1; g <= rank; ++g) {
          for (int l : {g, -g}) {
            auto x = w;
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

  ////////////////////////////////////////////////////////////////////////

  Outcome embedding() {
    Checker          c;
    Alphabet const   ab({"a", "b"}), cd({"c", "d"});
    SplittingData    s{SplittingCase::amalgam_rigid_rigid,
                    GraphOfGroups({VertexGroup::free("A", ab), VertexGroup::free("B", cd)},
                                  {{"e", 1, 0, 1, {W("[a,b]", ab)}, {W("[c,d]", cd)}}})};
    auto const       host = load("wedge2.rft");
    GroupHom const   nu(s.graph.alphabet(), host.alphabet(), {W("a", ab), W("b", ab), W("a", ab), W("b", ab)});
    auto const       r  = embed_step(s, {nu}, host);
    auto const&      ga = r.gamma.alphabet();
    c.expect(format_presentation(r.gamma.presentation()) == "<a,b,t | a b a^-1 b^-1 t b a b^-1 a^-1 t^-1>",
             "Gamma is " + format_presentation(r.gamma.presentation()));
    c.expect(r.j.image(2) == W("t a t^-1", ga), "j(c) = " + format_word(r.j.image(2), ga));
    c.expect(r.j.image(3) == W("t b t^-1", ga), "j(d) = " + format_word(r.j.image(3), ga));
    c.expect(!r.relator_checks.empty(), "no relator checks");
    for (auto const& rc : r.relator_checks) {
      c.expect(rc.verdict == Verdict::trivial, "relator image " + format_word(rc.image, ga) + " not Trivial");
    }
    auto const cert = certify_injectivity_on_ball(r, s.graph, 3);
    c.expect(cert.status == InjectivityCertificate::Status::full, "certificate not full");
    c.expect(cert.refutations == 0 && cert.unknowns == 0, "refutations or unknowns on the ball");
    c.o.note = c.o.pass ? "radius 3: " + std::to_string(cert.checked) + " nontrivial elements certified" : c.o.note;
    return c.o;
  }

  Outcome residual_witness() {
    Checker           c;
    auto const        t = example1();
    std::vector<Word> ws;
    for (auto const& w : enumerate_ball(t.alphabet(), 2)) {
      ws.push_back(w);
    }
    auto const cert  = find_rf_witness(t, ws, 16, 1);
    auto const again = find_rf_witness(t, ws, 16, 1);
    c.expect(cert.valid, "no witness within budget 16");
    if (!cert.valid) {
      return c.o;
    }
    c.expect(again.params == cert.params && again.images == cert.images, "witness differs between runs");
    oracle::Letters const comm{1, 2, -1, -2};
    auto const            ti = to_letters(cert.hom.image(2));
    std::int64_t          n  = 0;
    for (std::int64_t k = 1; k <= 16 && n == 0; ++k) {
      if (ti == oracle::power(comm, k)) {
        n = k;
      }
    }
    c.expect(n >= 1, "t does not map to a positive power of [a,b]");
    c.expect(to_letters(cert.hom.image(0)) == oracle::Letters{1} && to_letters(cert.hom.image(1)) == oracle::Letters{2},
             "a, b not fixed");
    std::vector<oracle::Letters> letters;
    for (auto const& w : cert.words) {
      letters.push_back(to_letters(w));
    }
    c.expect(oracle::injective_on(letters, {{1}, {2}, ti}), "images not pairwise distinct under plain reduction");
    c.expect(oracle::substitute(to_letters(cert.relators.at(0)), {{1}, {2}, ti}).empty(), "relator not killed");
    c.o.note = c.o.pass ? "t -> [a,b]^" + std::to_string(n) + " on " + std::to_string(cert.words.size()) + " words"
                        : c.o.note;
    return c.o;
  }

  Outcome word_problem_oracle() {
    Checker     c;
    auto const  t       = example1();
    std::size_t unknown = 0, count = 0;
    for (auto const& w : all_words(2, 5)) {
      Verdict const v        = tower_word_problem(t, to_word(w), 16);
      Verdict const expected = oracle::free_reduce(w).empty() ? Verdict::trivial : Verdict::nontrivial;
      unknown += v == Verdict::unknown;
      ++count;
      c.expect(v == expected, "verdict disagrees with free reduction");
    }
    c.expect(unknown == 0, std::to_string(unknown) + " Unknown verdicts");
    c.o.note = c.o.pass ? std::to_string(count) + " words, 0 Unknown" : c.o.note;
    return c.o;
  }

  Outcome dehn() {
    Checker      c;
    auto const   s = SurfacePresentation::closed(2, {"a", "b", "c", "d"});
    Word const   r = s.relator();
    auto const   trivial = [&](Word const& w) { return dehn_reduce(s, w).empty(); };
    auto const   abel_zero = [](Word const& w) {
      auto const v = oracle::abelianize(to_letters(w), 4);
      return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
    };
    std::size_t checked = 0;
    auto        expect_trivial = [&](Word const& w) {
      ++checked;
      c.expect(trivial(w), "relator consequence not reduced to 1");
      c.expect(abel_zero(w), "trivial verdict with nonzero abelianization");
    };
    for (Word const& base : {r, inverse(r)}) {
      for (std::size_t i = 0; i < base.size(); ++i) {
        Word rot = base.subword(i, base.size() - i);
        rot.append(base.subword(0, i));
        expect_trivial(rot);
      }
    }
    std::mt19937                       rng(1729);
    std::uniform_int_distribution<int> len(0, 4);
    std::bernoulli_distribution        sign;
    for (int i = 0; i < 100; ++i) {
      auto rand_word = [&] {
        std::uniform_int_distribution<int> g(1, 4);
        oracle::Letters                    w;
        for (int k = len(rng); k > 0; --k) {
          w.push_back(sign(rng) ? g(rng) : -g(rng));
        }
        return to_word(oracle::free_reduce(w));
      };
      Word const g1 = rand_word(), g2 = rand_word();
      Word const r1 = sign(rng) ? r : inverse(r), r2 = sign(rng) ? r : inverse(r);
      expect_trivial(conjugate(g1, r1) * conjugate(g2, r2));
    }
    for (int g = 1; g <= 4; ++g) {
      for (int x : {g, -g}) {
        ++checked;
        c.expect(!trivial(Word{x}), "generator reduced to 1");
        for (int h = 1; h <= 4; ++h) {
          for (int y : {h, -h}) {
            if (y == -x) {
              continue;
            }
            Word const w{x, y};
            if (!abel_zero(w)) {
              ++checked;
              c.expect(!trivial(w), "length-2 word with nonzero abelianization reduced to 1");
            }
          }
        }
      }
    }
    c.o.note = c.o.pass ? std::to_string(checked) + " words" : c.o.note;
    return c.o;
  }

  Outcome core_oracle() {
    Checker                       c;
    auto const                    t = load("wedge2.rft");
    std::mt19937                  rng(20240607);
    std::uniform_int_distribution<int> ngens(1, 3), len(1, 4), pick(0, 3);
    int const                     letters[] = {1, -1, 2, -2};
    std::vector<std::vector<oracle::Letters>> samples{{{1, 1}, {2}, {1, 2, -1}}};
    for (int i = 0; i < 200; ++i) {
      std::vector<oracle::Letters> gens;
      for (int j = ngens(rng); j > 0; --j) {
        oracle::Letters w;
        for (int k = len(rng); static_cast<int>(w.size()) < k;) {
          int const l = letters[pick(rng)];
          if (w.empty() || w.back() != -l) {
            w.push_back(l);
          }
        }
        gens.push_back(w);
      }
      samples.push_back(gens);
    }
    std::size_t finite = 0;
    for (auto const& gens : samples) {
      std::vector<Word> ws;
      for (auto const& g : gens) {
        ws.push_back(to_word(g));
      }
      auto const             r = extract_core(expand_cover(t, ws, 1));
      auto const             o = oracle::stallings(gens, 2);
      oracle::StallingsGraph mine;
      mine.vertices = r.vertices.size();
      for (auto const& e : r.edges) {
        mine.edges.emplace(e.from, e.base_edge == "a" ? 1 : 2, e.to);
      }
      c.expect(mine.vertices == o.vertices && mine.edges == o.edges, "core differs from the oracle: " + r.canonical);
      if (oracle::is_full_cover(o, 2)) {
        ++finite;
        c.expect(r.index && *r.index == o.vertices, "index mismatch");
        c.expect(r.rank_estimate == static_cast<std::int64_t>(o.vertices) * (2 - 1) + 1, "rank formula fails");
      }
    }
    c.expect(finite >= 1, "no finite-index case");
    c.o.note = c.o.pass ? std::to_string(samples.size()) + " subgroups, " + std::to_string(finite) + " finite-index"
                        : c.o.note;
    return c.o;
  }

  Outcome flats() {
    Checker c;
    std::vector<std::string> const files{"wedge2.rft", "flats1_abelian_summand.rft", "genus2host.rft",
                                         "flats3_torus.rft", "flats4_quadratic.rft", "flats5_two_blocks.rft"};
    std::size_t max_height = 0;
    for (auto const& f : files) {
      auto const t  = load(f);
      auto const fs = flat_inventory(t);
      max_height    = std::max(max_height, t.height());
      c.expect(fs.size() == t.flat_records(), f + ": inventory count differs from records");
      for (auto const& x : fs) {
        c.expect(x.commute_verified, f + ": lattice commutator not Trivial");
      }
    }
    c.expect(max_height == 2, "corpus does not reach height 2");
    auto const        t = example1();
    auto const&       a = t.alphabet();
    std::vector<Word> gens{W("[a,b]", a), W("t", a), W("a t a^-1", a)};
    auto const        core = color_vertices(extract_core(expand_cover(t, gens, 1)), BlockKind::abelian);
    for (auto const& v : core.vertices) {
      c.expect((v.type == VertexType::m_type) == (v.color == VertexColor::good), "coloring off the top-A rule");
    }
    auto const iso = check_isolation_hypotheses(core, t);
    c.expect(iso.h0.status == HypothesisStatus::verified, "(0) " + std::string(to_string(iso.h0.status)));
    c.expect(iso.h1.status == HypothesisStatus::verified, "(1) " + std::string(to_string(iso.h1.status)));
    bool noncommute = false;
    for (auto const& p : iso.h1.pairs) {
      noncommute = noncommute || p.detail.find("nontrivial") != std::string::npos;
    }
    c.expect(noncommute, "(1) not settled by non-commutation");
    c.expect(iso.h2.status == HypothesisStatus::verified, "(2) " + std::string(to_string(iso.h2.status)));
    c.expect(iso.h2.detail.find("not a proper power") != std::string::npos
                 && iso.h2.detail.find("not conjugate into any torus lattice") != std::string::npos,
             "(2) detail: " + iso.h2.detail);
    c.o.note = c.o.pass ? "6 towers; (0) (1) (2) verified" : c.o.note;
    return c.o;
  }

  Outcome bounds() {
    Checker c;
    using B = SymbolicBound;
    B::Assignment zero;
    zero.functions["phi"]  = [](std::int64_t) { return std::int64_t{0}; };
    zero.constants["diam"] = 5;
    c.expect(compose_isolation_bound({B::atom("phi")}, {}, std::nullopt, {"diam"}).eval(3, zero) == 11,
             "phi(3) != 11");
    B::Assignment sq;
    sq.functions["phi"] = [](std::int64_t k) { return k * k; };
    auto const nested   = compose_isolation_bound(
        {compose_isolation_bound({B::atom("phi")}, {}, std::nullopt, {})}, {}, std::nullopt, {});
    for (std::int64_t k : {1, 2, 4}) {
      // phi(4k) + 4k + 2k
      c.expect(nested.eval(k, sq) == 16 * k * k + 6 * k, "height-2 nesting at k=" + std::to_string(k));
    }
    std::mt19937                       rng(500);
    std::uniform_int_distribution<int> coef(0, 6);
    for (int trial = 0; trial < 500; ++trial) {
      B::Assignment a;
      for (auto const* n : {"phi1", "phi2", "psi", "psip"}) {
        std::int64_t const c0 = coef(rng), c1 = coef(rng), c2 = coef(rng);
        a.functions[n] = [=](std::int64_t k) { return c0 + c1 * k + c2 * k * k; };
      }
      a.constants["d"] = coef(rng);
      auto const b = compose_isolation_bound({B::atom("phi1"), B::atom("phi2")}, {B::atom("psi")}, B::atom("psip"),
                                             {"d"});
      std::vector<B> terms{B::doubling(B::atom("phi1")), B::doubling(B::atom("phi2")), B::doubling(B::atom("psi")),
                           B::doubling(B::atom("psip")), B::doubling(B::constant("d"))};
      std::int64_t last = -1;
      for (std::int64_t k = 0; k <= 12; ++k) {
        std::int64_t const v = b.eval(k, a);
        c.expect(v >= last, "bound not monotone");
        for (auto const& t : terms) {
          c.expect(v >= t.eval(k, a), "bound does not dominate " + t.to_string());
        }
        last = v;
      }
    }
    c.o.note = c.o.pass ? "spot checks and 500 assignments" : c.o.note;
    return c.o;
  }

  Outcome limit_group_sampling() {
    Checker           c;
    auto const        t = example1();
    std::vector<Word> ball;
    for (auto const& w : enumerate_ball(t.alphabet(), 2)) {
      ball.push_back(w);
    }
    std::size_t unknown = 0, counter = 0, checks = 0;
    for (std::size_t i = 0; i < ball.size(); ++i) {
      for (std::size_t j = 0; j < ball.size(); ++j) {
        if (i == j) {
          continue;
        }
        Verdict const d = tower_word_problem(t, ball[i] * inverse(ball[j]), 16);
        unknown += d == Verdict::unknown;
        if (d != Verdict::nontrivial) {
          continue;
        }
        for (std::int64_t n : {2, 3}) {
          ++checks;
          Verdict const v = tower_word_problem(t, power(ball[i], n) * inverse(power(ball[j], n)), 16);
          unknown += v == Verdict::unknown;
          counter += v == Verdict::trivial;
        }
      }
    }
    for (auto const& x : ball) {
      Verdict const xv = tower_word_problem(t, x, 16);
      unknown += xv == Verdict::unknown;
      if (xv != Verdict::nontrivial) {
        continue;
      }
      for (auto const& g : ball) {
        ++checks;
        Verdict const comm = tower_word_problem(t, commutator(x, conjugate(g, x)), 16);
        unknown += comm == Verdict::unknown;
        if (comm != Verdict::trivial) {
          continue;
        }
        Verdict const eq = tower_word_problem(t, inverse(x) * conjugate(g, x), 16);
        unknown += eq == Verdict::unknown;
        counter += eq == Verdict::nontrivial;
      }
    }
    c.expect(counter == 0, std::to_string(counter) + " counterexamples");
    c.expect(unknown == 0, std::to_string(unknown) + " Unknown verdicts");
    c.o.note = std::to_string(checks) + " checks, " + std::to_string(counter) + " counterexamples, "
               + std::to_string(unknown) + " Unknown" + (c.o.pass ? "" : "; " + c.o.note);
    return c.o;
  }

}  // namespace

int main() {
  struct Criterion {
    char const*              name;
    std::function<Outcome()> run;
    double                   limit_s;
  };
  std::vector<Criterion> const criteria{
      {"1 embedding of the genus-2 double", embedding, 60},
      {"2 residual-freeness witness", residual_witness, 0},
      {"3 word problem vs free reduction", word_problem_oracle, 120},
      {"4 Dehn reduction on the genus-2 surface", dehn, 0},
      {"5 cores vs the Stallings oracle", core_oracle, 0},
      {"6 flat bookkeeping and isolation hypotheses", flats, 0},
      {"7 isolation bound calculus", bounds, 0},
      {"8 root uniqueness and conjugate commuting", limit_group_sampling, 0},
  };
  int failures = 0;
  for (auto const& cr : criteria) {
    auto const start = std::chrono::steady_clock::now();
    Outcome    o;
    try {
      o = cr.run();
    } catch (std::exception const& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.limit_s > 0 && secs > cr.limit_s) {
      o = {false, "took " + std::to_string(secs) + " s"};
    }
    failures += !o.pass;
    std::printf("%s criterion %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", cr.name, secs, o.note.c_str());
  }
  return failures == 0 ? 0 : 1;
}
