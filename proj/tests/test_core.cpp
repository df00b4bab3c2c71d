#include <catch_amalgamated.hpp>

#include <random>

#include "rft/core.hpp"
#include "rft/witness.hpp"
#include "stallings_oracle.hpp"

using namespace rft;

namespace {

  Word W(std::string const& s, Alphabet const& a) { return parse_word(s, a); }

  Tower wedge2() { return Tower::height0({Summand::free({"a", "b"})}); }

  Tower example1() {
    auto const t = wedge2();
    return t.attach({AbelianBlock{W("[a,b]", t.alphabet()), 2, {"t"}}});
  }

  std::vector<Word> words(Tower const& t, std::vector<std::string> const& ss) {
    std::vector<Word> out;
    for (auto const& s : ss) {
      out.push_back(W(s, t.alphabet()));
    }
    return out;
  }

  CoreReport core_of(Tower const& t, std::vector<std::string> const& gens, std::size_t depth = 1) {
    return extract_core(expand_cover(t, words(t, gens), depth));
  }

  // Core graph of a free cover in the oracle's encoding.
  oracle::StallingsGraph as_oracle(CoreReport const& r) {
    oracle::StallingsGraph g;
    g.vertices = r.vertices.size();
    for (auto const& e : r.edges) {
      g.edges.emplace(e.from, e.base_edge == "a" ? 1 : 2, e.to);
    }
    return g;
  }

  std::vector<int> random_word(std::mt19937& rng, std::size_t len) {
    std::uniform_int_distribution<int> pick(0, 3);
    int const                          letters[] = {1, -1, 2, -2};
    std::vector<int>                   w;
    while (w.size() < len) {
      int const l = letters[pick(rng)];
      if (!w.empty() && w.back() == -l) {
        continue;
      }
      w.push_back(l);
    }
    return w;
  }

  Word to_word(std::vector<int> const& w) {
    Word out;
    for (int l : w) {
      out.push_back(l);
    }
    return out;
  }

}  // namespace

TEST_CASE("index-2 subgroup of the free group has a 2-vertex core of rank 3") {
  auto const r = core_of(wedge2(), {"a^2", "b", "a b a^-1"});
  CHECK(r.vertices.size() == 2);
  CHECK(r.edges.size() == 4);
  CHECK(r.rank_estimate == 3);
  CHECK(r.free_exact);
  REQUIRE(r.index);
  CHECK(*r.index == 2);
  CHECK(r.rank_estimate == static_cast<std::int64_t>(*r.index) * (2 - 1) + 1);
  CHECK(r.exact);
  for (auto const& p : classify_edge_pieces(r)) {
    CHECK(p.kind == PieceKind::strip);
    CHECK(p.support_in_core);
  }
  CHECK(r.loop_expressions.size() == 3);
}

TEST_CASE("the full free group gives the base graph") {
  auto const r = core_of(wedge2(), {"a", "b"});
  CHECK(r.vertices.size() == 1);
  CHECK(r.edges.size() == 2);
  CHECK(r.rank_estimate == 2);
  REQUIRE(r.index);
  CHECK(*r.index == 1);
}

TEST_CASE("a cyclic subgroup gives one loop plus frontier") {
  auto const t = wedge2();
  auto const c = expand_cover(t, words(t, {"a"}), 1);
  CHECK(c.alive_vertices().size() == 3);  // root and two b-frontier lifts
  auto const r = extract_core(c);
  CHECK(r.vertices.size() == 1);
  CHECK(r.edges.size() == 1);
  CHECK(r.edges[0].base_edge == "a");
  CHECK_FALSE(r.index);
  CHECK(r.stabilized);
}

TEST_CASE("required cells enlarge the core") {
  auto const t = wedge2();
  auto const c = expand_cover(t, words(t, {"a"}), 1);
  std::size_t frontier = 0;
  for (auto v : c.alive_vertices()) {
    if (c.vertices()[v].frontier) {
      frontier = v;
    }
  }
  REQUIRE(frontier != 0);
  auto const r = extract_core(c, {{frontier}, {}});
  CHECK(r.vertices.size() == 2);
  CHECK(r.edges.size() == 2);
  CHECK(r.required_covered == std::vector<bool>{true});
  CHECK(extract_core(c, {{999}, {}}).required_covered == std::vector<bool>{false});
}

TEST_CASE("cores agree with the Stallings oracle on 200 seeded subgroups") {
  std::mt19937                          rng(20240607);
  std::uniform_int_distribution<int>    ngens(1, 3);
  std::uniform_int_distribution<int>    len(1, 4);
  std::size_t                           finite = 0;
  auto const                            t = wedge2();
  std::vector<std::vector<std::vector<int>>> samples{{{1, 1}, {2}, {1, 2, -1}}};
  for (int i = 0; i < 200; ++i) {
    std::vector<std::vector<int>> gens;
    int const                     k = ngens(rng);
    for (int j = 0; j < k; ++j) {
      gens.push_back(random_word(rng, static_cast<std::size_t>(len(rng))));
    }
    samples.push_back(gens);
  }
  for (auto const& gens : samples) {
    std::vector<Word> ws;
    for (auto const& g : gens) {
      ws.push_back(to_word(g));
    }
    auto const r = extract_core(expand_cover(t, ws, 1));
    auto const o = oracle::stallings(gens, 2);
    INFO(r.canonical);
    CHECK(as_oracle(r).vertices == o.vertices);
    CHECK(as_oracle(r).edges == o.edges);
    CHECK(r.exact);
    if (oracle::is_full_cover(o, 2)) {
      ++finite;
      REQUIRE(r.index);
      CHECK(*r.index == o.vertices);
      CHECK(r.rank_estimate == static_cast<std::int64_t>(o.vertices) + 1);
    }
  }
  CHECK(finite >= 1);
}

TEST_CASE("expansion order does not change the folded core") {
  auto const t = wedge2();
  std::mt19937 rng(7);
  for (int i = 0; i < 40; ++i) {
    std::vector<Word> ws;
    for (int j = 0; j < 3; ++j) {
      ws.push_back(to_word(random_word(rng, 3)));
    }
    auto const fwd = extract_core(expand_cover(t, ws, 1));
    std::reverse(ws.begin(), ws.end());
    auto const bwd = extract_core(expand_cover(t, ws, 1));
    CHECK(fwd.canonical == bwd.canonical);
  }
}

TEST_CASE("a and t generate a free subgroup of the example-1 tower") {
  auto const t = example1();
  auto const r = core_of(t, {"a", "t"});
  CHECK(r.free_exact);
  CHECK(r.rank_estimate == 2);
  CHECK(r.pi1.relators.empty());
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(tower_word_problem(t, rename_word(r.realization(r.loop_expressions[i]), r.realization.target(),
                                            t.alphabet())
                                    * inverse(r.generators[i]))
          == Verdict::trivial);
  }
  // no relation of length <= 3 between a and t
  Alphabet const    at({"a", "t"});
  GroupHom const    into(at, t.alphabet(), words(t, {"a", "t"}));
  std::vector<Word> ball;
  for (auto const& w : enumerate_ball(at, 3)) {
    ball.push_back(into(w));
  }
  auto const cert = find_rf_witness(t, ball, 6);
  CHECK(cert.valid);
  CHECK(check_witness(cert));
}

TEST_CASE("finite-index cover of the example-1 tower lifts the edge as annuli") {
  auto const t = example1();
  auto const r = core_of(t, {"b", "a^2", "a b a^-1", "t", "a t a^-1"});
  std::size_t annuli = 0;
  for (auto const& p : classify_edge_pieces(r)) {
    if (r.edges[p.edge].base_edge == "e") {
      CHECK(p.kind == PieceKind::annulus);
      ++annuli;
    }
  }
  CHECK(annuli == 2);
  CHECK(r.pi1_complete);
}

TEST_CASE("a rank-2 torus edge is a torus tube") {
  auto const  t  = example1();
  auto const& a  = t.alphabet();
  auto const  t2 = t.attach({TorusBlock{{W("[a,b]", a), W("t", a)}, 3, {"s"}}});
  auto const  r  = core_of(t2, {"[a,b]", "t", "s"});
  bool        tube = false;
  for (auto const& p : classify_edge_pieces(r)) {
    tube = tube || p.kind == PieceKind::torus_tube;
  }
  CHECK(tube);
}

TEST_CASE("stabilization evidence stays quiet for a third round") {
  auto const t = example1();
  auto       c = expand_cover(t, words(t, {"a", "t"}), 1);
  auto const r = extract_core(c);
  CHECK(r.stabilized);
  CHECK(r.rank_history.size() == 3);
  for (int i = 0; i < 3; ++i) {
    c.expand_round();
  }
  CHECK(extract_core(c).rank_estimate == r.rank_estimate);
}

TEST_CASE("trivial generators are dropped with a warning") {
  auto const t = wedge2();
  auto const c = expand_cover(t, words(t, {"a a^-1", "b"}), 0);
  CHECK(c.generators().size() == 1);
  CHECK(c.warnings().size() == 1);
}
