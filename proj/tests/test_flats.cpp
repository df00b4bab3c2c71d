#include <catch_amalgamated.hpp>

#include <random>

#include "rft/flats.hpp"

using namespace rft;

namespace {

  Word W(std::string const& s, Alphabet const& a) { return parse_word(s, a); }

  Tower free_ab() { return Tower::height0({Summand::free({"a", "b"})}); }

  Tower example1() {
    auto const t = free_ab();
    return t.attach({AbelianBlock{W("[a,b]", t.alphabet()), 2, {"t"}}});
  }

  Tower quadratic_on_ab() {
    auto const     t = free_ab();
    QuadraticBlock q;
    q.surface    = SurfacePresentation::bounded(1, 1, {"x", "y"});
    q.boundary   = {{W("[x,y]", q.surface.alphabet()), W("[a,b]", t.alphabet())}};
    q.retraction = {W("a", t.alphabet()), W("b", t.alphabet())};
    return t.attach({q});
  }

  CoreReport core_of(Tower const& t, std::vector<std::string> const& gens) {
    std::vector<Word> ws;
    for (auto const& s : gens) {
      ws.push_back(W(s, t.alphabet()));
    }
    return extract_core(expand_cover(t, ws, 1));
  }

  ColoredCore example1_core() {
    auto const t = example1();
    return color_vertices(core_of(t, {"[a,b]", "t", "a t a^-1"}), BlockKind::abelian);
  }

  // Heights 0 to 2 mixing A, Q and T blocks.
  std::vector<Tower> flats_corpus() {
    std::vector<Tower> out;
    out.push_back(free_ab());
    out.push_back(Tower::height0({Summand::abelian({"x", "y"}), Summand::free({"a", "b"})}));
    out.push_back(example1());
    auto const e1 = example1();
    out.push_back(e1.attach({TorusBlock{{W("[a,b]", e1.alphabet()), W("t", e1.alphabet())}, 3, {"s"}}}));
    auto const q = quadratic_on_ab();
    out.push_back(q.attach({AbelianBlock{W("x", q.alphabet()), 2, {"t"}}}));
    auto const f  = free_ab();
    auto const t1 = f.attach({AbelianBlock{W("a", f.alphabet()), 2, {"s"}}});
    out.push_back(t1.attach({AbelianBlock{W("b", t1.alphabet()), 2, {"t"}}}));
    return out;
  }

}  // namespace

TEST_CASE("flat inventory of the example-1 tower") {
  auto const t  = example1();
  auto const fs = flat_inventory(t);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].rank == 2);
  CHECK(fs[0].gens == std::vector<Word>{W("[a,b]", t.alphabet()), W("t", t.alphabet())});
  CHECK(fs[0].commute_verified);
  CHECK(fs[0].certified_rank == 2);
  CHECK(flat_inventory(free_ab()).empty());
}

TEST_CASE("independent blocks give separated flat classes") {
  auto const  t  = flats_corpus().back();
  auto const  fs = flat_inventory(t);
  REQUIRE(fs.size() == 2);
  bool separated = false;
  for (auto const& p : t.top().probes()) {
    Word const x = p(fs[0].representative), y = p(fs[1].representative);
    if (!x.empty() && !y.empty() && !free_conjugator(primitive_root(x).root, primitive_root(y).root)
        && !free_conjugator(primitive_root(x).root, inverse(primitive_root(y).root))) {
      separated = true;
    }
  }
  CHECK(separated);
}

TEST_CASE("flat counts match the construction records on the corpus") {
  std::vector<std::size_t> expected{0, 1, 1, 1, 1, 2};
  auto const               corpus = flats_corpus();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto const fs = flat_inventory(corpus[i]);
    CHECK(fs.size() == expected[i]);
    CHECK(fs.size() == corpus[i].flat_records());
    for (auto const& f : fs) {
      CHECK(f.commute_verified);
    }
  }
}

TEST_CASE("coloring follows the top block kind") {
  auto const c = example1_core();
  for (auto const& v : c.vertices) {
    CHECK(v.color == (v.type == VertexType::m_type ? VertexColor::good : VertexColor::bad));
  }
  auto const q  = quadratic_on_ab();
  auto const cq = color_vertices(core_of(q, {"x", "y", "a"}), BlockKind::quadratic);
  bool       saw_n = false;
  for (auto const& v : cq.vertices) {
    saw_n = saw_n || v.type == VertexType::n_type;
    CHECK(v.color == (v.type == VertexType::n_type ? VertexColor::good : VertexColor::bad));
  }
  CHECK(saw_n);
  CHECK_THROWS_AS(color_vertices(core_of(free_ab(), {"a"}), BlockKind::abelian), domain_error);
}

TEST_CASE("isolation hypotheses on the example-1 core") {
  auto const t = example1();
  auto const r = check_isolation_hypotheses(example1_core(), t);
  CHECK(r.h0.status == HypothesisStatus::verified);
  CHECK(r.h1.status == HypothesisStatus::verified);
  REQUIRE(r.h1.pairs.size() == 1);
  auto const& p = r.h1.pairs[0];
  CHECK(format_word(p.u, t.alphabet()) == "a b a^-1 b^-1");
  CHECK(format_word(p.v, t.alphabet()) == "a^2 b a^-1 b^-1 a^-1");
  CHECK_FALSE(p.powers);
  CHECK(p.detail == "[a, a b a^-1 b^-1] is nontrivial in a free vertex group");
  CHECK(r.h2.status == HypothesisStatus::verified);
  CHECK(r.h2.detail == "'a b a^-1 b^-1' is not a proper power and not conjugate into any torus lattice");
}

TEST_CASE("a duplicated edge refutes hypothesis (1) at k = l = 1") {
  auto const t = example1();
  auto       c = example1_core();
  for (auto const& i : std::vector<ColoredIncidence>(c.incidences)) {
    if (i.vertex == 0 && reduce(i.outward).empty() && !i.local.empty()) {
      c.incidences.push_back(i);
      break;
    }
  }
  auto const r = check_isolation_hypotheses(c, t);
  CHECK(r.h1.status == HypothesisStatus::refuted);
  bool hit = false;
  for (auto const& p : r.h1.pairs) {
    if (p.status == HypothesisStatus::refuted) {
      REQUIRE(p.powers);
      CHECK(p.powers->first == 1);
      CHECK(p.powers->second == 1);
      CHECK(p.roots_equal == true);
      hit = true;
    }
  }
  CHECK(hit);
}

TEST_CASE("a forced proper-power attachment refutes hypothesis (2)") {
  auto const f = free_ab();
  auto const t = f.attach({AbelianBlock{W("a^2", f.alphabet()), 2, {"t"}}, AttachPolicy::force});
  auto const c = color_vertices(core_of(t, {"a", "t"}), BlockKind::abelian);
  auto const r = check_isolation_hypotheses(c, t);
  CHECK(r.h2.status == HypothesisStatus::refuted);
  CHECK(r.h2.detail == "'a^2' is a proper power");
}

TEST_CASE("hypothesis verdicts are monotone in the power budget") {
  auto const t = example1();
  auto const c = example1_core();
  auto       prev = check_isolation_hypotheses(c, t, 1);
  for (std::size_t b = 2; b <= 8; ++b) {
    auto const cur = check_isolation_hypotheses(c, t, b);
    if (prev.h1.status == HypothesisStatus::refuted) {
      CHECK(cur.h1.status == HypothesisStatus::refuted);
    }
    CHECK(cur.h1.status != HypothesisStatus::budget_limited);
    prev = cur;
  }
}

TEST_CASE("a top quadratic block makes hypothesis (2) not applicable") {
  auto const q = quadratic_on_ab();
  auto const c = color_vertices(core_of(q, {"x", "y", "a"}), BlockKind::quadratic);
  auto const r = check_isolation_hypotheses(c, q);
  CHECK(r.h2.status == HypothesisStatus::not_applicable);
  CHECK(r.h0.status == HypothesisStatus::verified);
}

TEST_CASE("isolation bound spot values") {
  using B = SymbolicBound;
  B::Assignment zero;
  zero.functions["phi_v"] = [](std::int64_t) { return std::int64_t{0}; };
  zero.constants["diam_e"] = 5;
  auto const b = compose_isolation_bound({B::atom("phi_v")}, {}, std::nullopt, {"diam_e"});
  CHECK(b.to_string() == "max(D(phi_v), D(diam_e))");
  CHECK(b.eval(3, zero) == 11);

  B::Assignment sq;
  sq.functions["phi_v"] = [](std::int64_t k) { return k * k; };
  CHECK(compose_isolation_bound({B::atom("phi_v")}, {}, std::nullopt, {}).eval(3, sq) == 42);

  auto const inner  = compose_isolation_bound({B::atom("phi_v")}, {}, std::nullopt, {});
  auto const nested = compose_isolation_bound({inner}, {}, std::nullopt, {});
  CHECK(nested.to_string() == "D(D(phi_v))");
  for (std::int64_t k : {1, 2, 4}) {
    CHECK(nested.eval(k, sq) == 16 * k * k + 6 * k);
  }
  CHECK_THROWS_AS(compose_isolation_bound({}, {}, std::nullopt, {}), domain_error);
}

TEST_CASE("isolation bounds are monotone and dominate every family term") {
  using B = SymbolicBound;
  std::mt19937                        rng(11);
  std::uniform_int_distribution<int>  coef(0, 5);
  for (int trial = 0; trial < 50; ++trial) {
    B::Assignment a;
    for (auto const& n : {"phi_1", "phi_2", "psi_e", "psi_p"}) {
      std::int64_t const c0 = coef(rng), c1 = coef(rng), c2 = coef(rng);
      a.functions[n] = [=](std::int64_t k) { return c0 + c1 * k + c2 * k * k; };
    }
    a.constants["diam_1"] = coef(rng);
    std::vector<B> terms{B::doubling(B::atom("phi_1")), B::doubling(B::atom("phi_2")),
                         B::doubling(B::atom("psi_e")), B::doubling(B::atom("psi_p")),
                         B::doubling(B::constant("diam_1"))};
    auto const b = compose_isolation_bound({B::atom("phi_1"), B::atom("phi_2")}, {B::atom("psi_e")},
                                           B::atom("psi_p"), {"diam_1"});
    std::int64_t last = -1;
    for (std::int64_t k = 0; k <= 16; ++k) {
      std::int64_t const v = b.eval(k, a);
      CHECK(v >= last);
      for (auto const& t : terms) {
        CHECK(v >= t.eval(k, a));
      }
      last = v;
    }
  }
}
