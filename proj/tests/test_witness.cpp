#include <catch_amalgamated.hpp>

#include "rft/witness.hpp"

using namespace rft;

namespace {

  Word W(std::string const& s, Alphabet const& a) { return parse_word(s, a); }

  Tower example1() {
    auto const t = Tower::height0({Summand::free({"a", "b"})});
    return t.attach({AbelianBlock{W("[a,b]", t.alphabet()), 2, {"t"}}});
  }

}  // namespace

TEST_CASE("free towers are witnessed by the identity") {
  auto const t = Tower::height0({Summand::free({"a", "b"})});
  auto const c = find_rf_witness(t, enumerate_ball(t.alphabet(), 3), 4);
  REQUIRE(c.valid);
  CHECK(c.attempts == 1);
  CHECK(c.hom.images() == GroupHom::identity(t.alphabet()).images());
  CHECK(check_witness(c));
}

TEST_CASE("free abelian summand needs distinct exponent sums") {
  auto const  t = Tower::height0({Summand::abelian({"x", "y"})});
  auto const& a = t.alphabet();
  auto const  c = find_rf_witness(t, {W("x", a), W("y", a), W("x y", a)}, 16, 0);
  REQUIRE(c.valid);
  CHECK(c.params == std::vector<std::int64_t>{1, 2});
  CHECK(c.trace.size() == 2);
  CHECK_FALSE(c.trace[0].collision.empty());
  CHECK(check_witness(c));
}

TEST_CASE("example-1 tower is witnessed by t -> [a,b]^N") {
  auto const t = example1();
  auto const ball = enumerate_ball(t.alphabet(), 2);
  auto const c = find_rf_witness(t, ball, 16, 0);
  REQUIRE(c.valid);
  REQUIRE(c.params.size() == 1);
  auto const n = c.params[0];
  CHECK(n >= 1);
  CHECK(n <= 16);
  Alphabet const& f = c.hom.target();
  CHECK(c.hom.image(2) == power(W("[a,b]", f), n));
  CHECK(check_witness(c));
  // independent recheck by pairwise comparison of reduced images
  for (std::size_t i = 0; i < ball.size(); ++i) {
    for (std::size_t j = i + 1; j < ball.size(); ++j) {
      CHECK(reduce(c.hom(ball[i]) * inverse(c.hom(ball[j]))).size() > 0);
    }
  }
}

TEST_CASE("witness search is deterministic for a fixed seed") {
  auto const t    = example1();
  auto const ball = enumerate_ball(t.alphabet(), 2);
  for (std::uint64_t seed : {0u, 1u, 7u}) {
    auto const c1 = find_rf_witness(t, ball, 16, seed);
    auto const c2 = find_rf_witness(t, ball, 16, seed);
    CHECK(c1.params == c2.params);
    CHECK(c1.images == c2.images);
    CHECK(c1.attempts == c2.attempts);
  }
}

TEST_CASE("empty word sets are witnessed trivially") {
  auto const t = example1();
  auto const c = find_rf_witness(t, {}, 4);
  CHECK(c.valid);
  CHECK(check_witness(c));
}

TEST_CASE("a tampered certificate fails the recheck") {
  auto const t = example1();
  auto       c = find_rf_witness(t, enumerate_ball(t.alphabet(), 1), 16);
  REQUIRE(c.valid);
  auto images = c.hom.images();
  images[2]   = Word{};
  c.hom       = GroupHom(c.hom.source(), c.hom.target(), images);
  CHECK_FALSE(check_witness(c));
}

TEST_CASE("exhausted budgets report the collisions") {
  auto const  t = example1();
  auto const& a = t.alphabet();
  auto const  c = find_rf_witness(t, {W("t", a), Word{}}, 0);
  CHECK_FALSE(c.valid);
  REQUIRE(c.trace.size() == 1);
  CHECK(c.trace[0].collision == "'t' maps to the identity");
}

TEST_CASE("surface and quadratic towers have witnesses") {
  auto const s = Tower::height0({Summand::surface(2, {"a", "b", "c", "d"})});
  auto const c = find_rf_witness(s, enumerate_ball(s.alphabet(), 1), 8);
  CHECK(c.valid);
  CHECK(check_witness(c));

  auto const     f = Tower::height0({Summand::free({"a", "b"})});
  QuadraticBlock q;
  q.surface    = SurfacePresentation::bounded(1, 1, {"x", "y"});
  q.boundary   = {{W("[x,y]", q.surface.alphabet()), W("[a,b]", f.alphabet())}};
  q.retraction = {W("a", f.alphabet()), W("b", f.alphabet())};
  auto const g = f.attach({q});
  auto const w = find_rf_witness(g, enumerate_ball(g.alphabet(), 2), 16);
  CHECK(w.valid);
  CHECK(check_witness(w));
}
