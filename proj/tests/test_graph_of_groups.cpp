#include <catch_amalgamated.hpp>

#include "rft/graph_of_groups.hpp"
#include "smith_oracle.hpp"

using namespace rft;

namespace {

  Alphabet const ab({"a", "b"});
  Alphabet const cd({"c", "d"});

  Word W(std::string const& s, Alphabet const& a) { return parse_word(s, a); }

  GraphOfGroups one_vertex_free() { return GraphOfGroups({VertexGroup::free("F", ab)}, {}); }

  GraphOfGroups genus2_double() {
    return GraphOfGroups({VertexGroup::free("A", ab), VertexGroup::free("B", cd)},
                         {{"e", 1, 0, 1, {W("[a,b]", ab)}, {W("[c,d]", cd)}}});
  }

  GraphOfGroups hnn_on_a() {
    return GraphOfGroups({VertexGroup::free("F", ab)}, {{"t", 1, 0, 0, {W("a", ab)}, {W("a", ab)}}});
  }

  // <a,b,t | [[a,b],t]> as an amalgam of F(a,b) with Z^2 = <@w, t>
  GraphOfGroups abelian_block() {
    return GraphOfGroups({VertexGroup::free("M", ab),
                          VertexGroup::free_abelian("N", Alphabet({"@w", "t"}), {"@w"})},
                         {{"e", 1, 0, 1, {W("[a,b]", ab)}, {Word{letter(0)}}}});
  }

  bool has_pinch(GraphOfGroups const& g, NormalForm const& nf) {
    for (std::size_t i = 0; i + 1 < nf.crossings.size(); ++i) {
      auto const c = nf.crossings[i], d = nf.crossings[i + 1];
      if (c.edge != d.edge || c.dir != -d.dir) {
        continue;
      }
      int const side = d.dir > 0 ? 0 : 1;
      if (g.edge_coordinates(c.edge, side, nf.syllables[i + 1].element, 16)) {
        return true;
      }
    }
    return false;
  }

}  // namespace

TEST_CASE("fundamental presentations of the three example graphs") {
  CHECK(format_presentation(fundamental_presentation(one_vertex_free())) == "<a,b |>");
  CHECK(format_presentation(fundamental_presentation(genus2_double()))
        == "<a,b,c,d | a b a^-1 b^-1 d c d^-1 c^-1>");
  auto const p = fundamental_presentation(hnn_on_a());
  CHECK(format_presentation(p) == "<a,b,t | t a t^-1 a^-1>");
  CHECK(format_presentation(fundamental_presentation(abelian_block()))
        == "<a,b,t | a b a^-1 b^-1 t b a b^-1 a^-1 t^-1>");
}

TEST_CASE("abelianized rank matches the Smith normal form oracle") {
  // one vertex: 2 + 0 - 0; double: 4 + 0 - 0 (the identified element is
  // a commutator); HNN: 2 + 1 - 0
  CHECK(abelianized_rank(fundamental_presentation(one_vertex_free())) == 2);
  CHECK(abelianized_rank(fundamental_presentation(genus2_double())) == 4);
  CHECK(abelianized_rank(fundamental_presentation(hnn_on_a())) == 3);
  for (auto const& g : {one_vertex_free(), genus2_double(), hnn_on_a(), abelian_block()}) {
    auto const p = fundamental_presentation(g);
    CHECK(abelianized_rank(p) == oracle::free_rank_of_abelianization(relation_matrix(p), p.alphabet.size()));
  }
}

TEST_CASE("disconnected graphs are rejected") {
  CHECK_THROWS_AS(GraphOfGroups({VertexGroup::free("A", ab), VertexGroup::free("B", cd)}, {}),
                  domain_error);
}

TEST_CASE("edge images must be monomorphisms") {
  CHECK_THROWS_AS(GraphOfGroups({VertexGroup::free("F", ab)}, {{"t", 1, 0, 0, {Word{}}, {W("a", ab)}}}),
                  domain_error);
  CHECK_THROWS_AS(
      GraphOfGroups({VertexGroup::free("F", ab)},
                    {{"t", 2, 0, 0, {W("a", ab), W("b", ab)}, {W("a", ab), W("b", ab)}}}),
      domain_error);
  Alphabet const xy({"x", "y"});
  CHECK_THROWS_AS(GraphOfGroups({VertexGroup::free_abelian("Z", xy)},
                                {{"t", 2, 0, 0, {W("x", xy), W("x^2", xy)}, {W("x", xy), W("y", xy)}}}),
                  domain_error);
}

TEST_CASE("normal forms in <a,b,t | [[a,b],t]>") {
  auto const g = abelian_block();
  Alphabet const& a = g.alphabet();
  CHECK(word_problem(g, W("t t^-1", a)) == Verdict::trivial);
  CHECK(word_problem(g, W("t [a,b] t^-1 [a,b]^-1", a)) == Verdict::trivial);
  CHECK(word_problem(g, W("[[a,b],t]", a)) == Verdict::trivial);
  CHECK(word_problem(g, W("t a t^-1 a^-1", a)) == Verdict::nontrivial);
  CHECK(word_problem(g, W("[a,t]", a)) == Verdict::nontrivial);
  CHECK(word_problem(g, W("t^3 t^-3", a)) == Verdict::trivial);
  auto const nf = normal_form(g, W("t a t^-1 a^-1", a));
  CHECK_FALSE(has_pinch(g, nf));
  CHECK(nf.syllables.size() == nf.crossings.size() + 1);
}

TEST_CASE("free vertex word problem agrees with free reduction") {
  auto const g = one_vertex_free();
  for (auto const& w : enumerate_ball(ab, 6)) {
    CHECK((word_problem(g, w) == Verdict::trivial) == reduce(w).empty());
  }
}

TEST_CASE("genus-2 one-vertex graph decides the relator") {
  GraphOfGroups const g({VertexGroup::surface("S", SurfacePresentation::closed(2, {"a", "b", "c", "d"}))},
                        {});
  CHECK(word_problem(g, W("[a,b][c,d]", g.alphabet())) == Verdict::trivial);
  CHECK(word_problem(g, W("[a,b]", g.alphabet())) == Verdict::nontrivial);
}

TEST_CASE("normal forms never contain a pinch and agree with abelianization") {
  for (auto const& g : {genus2_double(), hnn_on_a(), abelian_block()}) {
    auto const p = fundamental_presentation(g);
    auto const n = p.alphabet.size();
    auto const chars = integer_characters(p);
    for (auto const& w : enumerate_ball(p.alphabet, 4)) {
      auto const nf = normal_form(g, w);
      CHECK(nf.verdict != Verdict::unknown);
      CHECK_FALSE(has_pinch(g, nf));
      if (nf.verdict == Verdict::trivial) {
        auto const v = abelianize(w, n);
        for (auto const& y : chars) {
          std::int64_t s = 0;
          for (std::size_t i = 0; i < n; ++i) {
            s += y[i] * v[i];
          }
          CHECK(s == 0);
        }
      }
    }
  }
}

TEST_CASE("subgroup membership in the exact vertex kinds") {
  auto const F = VertexGroup::free("F", ab);
  auto       m = subgroup_membership(F, {W("a^2", ab), W("b", ab)}, W("b", ab));
  REQUIRE(m.is_member());
  CHECK(format_word(m.expression, Alphabet({"s1", "s2"})) == "s2");
  CHECK(subgroup_membership(F, {W("a^2", ab), W("b", ab)}, W("[a,b]", ab)).is_nonmember());
  m = subgroup_membership(F, {W("a^2", ab), W("b", ab)}, W("b a^-2 b", ab));
  REQUIRE(m.is_member());
  CHECK(format_word(m.expression, Alphabet({"s1", "s2"})) == "s2 s1^-1 s2");

  Alphabet const xy({"x", "y"});
  auto const     Z = VertexGroup::free_abelian("Z", xy);
  CHECK(subgroup_membership(Z, {W("x^2", xy), W("y^2", xy)}, W("x y", xy)).is_nonmember());
  CHECK(subgroup_membership(Z, {W("x^2", xy), W("y^2", xy)}, W("x^2 y^-4", xy)).is_member());

  auto const S = VertexGroup::surface("S", SurfacePresentation::closed(2, {"a", "b", "c", "d"}));
  Alphabet const& sa = S.alphabet();
  CHECK(subgroup_membership(S, {W("[a,b]", sa)}, W("[c,d]^-1", sa)).is_member());
  CHECK(subgroup_membership(S, {W("a b", sa)}, W("a b a b", sa)).is_member());
  CHECK(subgroup_membership(S, {W("[a,b]", sa)}, W("a", sa)).is_nonmember());

  CHECK(subgroup_membership(F, {}, W("a", ab)).is_nonmember());
  CHECK(subgroup_membership(F, {}, Word{}).is_member());
}
