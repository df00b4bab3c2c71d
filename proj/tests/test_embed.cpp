#include <catch_amalgamated.hpp>

#include "rft/embed.hpp"

using namespace rft;

namespace {

  Alphabet const ab({"a", "b"});
  Alphabet const cd({"c", "d"});

  Word W(std::string const& s, Alphabet const& a) { return parse_word(s, a); }

  Tower free_ab() { return Tower::height0({Summand::free({"a", "b"})}); }

  GroupHom hom(Alphabet const& src, Alphabet const& tgt, std::vector<std::string> const& imgs) {
    std::vector<Word> ws;
    for (auto const& s : imgs) {
      ws.push_back(W(s, tgt));
    }
    return GroupHom(src, tgt, ws);
  }

  SplittingData genus2_double() {
    return {SplittingCase::amalgam_rigid_rigid,
            GraphOfGroups({VertexGroup::free("A", ab), VertexGroup::free("B", cd)},
                          {{"e", 1, 0, 1, {W("[a,b]", ab)}, {W("[c,d]", cd)}}})};
  }

  SplittingData hnn_square() {
    return {SplittingCase::hnn_rigid,
            GraphOfGroups({VertexGroup::free("A", ab)}, {{"s", 1, 0, 0, {W("a^2", ab)}, {W("a^2", ab)}}})};
  }

  SplittingData abelian_split() {
    Alphabet const xy({"x", "y"});
    return {SplittingCase::abelian_vertex,
            GraphOfGroups({VertexGroup::free("B", ab), VertexGroup::free_abelian("A", xy)},
                          {{"e", 1, 0, 1, {W("[a,b]", ab)}, {W("x", xy)}}})};
  }

  SplittingData qh_split() {
    auto const S = SurfacePresentation::bounded(1, 1, {"x", "y"});
    return {SplittingCase::qh_vertex,
            GraphOfGroups({VertexGroup::free("B", ab), VertexGroup::surface("A", S)},
                          {{"e", 1, 1, 0, {W("[x,y]", S.alphabet())}, {W("[a,b]", ab)}}})};
  }

  void require_relators_trivial(EmbeddingResult const& r) {
    REQUIRE_FALSE(r.relator_checks.empty());
    for (auto const& c : r.relator_checks) {
      CHECK(c.verdict == Verdict::trivial);
    }
  }

}  // namespace

TEST_CASE("amalgam of two rigid vertices embeds over the cyclic centralizer") {
  auto const s  = genus2_double();
  auto const g  = free_ab();
  auto const nu = hom(s.graph.alphabet(), g.alphabet(), {"a", "b", "a", "b"});
  auto const r  = embed_step(s, {nu}, g);
  CHECK(r.u_kind == "cyclic");
  CHECK(r.u_gens == std::vector<Word>{W("[a,b]", ab)});
  CHECK(r.gamma.height() == 1);
  CHECK(format_presentation(r.gamma.presentation()) == "<a,b,t | a b a^-1 b^-1 t b a b^-1 a^-1 t^-1>");
  CHECK(format_word(r.j.image(2), r.gamma.alphabet()) == "t a t^-1");
  CHECK(format_word(r.j.image(3), r.gamma.alphabet()) == "t b t^-1");
  require_relators_trivial(r);

  auto const c = certify_injectivity_on_ball(r, s.graph, 3);
  CHECK(c.status == InjectivityCertificate::Status::full);
  CHECK(c.checked == c.evidence.size());
  CHECK(c.checked > 0);
}

TEST_CASE("a corrupted extension is refuted on the ball") {
  auto const s  = genus2_double();
  auto const g  = free_ab();
  auto const nu = hom(s.graph.alphabet(), g.alphabet(), {"a", "b", "a", "b"});
  auto       r  = embed_step(s, {nu}, g);
  auto       imgs = r.j.images();
  imgs[2]         = W("a", r.gamma.alphabet());
  r.j             = GroupHom(r.j.source(), r.j.target(), imgs);
  auto const c    = certify_injectivity_on_ball(r, s.graph, 2);
  CHECK(c.status == InjectivityCertificate::Status::refuted);
  REQUIRE(c.kernel_element);
  CHECK(format_word(*c.kernel_element, s.graph.alphabet()) == "a c^-1");
  CHECK(tower_word_problem(r.gamma, r.j(*c.kernel_element)) == Verdict::trivial);
}

TEST_CASE("HNN splitting sends the stable letter to t nu(s)") {
  auto const s  = hnn_square();
  auto const g  = free_ab();
  auto const nu = hom(s.graph.alphabet(), g.alphabet(), {"a", "b", "a"});
  auto const r  = embed_step(s, {nu}, g);
  CHECK(r.u_gens == std::vector<Word>{W("a", ab)});
  CHECK(format_presentation(r.gamma.presentation()) == "<a,b,t | a t a^-1 t^-1>");
  CHECK(format_word(r.j.image(2), r.gamma.alphabet()) == "t a");
  require_relators_trivial(r);
  CHECK(certify_injectivity_on_ball(r, s.graph, 3).status == InjectivityCertificate::Status::full);
}

TEST_CASE("abelian vertex maps onto a new torus block") {
  auto const s  = abelian_split();
  auto const g  = free_ab();
  auto const nu = hom(s.graph.alphabet(), g.alphabet(), {"a", "b", "[a,b]", "[a,b]^2"});
  auto const r  = embed_step(s, {nu}, g);
  CHECK(r.gamma.top().block()->kind() == BlockKind::torus);
  CHECK(r.gamma.flat_records() == 1);
  auto const& ga = r.gamma.alphabet();
  CHECK(r.j.image(2) == W("[a,b]", ga));
  CHECK(r.j.image(3) == W("s", ga));
  require_relators_trivial(r);
  CHECK(certify_injectivity_on_ball(r, s.graph, 3).status == InjectivityCertificate::Status::full);
}

TEST_CASE("QH vertex is copied into a quadratic block") {
  auto const s  = qh_split();
  auto const g  = free_ab();
  auto const nu = hom(s.graph.alphabet(), g.alphabet(), {"a", "b", "a", "b"});
  auto const r  = embed_step(s, {nu}, g);
  CHECK(r.gamma.top().block()->kind() == BlockKind::quadratic);
  CHECK(format_presentation(r.gamma.presentation())
        == "<a,b,x_q,y_q | x_q y_q x_q^-1 y_q^-1 b a b^-1 a^-1>");
  require_relators_trivial(r);
  CHECK(certify_injectivity_on_ball(r, s.graph, 3).status == InjectivityCertificate::Status::full);
}

TEST_CASE("a non-homomorphism nu is rejected") {
  auto const s  = genus2_double();
  auto const g  = free_ab();
  auto const nu = hom(s.graph.alphabet(), g.alphabet(), {"a", "b", "b", "a b"});
  CHECK_THROWS_AS(embed_step(s, {nu}, g), domain_error);
}

TEST_CASE("strict quotient validation") {
  auto const s = genus2_double();
  auto const g = free_ab();
  auto const good = validate_strict_quotient(s, {hom(s.graph.alphabet(), g.alphabet(), {"a", "b", "a", "b"})}, g, 2);
  for (auto const& c : good) {
    INFO(c.bullet << ": " << c.detail);
    CHECK(c.status == Obligation::Status::verified);
  }
  auto const bad = validate_strict_quotient(s, {hom(s.graph.alphabet(), g.alphabet(), {"a", "a", "a", "a"})}, g, 2);
  CHECK(bad.front().bullet == "edge-injective");
  CHECK(bad.front().status == Obligation::Status::refuted);

  auto const h = hnn_square();
  auto const hv = validate_strict_quotient(h, {hom(h.graph.alphabet(), g.alphabet(), {"a", "b", "a"})}, g, 2);
  CHECK(hv[1].bullet == "edge-maximal");
  CHECK(hv[1].status == Obligation::Status::refuted);

  auto const q  = qh_split();
  auto const qv = validate_strict_quotient(q, {hom(q.graph.alphabet(), g.alphabet(), {"a", "b", "a", "b"})}, g, 2);
  CHECK(qv[2].bullet == "qh-nonabelian");
  CHECK(qv[2].status == Obligation::Status::verified);
}

TEST_CASE("validation flags a kernel element in the envelope") {
  auto const s  = abelian_split();
  auto const g  = free_ab();
  auto const v  = validate_strict_quotient(
      s, {hom(s.graph.alphabet(), g.alphabet(), {"a", "b", "[a,b]", "[a,b]^2"})}, g, 2);
  CHECK(v[2].bullet == "abelian-injective");
  CHECK(v[2].status != Obligation::Status::verified);
}
