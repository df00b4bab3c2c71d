#pragma once

// Embedding a one-edge splitting of L into an enlarged tower: given a
// homomorphism nu from L into a tower, attach one block along the maximal
// abelian subgroup U that contains the image of the edge group and extend
// nu to a map j that is injective on the splitting.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rft/errors.hpp"
#include "rft/graph_of_groups.hpp"
#include "rft/tower.hpp"
#include "rft/words.hpp"

namespace rft {

  enum class SplittingCase { amalgam_rigid_rigid, hnn_rigid, abelian_vertex, qh_vertex };

  inline char const* to_string(SplittingCase c) {
    switch (c) {
      case SplittingCase::amalgam_rigid_rigid:
        return "amalgam";
      case SplittingCase::hnn_rigid:
        return "hnn";
      case SplittingCase::abelian_vertex:
        return "abelian";
      default:
        return "qh";
    }
  }

  // L as a graph of groups with exactly one edge.
  //   amalgam: edge A -> B between two rigid vertices
  //   hnn:     loop at A, stable letter named by the edge label
  //   abelian: one free abelian vertex A and one rigid vertex B
  //   qh:      one surface-with-boundary vertex A, its boundary glued to B
  struct SplittingData {
    SplittingCase kind;
    GraphOfGroups graph;

    std::size_t edge_count() const { return graph.edges().size(); }
  };

  // nu = i o rho : L -> L' -> Gamma'
  struct StrictQuotientData {
    GroupHom nu;

    static StrictQuotientData compose(GroupHom const& rho, GroupHom const& i) {
      return {rft::compose(i, rho)};
    }
  };

  struct RelatorCheck {
    Word    relator;  // over L
    Word    image;    // over Gamma
    Verdict verdict = Verdict::unknown;
  };

  struct EmbeddingResult {
    Tower                     gamma;
    GroupHom                  j;
    std::vector<Obligation>   obligations;
    std::vector<Word>         u_gens;  // generators of U in Gamma'
    std::string               u_kind;  // "cyclic" or "lattice"
    std::vector<RelatorCheck> relator_checks;
  };

  namespace detail {

    inline std::string fresh_letter(Alphabet const& a, std::string const& stem) {
      if (!a.contains(stem)) {
        return stem;
      }
      for (std::size_t i = 1;; ++i) {
        std::string n = stem + std::to_string(i);
        if (!a.contains(n)) {
          return n;
        }
      }
    }

    struct Roles {
      std::size_t a = 0, b = 0;  // vertex indices; b == a for hnn
    };

    inline Roles roles(SplittingData const& s) {
      auto const& g = s.graph;
      if (g.edges().size() != 1) {
        throw domain_error("a splitting needs exactly one edge");
      }
      auto const& e = g.edge(0);
      switch (s.kind) {
        case SplittingCase::amalgam_rigid_rigid:
          if (e.src == e.tgt) {
            throw domain_error("amalgam splitting needs an edge between two vertices");
          }
          return {e.src, e.tgt};
        case SplittingCase::hnn_rigid:
          if (e.src != e.tgt || g.vertices().size() != 1) {
            throw domain_error("HNN splitting needs one vertex with a loop edge");
          }
          return {e.src, e.src};
        case SplittingCase::abelian_vertex: {
          if (e.src == e.tgt) {
            throw domain_error("abelian-vertex splitting needs an edge between two vertices");
          }
          bool const src_ab = g.vertex(e.src).kind() == VertexKind::free_abelian;
          bool const tgt_ab = g.vertex(e.tgt).kind() == VertexKind::free_abelian;
          if (src_ab == tgt_ab) {
            throw domain_error("abelian-vertex splitting needs exactly one free abelian vertex");
          }
          return src_ab ? Roles{e.src, e.tgt} : Roles{e.tgt, e.src};
        }
        default: {
          if (e.src == e.tgt) {
            throw domain_error("QH splitting needs an edge between two vertices");
          }
          auto const is_qh = [&](std::size_t v) {
            auto const& vg = g.vertex(v);
            return vg.kind() == VertexKind::surface && !vg.surface_presentation()->is_closed();
          };
          if (is_qh(e.src) == is_qh(e.tgt)) {
            throw domain_error("QH splitting needs exactly one surface-with-boundary vertex");
          }
          return is_qh(e.src) ? Roles{e.src, e.tgt} : Roles{e.tgt, e.src};
        }
      }
    }

    // Edge image on the side of vertex v, as a word of L.
    inline std::vector<Word> edge_side(GraphOfGroups const& g, std::size_t v, bool first = true) {
      auto const& e    = g.edge(0);
      int const   side = (e.src == v && first) || (e.src == v && e.tgt != v) ? 0 : 1;
      std::vector<Word> out;
      for (auto const& w : e.images(side)) {
        out.push_back(g.to_global(e.endpoint(side), w));
      }
      return out;
    }

    inline std::vector<std::size_t> vertex_generators(GraphOfGroups const& g, std::size_t v) {
      std::vector<std::size_t> out;
      for (std::size_t i = 0; i < g.vertex(v).alphabet().size(); ++i) {
        if (auto gg = g.global_generator(v, i)) {
          out.push_back(*gg);
        }
      }
      return out;
    }

    inline Obligation::Status verdict_status(Verdict v, Verdict good) {
      if (v == good) {
        return Obligation::Status::verified;
      }
      return v == Verdict::unknown ? Obligation::Status::budget_limited : Obligation::Status::refuted;
    }

  }  // namespace detail

  // The maximal abelian subgroup of Gamma' containing x: a lattice that
  // contains x, else the cyclic subgroup generated by the root of x.
  inline std::pair<std::vector<Word>, std::string> maximal_abelian_containing(
      Tower const& t, Word const& x, std::size_t budget) {
    for (auto const& lat : t.top().lattices()) {
      auto const& g = t.top().graph();
      Membership  m;
      if (g.vertices().size() == 1 && g.vertex(0).kind() == VertexKind::free_abelian) {
        m = g.vertex(0).membership(lat.gens, x, budget, true);
      } else {
        m = t.top().abelian_membership(lat.gens, x, budget);
      }
      if (m.is_member()) {
        return {lat.gens, "lattice"};
      }
    }
    return {{primitive_root(x).root}, "cyclic"};
  }

  inline EmbeddingResult embed_step(SplittingData const& s, StrictQuotientData const& d,
                                    Tower const& gamma_prime,
                                    std::size_t  budget = GraphOfGroups::default_budget,
                                    AttachPolicy policy = AttachPolicy::strict) {
    auto const&    L     = s.graph;
    auto const     roles = detail::roles(s);
    GroupHom const nu    = d.nu;
    if (!(nu.source() == L.alphabet()) || !(nu.target() == gamma_prime.alphabet())) {
      throw alphabet_error("nu must map the alphabet of L to the alphabet of the target tower");
    }
    EmbeddingResult r{gamma_prime, nu, {}, {}, {}, {}};
    auto const      lp = L.fundamental_presentation();
    for (auto const& rel : lp.relators) {
      Verdict const v = gamma_prime.top().word_problem(nu(rel), budget);
      if (v == Verdict::nontrivial) {
        throw domain_error("nu is not a homomorphism: relator '" + format_word(rel, L.alphabet())
                           + "' has a nontrivial image");
      }
      if (v == Verdict::unknown) {
        if (policy == AttachPolicy::strict) {
          throw obligation_error("nu-homomorphism", "relator image undecided within budget");
        }
        r.obligations.push_back({gamma_prime.height() + 1, "nu-homomorphism",
                                 Obligation::Status::budget_limited,
                                 "relator '" + format_word(rel, L.alphabet()) + "' image undecided"});
      }
    }

    auto const&        e     = L.edge(0);
    Alphabet const&    ga    = gamma_prime.alphabet();
    std::vector<Word>  j_img = nu.images();
    std::string const  t     = detail::fresh_letter(ga, "t");
    std::size_t const  t_index = ga.size();

    auto attach_over_u = [&](Word const& x, std::size_t extra_letters,
                             std::vector<std::string> const& letters, bool torus) {
      auto [u, kind] = maximal_abelian_containing(gamma_prime, x, budget);
      r.u_gens       = u;
      r.u_kind       = kind;
      Block block;
      if (kind == "cyclic" && !torus) {
        block = Block{AbelianBlock{u.front(), 2, letters}, policy};
      } else {
        block = Block{TorusBlock{u, u.size() + extra_letters, letters}, policy};
      }
      r.gamma = gamma_prime.attach(block, budget);
    };

    switch (s.kind) {
      case SplittingCase::amalgam_rigid_rigid:
      case SplittingCase::hnn_rigid: {
        if (e.rank != 1) {
          throw domain_error("rigid splittings are supported along cyclic edge groups only");
        }
        Word const x = reduce(nu(detail::edge_side(L, roles.a).front()));
        if (gamma_prime.top().word_problem(x, budget) != Verdict::nontrivial) {
          throw obligation_error("edge-injective", "the edge group image is not certified nontrivial");
        }
        attach_over_u(x, 1, {t}, false);
        Word const tw{letter(t_index)};
        if (s.kind == SplittingCase::amalgam_rigid_rigid) {
          for (auto g : detail::vertex_generators(L, roles.b)) {
            j_img[g] = conjugate(tw, nu.image(g));
          }
        } else {
          std::size_t const sl = *L.stable_letter(0);
          j_img[sl]            = tw * nu.image(sl);
        }
        break;
      }
      case SplittingCase::abelian_vertex: {
        auto const&       av = L.vertex(roles.a);
        std::size_t const n  = av.alphabet().size();
        if (e.rank != 1) {
          throw domain_error("abelian-vertex splittings are supported along cyclic edge groups only");
        }
        if (n < 2) {
          throw domain_error("abelian vertex needs rank >= 2");
        }
        int const  side_a = e.src == roles.a ? 0 : 1;
        auto const v      = abelianize(e.images(side_a).front(), av.alphabet());
        auto const ech    = lattice::column_echelon({v}, n);
        if (ech.rank != 1 || std::llabs(ech.h[0][0]) != 1) {
          throw domain_error("edge image in the abelian vertex is not primitive");
        }
        Word const x = reduce(nu(L.to_global(e.endpoint(1 - side_a), e.images(1 - side_a).front())));
        if (gamma_prime.top().word_problem(x, budget) != Verdict::nontrivial) {
          throw obligation_error("edge-injective", "the edge group image is not certified nontrivial");
        }
        std::vector<std::string> letters;
        Alphabet                 grown = ga;
        for (std::size_t i = 1; i < n; ++i) {
          letters.push_back(detail::fresh_letter(grown, "s"));
          grown.add(letters.back());
        }
        attach_over_u(x, n - 1, letters, true);
        // A-generator i = sum_j u[i][j] Q_j with Q_0 = g v and Q_j -> s_j
        std::int64_t const g = ech.h[0][0];
        for (std::size_t i = 0; i < n; ++i) {
          Word img = power(x, g * ech.u[i][0]);
          for (std::size_t jj = 1; jj < n; ++jj) {
            img.append(power(Word{letter(t_index + jj - 1)}, ech.u[i][jj]));
          }
          if (auto gg = L.global_generator(roles.a, i)) {
            j_img[*gg] = reduce(img);
          }
        }
        break;
      }
      case SplittingCase::qh_vertex: {
        auto const& sv = L.vertex(roles.a);
        auto const& S  = *sv.surface_presentation();
        if (S.punctures() != 1) {
          throw domain_error("QH splittings are supported for surfaces with one boundary component");
        }
        int const   side_a = e.src == roles.a ? 0 : 1;
        Word const  key    = e.images(side_a).front();
        Word const  x      = reduce(nu(L.to_global(e.endpoint(1 - side_a), e.images(1 - side_a).front())));
        // renamed copy of the surface
        std::vector<std::string> names;
        Alphabet                 grown = ga;
        for (auto const& n : S.alphabet().names()) {
          names.push_back(detail::fresh_letter(grown, n + "_q"));
          grown.add(names.back());
        }
        auto const     copy = SurfacePresentation::bounded(S.genus(), 1, names);
        QuadraticBlock q;
        q.surface = copy;
        q.boundary = {{key, x}};
        for (std::size_t i = 0; i < S.alphabet().size(); ++i) {
          q.retraction.push_back(nu.image(*L.global_generator(roles.a, i)));
        }
        r.u_gens = {x};
        r.u_kind = "boundary";
        r.gamma  = gamma_prime.attach({q, policy}, budget);
        for (std::size_t i = 0; i < S.alphabet().size(); ++i) {
          j_img[*L.global_generator(roles.a, i)] = Word{letter(r.gamma.alphabet().index(names[i]))};
        }
        break;
      }
    }

    r.j = GroupHom(L.alphabet(), r.gamma.alphabet(), j_img);
    for (auto const& o : r.gamma.ledger()) {
      if (o.stage == r.gamma.height()) {
        r.obligations.push_back(o);
      }
    }
    for (auto const& rel : lp.relators) {
      Word const    img = r.j(rel);
      Verdict const v   = tower_word_problem(r.gamma, img, budget);
      if (v == Verdict::nontrivial) {
        throw domain_error("j is not a homomorphism on relator '" + format_word(rel, L.alphabet()) + "'");
      }
      r.relator_checks.push_back({rel, img, v});
      if (v == Verdict::unknown) {
        r.obligations.push_back({r.gamma.height(), "j-homomorphism", Obligation::Status::budget_limited,
                                 "relator '" + format_word(rel, L.alphabet()) + "' image undecided"});
      }
    }
    return r;
  }

  ////////////////////////////////////////////////////////////////////////
  // Strict-quotient validation
  ////////////////////////////////////////////////////////////////////////

  struct QuotientCheck {
    std::string        bullet;
    Obligation::Status status = Obligation::Status::verified;
    std::string        detail;
    std::optional<Word> witness;  // over L
  };

  namespace detail {

    // Is the cyclic subgroup of w maximal abelian in the vertex group?
    inline std::optional<bool> maximal_in_vertex(VertexGroup const& vg, Word const& w) {
      auto const ab = abelianize(w, vg.alphabet());
      switch (vg.kind()) {
        case VertexKind::free:
          return !is_proper_power(w).has_value();
        case VertexKind::free_abelian:
          return vg.alphabet().size() == 1 && std::llabs(content(ab)) == 1;
        case VertexKind::surface:
          if (!vg.surface_presentation()->is_closed()) {
            return !is_proper_power(w).has_value();
          }
          if (std::llabs(content(ab)) == 1) {
            return true;
          }
          return std::nullopt;
        default:
          return std::nullopt;
      }
    }

    // Generators of the centralizer of an edge image where it is exact.
    inline std::optional<std::vector<Word>> centralizer(VertexGroup const& vg, Word const& w) {
      if (vg.is_free_locus()) {
        return std::vector<Word>{primitive_root(w).root};
      }
      if (vg.kind() == VertexKind::free_abelian) {
        std::vector<Word> out;
        for (std::size_t i = 0; i < vg.alphabet().size(); ++i) {
          out.push_back(Word{letter(i)});
        }
        return out;
      }
      return std::nullopt;
    }

  }  // namespace detail

  inline std::vector<QuotientCheck> validate_strict_quotient(
      SplittingData const& s, StrictQuotientData const& d, Tower const& gamma_prime,
      std::size_t ball_radius, std::size_t budget = GraphOfGroups::default_budget) {
    using St            = Obligation::Status;
    auto const&   L     = s.graph;
    auto const    roles = detail::roles(s);
    auto const&   e     = L.edge(0);
    auto const&   top   = gamma_prime.top();
    GroupHom const& nu  = d.nu;
    std::vector<QuotientCheck> out;

    // injective on the edge group
    {
      QuotientCheck c{"edge-injective", St::verified, {}, {}};
      c.status = St::verified;
      for (std::size_t i = 0; i < e.rank; ++i) {
        Word const ew = L.to_global(e.src, e.src_images[i]);
        Verdict    v  = top.word_problem(nu(ew), budget);
        if (v == Verdict::trivial) {
          c.status  = St::refuted;
          c.witness = ew;
          c.detail  = "edge generator '" + format_word(ew, L.alphabet()) + "' is killed";
          break;
        }
        if (v == Verdict::unknown) {
          c.status = St::budget_limited;
        }
      }
      if (c.status == St::verified && e.rank >= 2) {
        std::vector<Word> imgs;
        for (auto const& w : e.src_images) {
          imgs.push_back(nu(L.to_global(e.src, w)));
        }
        if (top.certified_rank(imgs) != e.rank) {
          c.status = St::budget_limited;
          c.detail = "image rank not certified";
        }
      }
      if (c.detail.empty()) {
        c.detail = c.status == St::verified ? "edge image nontrivial in a torsion-free group"
                                            : "edge image undecided within budget";
      }
      out.push_back(std::move(c));
    }

    // maximality of an edge image in one of L's vertex groups
    {
      QuotientCheck c{"edge-maximal", St::verified, {}, {}};
      bool          any_unknown = false, any_true = false;
      std::string   where;
      if (e.rank == 1) {
        for (int side = 0; side < 2 && !any_true; ++side) {
          auto const& vg = L.vertex(e.endpoint(side));
          auto const  m  = detail::maximal_in_vertex(vg, e.images(side).front());
          any_true       = m.value_or(false);
          any_unknown    = any_unknown || !m;
          where          = vg.label();
        }
      } else {
        for (int side = 0; side < 2 && !any_true; ++side) {
          auto const& vg = L.vertex(e.endpoint(side));
          any_true       = vg.kind() == VertexKind::free_abelian && e.rank == vg.alphabet().size();
          where          = vg.label();
        }
      }
      c.status = any_true ? St::verified : (any_unknown ? St::budget_limited : St::refuted);
      c.detail = any_true ? "edge image is maximal abelian in " + where
                          : "no edge image certified maximal abelian";
      if (c.status == St::refuted) {
        c.witness = L.to_global(e.src, e.src_images.front());
      }
      out.push_back(std::move(c));
    }

    // QH image non-abelian
    if (s.kind == SplittingCase::qh_vertex) {
      QuotientCheck c{"qh-nonabelian", St::verified, {}, {}};
      auto const    gens = detail::vertex_generators(L, roles.a);
      bool          undecided = false;
      c.status              = St::refuted;
      for (std::size_t i = 0; i < gens.size() && c.status != St::verified; ++i) {
        for (std::size_t k = i + 1; k < gens.size(); ++k) {
          Word const com = commutator(Word{letter(gens[i])}, Word{letter(gens[k])});
          Verdict    v   = top.word_problem(nu(com), budget);
          if (v == Verdict::nontrivial) {
            c.status = St::verified;
            c.detail = "image of '" + format_word(com, L.alphabet()) + "' is nontrivial";
            break;
          }
          if (v == Verdict::unknown) {
            undecided = true;
          } else if (!c.witness) {
            c.witness = com;
          }
        }
      }
      if (c.status != St::verified) {
        c.status = undecided ? St::budget_limited : St::refuted;
        c.detail = undecided ? "no nontrivial commutator certified"
                             : "all generator commutators map to the identity";
      }
      out.push_back(std::move(c));
    }

    // injective on the abelian vertex group
    if (s.kind == SplittingCase::abelian_vertex) {
      QuotientCheck     c{"abelian-injective", St::verified, {}, {}};
      std::vector<Word> imgs;
      for (auto g : detail::vertex_generators(L, roles.a)) {
        imgs.push_back(nu(Word{letter(g)}));
      }
      std::size_t const n = L.vertex(roles.a).alphabet().size();
      std::size_t const k = top.certified_rank(imgs);
      c.status = k == n ? St::verified : St::budget_limited;
      c.detail = "image rank certified " + std::to_string(k) + " of " + std::to_string(n);
      out.push_back(std::move(c));
    }

    // injective on the envelope of each rigid vertex: the vertex group
    // together with the centralizers of its incident edge images
    std::vector<std::size_t> rigid;
    if (s.kind == SplittingCase::amalgam_rigid_rigid) {
      rigid = {roles.a, roles.b};
    } else if (s.kind == SplittingCase::hnn_rigid) {
      rigid = {roles.a};
    } else {
      rigid = {roles.b};
    }
    for (auto v : rigid) {
      QuotientCheck     c{"envelope-injective", St::verified, {}, {}};
      std::vector<Word> env;
      bool              exact = true;
      for (auto g : detail::vertex_generators(L, v)) {
        env.push_back(Word{letter(g)});
      }
      for (int side = 0; side < 2; ++side) {
        if (e.endpoint(side) != v) {
          continue;
        }
        for (auto const& w : e.images(side)) {
          if (auto cz = detail::centralizer(L.vertex(v), w)) {
            for (auto const& z : *cz) {
              env.push_back(L.to_global(v, z));
            }
          } else {
            exact = false;
          }
        }
      }
      std::size_t checked = 0, undecided = 0;
      for (auto const& f : enumerate_ball(env.size(), ball_radius)) {
        Word w;
        for (Letter l : f) {
          w.append(l > 0 ? env[generator_of(l)] : inverse(env[generator_of(l)]));
        }
        w = reduce(w);
        if (L.word_problem(w, budget) != Verdict::nontrivial) {
          continue;
        }
        ++checked;
        Verdict const verdict = top.word_problem(nu(w), budget);
        if (verdict == Verdict::trivial) {
          c.status  = St::refuted;
          c.witness = w;
          break;
        }
        undecided += verdict == Verdict::unknown;
      }
      if (c.status == St::verified && (undecided > 0 || !exact)) {
        c.status = St::budget_limited;
      }
      std::string const at = " at vertex " + L.vertex(v).label();
      c.detail = c.status == St::refuted
                     ? "kernel element in the envelope ball" + at
                     : std::to_string(checked) + " nontrivial envelope elements checked" + at
                           + " at radius " + std::to_string(ball_radius) + ", "
                           + std::to_string(undecided) + " undecided"
                           + (exact ? "" : ", centralizers not exact");
      out.push_back(std::move(c));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Injectivity on balls
  ////////////////////////////////////////////////////////////////////////

  struct BallEvidence {
    Word    word;   // over L
    Word    image;  // over Gamma
    Verdict source = Verdict::unknown;
    Verdict target = Verdict::unknown;
  };

  struct InjectivityCertificate {
    enum class Status { full, partial, refuted };

    Status                    status = Status::full;
    std::size_t               radius = 0;
    std::size_t               checked = 0, unknowns = 0, refutations = 0;
    std::vector<BallEvidence> evidence;  // nontrivial elements of the ball
    std::optional<Word>       kernel_element;
  };

  inline char const* to_string(InjectivityCertificate::Status s) {
    switch (s) {
      case InjectivityCertificate::Status::full:
        return "full";
      case InjectivityCertificate::Status::partial:
        return "partial";
      default:
        return "refuted";
    }
  }

  inline InjectivityCertificate certify_injectivity_on_ball(
      EmbeddingResult const& r, GraphOfGroups const& L, std::size_t radius,
      std::size_t budget = GraphOfGroups::default_budget) {
    InjectivityCertificate c;
    c.radius = radius;
    for (auto const& w : enumerate_ball(L.alphabet(), radius)) {
      BallEvidence ev{w, r.j(w), L.word_problem(w, budget), Verdict::unknown};
      if (ev.source == Verdict::trivial) {
        continue;
      }
      if (ev.source == Verdict::nontrivial) {
        ev.target = tower_word_problem(r.gamma, ev.image, budget);
        ++c.checked;
        if (ev.target == Verdict::trivial) {
          ++c.refutations;
          if (!c.kernel_element) {
            c.kernel_element = w;
          }
        }
      }
      if (ev.source == Verdict::unknown || ev.target == Verdict::unknown) {
        ++c.unknowns;
      }
      c.evidence.push_back(std::move(ev));
    }
    c.status = c.refutations ? InjectivityCertificate::Status::refuted
               : c.unknowns  ? InjectivityCertificate::Status::partial
                             : InjectivityCertificate::Status::full;
    return c;
  }

}  // namespace rft
