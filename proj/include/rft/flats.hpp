#pragma once

// Flat bookkeeping for towers: the inventory of torus lattices, the G/B
// coloring of a core, the isolation hypotheses (0)-(2) reduced to word
// problems and root checks, and symbolic isolation bounds.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rft/core.hpp"
#include "rft/errors.hpp"
#include "rft/tower.hpp"
#include "rft/words.hpp"

namespace rft {

  ////////////////////////////////////////////////////////////////////////
  // Flat inventory
  ////////////////////////////////////////////////////////////////////////

  struct FlatClass {
    std::size_t       rank = 0;
    std::vector<Word> gens;  // over the tower alphabet
    std::size_t       stage = 0;  // stage of the originating block or summand
    std::string       origin;
    Word              representative;  // first lattice generator
    bool              commute_verified = false;
    std::size_t       certified_rank   = 0;  // rank seen by the probe homomorphisms
  };

  inline std::vector<FlatClass> flat_inventory(Tower const& t,
                                               std::size_t budget = GraphOfGroups::default_budget) {
    std::vector<FlatClass> out;
    for (auto const& lat : t.top().lattices()) {
      FlatClass f;
      f.rank           = lat.gens.size();
      f.gens           = lat.gens;
      f.stage          = lat.stage;
      f.origin         = lat.origin;
      f.representative = lat.gens.front();
      f.commute_verified = true;
      for (std::size_t i = 0; i < f.gens.size(); ++i) {
        for (std::size_t j = i + 1; j < f.gens.size(); ++j) {
          f.commute_verified = f.commute_verified
                               && tower_word_problem(t, commutator(f.gens[i], f.gens[j]), budget)
                                      == Verdict::trivial;
        }
      }
      f.certified_rank = t.top().certified_rank(f.gens);
      out.push_back(std::move(f));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Coloring
  ////////////////////////////////////////////////////////////////////////

  enum class VertexType { m_type, n_type };
  enum class VertexColor { good, bad };

  inline char const* to_string(VertexType t) { return t == VertexType::m_type ? "M" : "N"; }
  inline char const* to_string(VertexColor c) { return c == VertexColor::good ? "G" : "B"; }

  struct ColoredVertex {
    std::size_t       base_vertex = 0;
    VertexType        type  = VertexType::m_type;
    VertexColor       color = VertexColor::good;
    Word              conjugator;  // global root-to-vertex word
    std::vector<Word> subgroup;    // local words
  };

  struct ColoredEdge {
    std::size_t from = 0, to = 0;  // vertex positions
    std::string label;
    std::size_t rank = 0;  // rank of the base edge group
  };

  // One end of a core edge with its edge-group generators.
  struct ColoredIncidence {
    std::size_t       vertex = 0;
    std::size_t       edge   = 0;
    std::vector<Word> local;   // u K_j u^-1 in the vertex group
    std::vector<Word> global;  // conjugated into the base alphabet
    Word              outward;  // u
    std::size_t       base_edge = 0;
    int               side      = 0;
  };

  struct ColoredCore {
    BlockKind                            top = BlockKind::abelian;
    std::shared_ptr<GraphOfGroups const> base;
    std::vector<ColoredVertex>           vertices;
    std::vector<ColoredEdge>             edges;
    std::vector<ColoredIncidence>        incidences;
  };

  // Top quadratic block: N-type vertices are G; otherwise M-type are G.
  inline VertexColor color_rule(BlockKind top, VertexType type) {
    bool const n_good = top == BlockKind::quadratic;
    return (type == VertexType::n_type) == n_good ? VertexColor::good : VertexColor::bad;
  }

  inline ColoredCore color_vertices(CoreReport const& r, BlockKind top) {
    auto const& c = r.cover;
    auto const& g = c.base();
    if (g.vertices().size() < 2 || g.edges().empty()) {
      throw domain_error("a height-0 tower has no top decomposition; use the free-product base case");
    }
    ColoredCore out;
    out.top  = top;
    out.base = c.base_ptr();
    for (std::size_t i = 0; i < r.vertices.size(); ++i) {
      auto const&      cv = c.vertices()[r.vertices[i]];
      VertexType const t  = cv.base_vertex == 0 ? VertexType::m_type : VertexType::n_type;
      out.vertices.push_back({cv.base_vertex, t, color_rule(top, t), r.tree_words[i], cv.subgroup});
    }
    for (std::size_t k = 0; k < r.edges.size(); ++k) {
      auto const& ce = r.edges[k];
      auto const& ed = g.edge(c.edges()[ce.id].base_edge);
      out.edges.push_back({ce.from, ce.to, ce.base_edge, ed.rank});
      for (int side = 0; side < 2; ++side) {
        ColoredIncidence inc;
        inc.vertex    = side == 0 ? ce.from : ce.to;
        inc.edge      = k;
        inc.outward   = c.outward({ce.id, side});
        inc.base_edge = c.edges()[ce.id].base_edge;
        inc.side      = side;
        std::size_t const v = out.vertices[inc.vertex].base_vertex;
        for (auto const& kw : ed.images(side)) {
          inc.local.push_back(conjugate(inc.outward, kw));
          inc.global.push_back(conjugate(out.vertices[inc.vertex].conjugator, g.to_global(v, inc.local.back())));
        }
        out.incidences.push_back(std::move(inc));
      }
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Isolation hypotheses
  ////////////////////////////////////////////////////////////////////////

  enum class HypothesisStatus { verified, verified_to_budget, refuted, budget_limited, not_applicable };

  inline char const* to_string(HypothesisStatus s) {
    switch (s) {
      case HypothesisStatus::verified:
        return "verified";
      case HypothesisStatus::verified_to_budget:
        return "verified-to-budget";
      case HypothesisStatus::refuted:
        return "refuted";
      case HypothesisStatus::budget_limited:
        return "budget-limited";
      default:
        return "not-applicable";
    }
  }

  struct PairCheck {
    std::size_t                                       vertex = 0;
    Word                                              u, v;  // over the tower alphabet
    HypothesisStatus                                  status = HypothesisStatus::verified_to_budget;
    std::optional<std::pair<std::int64_t, std::int64_t>> powers;  // u^k = v^l
    std::optional<bool>                               roots_equal;
    std::string                                       detail;
  };

  struct HypothesisResult {
    std::string            name;
    HypothesisStatus       status = HypothesisStatus::verified;
    std::string            detail;
    std::vector<PairCheck> pairs;
    std::size_t            budget = 0;
  };

  struct IsolationReport {
    HypothesisResult h0, h1, h2;
  };

  namespace detail {

    // Least k, l with 1 <= k <= budget, 1 <= |l| <= budget and u^k = v^l.
    inline std::optional<std::pair<std::int64_t, std::int64_t>> power_coincidence(
        Tower const& t, Word const& u, Word const& v, std::size_t budget, std::size_t wp_budget) {
      auto const b = static_cast<std::int64_t>(budget);
      for (std::int64_t k = 1; k <= b; ++k) {
        for (std::int64_t m = 1; m <= b; ++m) {
          for (std::int64_t l : {m, -m}) {
            if (tower_word_problem(t, power(u, k) * inverse(power(v, l)), wp_budget) == Verdict::trivial) {
              return std::pair(k, l);
            }
          }
        }
      }
      return std::nullopt;
    }

    inline bool same_root(Word const& x, Word const& y) {
      if (reduce(x).empty() || reduce(y).empty()) {
        return false;
      }
      Word const rx = primitive_root(reduce(x)).root;
      Word const ry = primitive_root(reduce(y)).root;
      return rx == ry || rx == inverse(ry);
    }

    // Is w conjugate into <r> in a free group?
    inline bool conjugate_into_cyclic_free(Word const& w, Word const& r) {
      if (reduce(w).empty()) {
        return true;
      }
      if (reduce(r).empty()) {
        return false;
      }
      Word const rw = primitive_root(reduce(w)).root;
      Word const rr = primitive_root(reduce(r)).root;
      return free_conjugator(rw, rr).has_value() || free_conjugator(rw, inverse(rr)).has_value();
    }

  }  // namespace detail

  inline IsolationReport check_isolation_hypotheses(ColoredCore const& c, Tower const& t,
                                                    std::size_t power_budget = 8,
                                                    std::size_t budget = GraphOfGroups::default_budget) {
    if (t.height() == 0) {
      throw domain_error("isolation hypotheses need a tower of height >= 1");
    }
    if (t.top().block()->kind() != c.top) {
      throw domain_error("core coloring does not match the tower's top block");
    }
    IsolationReport rep;
    auto const&     g = *c.base;

    // (0)
    rep.h0.name   = "incident-to-good-vertex";
    rep.h0.status = HypothesisStatus::verified;
    std::size_t checked0 = 0;
    for (std::size_t k = 0; k < c.edges.size(); ++k) {
      auto const& e = c.edges[k];
      if (e.rank == 0) {
        continue;
      }
      ++checked0;
      if (c.vertices[e.from].color == VertexColor::bad && c.vertices[e.to].color == VertexColor::bad) {
        rep.h0.status = HypothesisStatus::refuted;
        rep.h0.detail = "edge " + std::to_string(k) + " joins two B vertices";
        break;
      }
    }
    if (rep.h0.status == HypothesisStatus::verified) {
      rep.h0.detail = std::to_string(checked0) + " edges with nontrivial edge groups touch a G vertex";
    }

    // (1)
    rep.h1.name   = "edge-spaces-not-parallel";
    rep.h1.budget = power_budget;
    bool any_refuted = false, all_exact = true;
    for (std::size_t x = 0; x < c.vertices.size(); ++x) {
      auto const& cv = c.vertices[x];
      if (cv.color != VertexColor::good) {
        continue;
      }
      auto const& vg = g.vertex(cv.base_vertex);
      std::vector<ColoredIncidence const*> inc;
      for (auto const& i : c.incidences) {
        if (i.vertex == x && !i.local.empty()) {
          inc.push_back(&i);
        }
      }
      for (std::size_t i = 0; i < inc.size(); ++i) {
        for (std::size_t j = i + 1; j < inc.size(); ++j) {
          for (std::size_t gi = 0; gi < inc[i]->local.size(); ++gi) {
            for (std::size_t gj = 0; gj < inc[j]->local.size(); ++gj) {
              PairCheck p;
              p.vertex = x;
              p.u      = rename_word(inc[i]->global[gi], g.alphabet(), t.alphabet());
              p.v      = rename_word(inc[j]->global[gj], g.alphabet(), t.alphabet());
              p.powers = detail::power_coincidence(t, p.u, p.v, power_budget, budget);
              Word const lu = inc[i]->local[gi], lv = inc[j]->local[gj];
              if (vg.is_free_locus()) {
                bool const commute = reduce(commutator(lu, lv)).empty();
                p.roots_equal      = detail::same_root(lu, lv);
                if (!commute) {
                  p.status = HypothesisStatus::verified;
                  if (inc[i]->base_edge == inc[j]->base_edge && inc[i]->side == inc[j]->side && gi == gj) {
                    Word const conj = inc[j]->outward * inverse(inc[i]->outward);
                    Word const k    = g.edge(inc[i]->base_edge).images(inc[i]->side)[gi];
                    p.detail = "[" + format_word(conj, vg.alphabet()) + ", " + format_word(k, vg.alphabet())
                               + "] is nontrivial in a free vertex group";
                  } else {
                    p.detail = "the generators do not commute in a free vertex group";
                  }
                } else {
                  p.status = HypothesisStatus::refuted;
                  if (!p.powers) {
                    auto const ru = primitive_root(reduce(lu));
                    auto const rv = primitive_root(reduce(lv));
                    std::int64_t const sign = ru.root == rv.root ? 1 : -1;
                    p.powers = std::pair(rv.exponent, sign * ru.exponent);
                  }
                  p.detail = "the generators share a root";
                }
              } else if (p.powers) {
                p.status = HypothesisStatus::refuted;
                p.detail = "powers coincide";
              } else {
                p.status = HypothesisStatus::verified_to_budget;
                p.detail = "no power coincidence up to budget " + std::to_string(power_budget);
                all_exact = false;
              }
              if (p.status == HypothesisStatus::refuted && p.powers) {
                p.detail += " (u^" + std::to_string(p.powers->first) + " = v^"
                            + std::to_string(p.powers->second) + ")";
                if (!p.roots_equal) {
                  p.roots_equal = tower_word_problem(t, p.u * inverse(p.v), budget) == Verdict::trivial;
                }
              }
              any_refuted = any_refuted || p.status == HypothesisStatus::refuted;
              rep.h1.pairs.push_back(std::move(p));
            }
          }
        }
      }
    }
    rep.h1.status = any_refuted ? HypothesisStatus::refuted
                    : all_exact ? HypothesisStatus::verified
                                : HypothesisStatus::verified_to_budget;
    rep.h1.detail = std::to_string(rep.h1.pairs.size()) + " generator pairs at G vertices checked";

    // (2)
    rep.h2.name   = "no-half-flat";
    rep.h2.budget = budget;
    if (c.top != BlockKind::abelian) {
      rep.h2.status = HypothesisStatus::not_applicable;
      rep.h2.detail = "only top abelian blocks attach along a single element";
      return rep;
    }
    auto const& blk = std::get<AbelianBlock>(t.top().block()->data);
    std::string const ws = format_word(blk.attach, t.stage(t.height() - 1).alphabet());
    rep.h2.status = HypothesisStatus::verified;
    for (auto const& o : t.ledger()) {
      if (o.stage != t.height() || o.check.rfind("attach-", 0) != 0) {
        continue;
      }
      if (o.status == Obligation::Status::refuted) {
        rep.h2.status = HypothesisStatus::refuted;
        rep.h2.detail = o.check == "attach-not-proper-power" ? "'" + ws + "' is a proper power"
                                                             : o.check + ": " + o.detail;
        return rep;
      }
      if (o.status == Obligation::Status::budget_limited) {
        rep.h2.status = HypothesisStatus::budget_limited;
        rep.h2.detail = o.check + " is budget-limited";
      }
    }
    auto const& prev = t.stage(t.height() - 1);
    for (auto const& lat : prev.lattices()) {
      bool separated = false;
      for (auto const& p : prev.probes()) {
        Word r;
        for (auto const& lg : lat.gens) {
          if (!p(lg).empty()) {
            r = p(lg);
            break;
          }
        }
        Word const pw = p(blk.attach);
        if (!pw.empty() && !detail::conjugate_into_cyclic_free(pw, r)) {
          separated = true;
          break;
        }
      }
      if (!separated && rep.h2.status == HypothesisStatus::verified) {
        rep.h2.status = HypothesisStatus::budget_limited;
        rep.h2.detail = "no probe separates '" + ws + "' from the lattice of " + lat.origin;
      }
    }
    if (rep.h2.status == HypothesisStatus::verified) {
      rep.h2.detail = "'" + ws + "' is not a proper power and not conjugate into any torus lattice";
    }
    return rep;
  }

  ////////////////////////////////////////////////////////////////////////
  // Symbolic bounds
  ////////////////////////////////////////////////////////////////////////

  class SymbolicBound {
   public:
    enum class Kind { constant, identity, atom, max, doubling };

    // Numeric values for named constants and opaque function atoms.
    struct Assignment {
      std::map<std::string, std::int64_t>                                constants;
      std::map<std::string, std::function<std::int64_t(std::int64_t)>> functions;
    };

    static SymbolicBound constant(std::string name) { return SymbolicBound(Kind::constant, std::move(name), {}); }
    static SymbolicBound identity() { return SymbolicBound(Kind::identity, "k", {}); }
    static SymbolicBound atom(std::string name) { return SymbolicBound(Kind::atom, std::move(name), {}); }
    static SymbolicBound max(SymbolicBound a, SymbolicBound b) {
      return SymbolicBound(Kind::max, "max", {std::move(a), std::move(b)});
    }
    // D(f)(k) = f(2k) + 2k
    static SymbolicBound doubling(SymbolicBound f) { return SymbolicBound(Kind::doubling, "D", {std::move(f)}); }

    Kind kind() const noexcept { return kind_; }
    std::string const& name() const noexcept { return name_; }
    std::vector<SymbolicBound> const& args() const noexcept { return *args_; }

    std::int64_t eval(std::int64_t k, Assignment const& a) const {
      switch (kind_) {
        case Kind::constant: {
          auto it = a.constants.find(name_);
          if (it == a.constants.end()) {
            throw domain_error("no value for constant '" + name_ + "'");
          }
          return it->second;
        }
        case Kind::identity:
          return k;
        case Kind::atom: {
          auto it = a.functions.find(name_);
          if (it == a.functions.end()) {
            throw domain_error("no function for atom '" + name_ + "'");
          }
          return it->second(k);
        }
        case Kind::max:
          return std::max((*args_)[0].eval(k, a), (*args_)[1].eval(k, a));
        default:
          return (*args_)[0].eval(2 * k, a) + 2 * k;
      }
    }

    std::string to_string() const {
      switch (kind_) {
        case Kind::constant:
        case Kind::identity:
        case Kind::atom:
          return name_;
        case Kind::max:
          return "max(" + (*args_)[0].to_string() + ", " + (*args_)[1].to_string() + ")";
        default:
          return "D(" + (*args_)[0].to_string() + ")";
      }
    }

    // Names of constants and atoms, in first-occurrence order.
    void collect(std::vector<std::string>& constants, std::vector<std::string>& atoms) const {
      auto add = [](std::vector<std::string>& v, std::string const& n) {
        if (std::find(v.begin(), v.end(), n) == v.end()) {
          v.push_back(n);
        }
      };
      if (kind_ == Kind::constant) {
        add(constants, name_);
      } else if (kind_ == Kind::atom) {
        add(atoms, name_);
      }
      for (auto const& x : *args_) {
        x.collect(constants, atoms);
      }
    }

    friend bool operator==(SymbolicBound const& x, SymbolicBound const& y) {
      return x.kind_ == y.kind_ && x.name_ == y.name_ && *x.args_ == *y.args_;
    }

   private:
    SymbolicBound(Kind k, std::string n, std::vector<SymbolicBound> args)
        : kind_(k), name_(std::move(n)),
          args_(std::make_shared<std::vector<SymbolicBound> const>(std::move(args))) {}

    Kind                                              kind_;
    std::string                                       name_;
    std::shared_ptr<std::vector<SymbolicBound> const> args_;
  };

  // max over D(phi_v), D(psi_e), D(psi'), and D(diam_e) = diam_e + 2k.
  inline SymbolicBound compose_isolation_bound(std::vector<SymbolicBound> const& phi_v,
                                               std::vector<SymbolicBound> const& psi_e,
                                               std::optional<SymbolicBound> const& psi_prime,
                                               std::vector<std::string> const& edge_diams) {
    std::vector<SymbolicBound> terms;
    for (auto const& f : phi_v) {
      terms.push_back(SymbolicBound::doubling(f));
    }
    for (auto const& f : psi_e) {
      terms.push_back(SymbolicBound::doubling(f));
    }
    if (psi_prime) {
      terms.push_back(SymbolicBound::doubling(*psi_prime));
    }
    for (auto const& d : edge_diams) {
      terms.push_back(SymbolicBound::doubling(SymbolicBound::constant(d)));
    }
    if (terms.empty()) {
      throw domain_error("nothing to bound: every input family is empty");
    }
    SymbolicBound out = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) {
      out = SymbolicBound::max(out, terms[i]);
    }
    return out;
  }

}  // namespace rft
