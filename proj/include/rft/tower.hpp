#pragma once

// Construction of towers: the height-0 free product and block attachment
// with its obligation ledger.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rft/errors.hpp"
#include "rft/graph_of_groups.hpp"
#include "rft/stage.hpp"
#include "rft/words.hpp"

namespace rft {

  namespace detail {

    inline std::int64_t content(lattice::Vector const& v) {
      std::int64_t g = 0;
      for (auto x : v) {
        g = std::gcd(g, x);
      }
      return g;
    }

    inline bool conjugate_into_cyclic(Word const& w, Word const& r) {
      Word const root = primitive_root(w).root;
      Word const rr   = primitive_root(r).root;
      return free_conjugator(rr, root).has_value() || free_conjugator(inverse(rr), root).has_value();
    }

    inline VertexGroup relabel(VertexGroup const& v, std::string label) {
      switch (v.kind()) {
        case VertexKind::free:
          return VertexGroup::free(std::move(label), v.alphabet());
        case VertexKind::free_abelian:
          return VertexGroup::free_abelian(std::move(label), v.alphabet(), v.hidden());
        case VertexKind::surface:
          return VertexGroup::surface(std::move(label), *v.surface_presentation());
        default:
          return VertexGroup::composite(std::move(label), v.oracle());
      }
    }

  }  // namespace detail

  class Tower {
   public:
    static Tower height0(std::vector<Summand> summands) {
      if (summands.empty()) {
        throw domain_error("a tower needs at least one base summand");
      }
      Tower                    t;
      std::vector<VertexGroup> vertices;
      std::vector<EdgeGroup>   edges;
      std::vector<TorusLattice> lattices;
      for (std::size_t i = 0; i < summands.size(); ++i) {
        auto const&       s     = summands[i];
        std::string const label = std::string(to_string(s.kind)) + std::to_string(i + 1);
        switch (s.kind) {
          case VertexKind::free:
            if (s.gens.empty()) {
              throw domain_error("free summand needs at least one generator");
            }
            vertices.push_back(VertexGroup::free(label, Alphabet(s.gens)));
            break;
          case VertexKind::free_abelian:
            if (s.gens.empty()) {
              throw domain_error("abelian summand needs rank >= 1");
            }
            vertices.push_back(VertexGroup::free_abelian(label, Alphabet(s.gens)));
            if (s.gens.size() >= 2) {
              lattices.push_back({{}, 0, "abelian summand " + std::to_string(i + 1)});
              for (std::size_t g = 0; g < s.gens.size(); ++g) {
                lattices.back().gens.push_back(Word{letter(g)});  // shifted below
              }
              ++t.flat_records_;
            }
            break;
          case VertexKind::surface:
            vertices.push_back(base_surface_vertex(label, s));
            break;
          default:
            throw domain_error("composite base summands are not supported");
        }
        if (i > 0) {
          edges.push_back({"e" + std::to_string(i), 0, 0, i, {}, {}});
        }
      }
      auto graph = std::make_shared<GraphOfGroups const>(std::move(vertices), std::move(edges));
      // lattice generators refer to the summand's local alphabet until here
      std::size_t li = 0;
      for (std::size_t v = 0; v < graph->vertices().size(); ++v) {
        auto const& vg = graph->vertex(v);
        if (vg.kind() == VertexKind::free_abelian && vg.alphabet().size() >= 2) {
          for (auto& w : lattices[li].gens) {
            w = graph->to_global(v, w);
          }
          ++li;
        }
      }
      auto stage = std::make_shared<Stage>(0, nullptr, graph, std::nullopt,
                                           GroupHom::identity(graph->alphabet()),
                                           std::vector<std::size_t>{}, std::move(lattices));
      stage->set_probes(build_probes(*stage));
      t.summands_ = std::move(summands);
      t.stages_.push_back(std::move(stage));
      return t;
    }

    // Attach a block on top.  Obligations that cannot be verified throw
    // obligation_error unless the block's policy admits them; admitted
    // ones are recorded in the ledger.
    Tower attach(Block const& block, std::size_t budget = GraphOfGroups::default_budget) const {
      Tower next = *this;
      switch (block.kind()) {
        case BlockKind::abelian:
          next.attach_abelian(block, budget);
          break;
        case BlockKind::torus:
          next.attach_torus(block, budget);
          break;
        case BlockKind::quadratic:
          next.attach_quadratic(block, budget);
          break;
      }
      return next;
    }

    std::size_t height() const noexcept { return stages_.size() - 1; }
    Stage const& stage(std::size_t i) const { return *stages_.at(i); }
    Stage const& top() const { return *stages_.back(); }
    std::shared_ptr<Stage const> const& top_ptr() const { return stages_.back(); }
    Presentation const& presentation() const { return top().presentation(); }
    Alphabet const& alphabet() const { return top().alphabet(); }
    std::vector<Summand> const& summands() const noexcept { return summands_; }
    std::vector<Obligation> const& ledger() const noexcept { return ledger_; }
    // Number of maximal flats created during the construction.
    std::size_t flat_records() const noexcept { return flat_records_; }

    std::vector<Block> blocks() const {
      std::vector<Block> out;
      for (std::size_t i = 1; i < stages_.size(); ++i) {
        out.push_back(*stages_[i]->block());
      }
      return out;
    }

   private:
    static VertexGroup base_surface_vertex(std::string const& label, Summand const& s) {
      if (s.punctures == 0) {
        if (s.genus == 0) {
          throw domain_error("the sphere is not a valid base summand");
        }
        if (s.genus == 1) {
          throw domain_error("closed genus-1 surface: use abelian(rank=2) instead");
        }
        return VertexGroup::surface(label, SurfacePresentation::closed(s.genus, s.gens));
      }
      long const chi = 2 - 2 * static_cast<long>(s.genus) - static_cast<long>(s.punctures);
      if (chi == -1) {
        throw domain_error("surfaces of Euler characteristic -1 are not valid base summands");
      }
      if (2 * s.genus + s.punctures - 1 == 0) {
        throw domain_error("the disc is not a valid base summand");
      }
      return VertexGroup::surface(label, SurfacePresentation::bounded(s.genus, s.punctures, s.gens));
    }

    void record(std::string check, Obligation::Status status, std::string detail,
                AttachPolicy policy) {
      std::size_t const stage = stages_.size();
      bool const        admitted
          = status == Obligation::Status::verified
            || (status == Obligation::Status::budget_limited && policy != AttachPolicy::strict)
            || policy == AttachPolicy::force;
      if (!admitted) {
        throw obligation_error(check, "stage " + std::to_string(stage) + ": " + detail);
      }
      ledger_.push_back({stage, std::move(check), status, std::move(detail)});
    }

    // Verdict of the word problem turned into an obligation.
    void require_trivial(std::string check, Word const& w, std::string const& what,
                         AttachPolicy policy, std::size_t budget) {
      switch (top().word_problem(w, budget)) {
        case Verdict::trivial:
          record(std::move(check), Obligation::Status::verified, what + " holds", policy);
          break;
        case Verdict::nontrivial:
          record(std::move(check), Obligation::Status::refuted, what + " fails", policy);
          break;
        default:
          record(std::move(check), Obligation::Status::budget_limited,
                 what + " undecided within budget " + std::to_string(budget), policy);
      }
    }

    void require_nontrivial(Word const& w, AttachPolicy policy, std::size_t budget) {
      Alphabet const& a    = alphabet();
      std::string     text = "'" + format_word(w, a) + "'";
      switch (top().word_problem(w, budget)) {
        case Verdict::nontrivial:
          record("attach-nontrivial", Obligation::Status::verified, text + " is nontrivial", policy);
          break;
        case Verdict::trivial:
          throw obligation_error("attach-nontrivial", text + " is trivial");
        default:
          record("attach-nontrivial", Obligation::Status::budget_limited,
                 text + " not certified nontrivial", policy);
      }
    }

    // Proper-power status of w in the current top stage.
    std::pair<Obligation::Status, std::string> not_proper_power(Word const& w) const {
      Stage const&    s    = top();
      Alphabet const& a    = s.alphabet();
      std::string     text = "'" + format_word(w, a) + "'";
      if (auto pp = is_proper_power(w)) {
        return {Obligation::Status::refuted,
                text + " = (" + format_word(pp->root, a) + ")^" + std::to_string(pp->exponent)};
      }
      auto const& g = s.graph();
      if (g.vertices().size() == 1) {
        auto const& vg = g.vertex(0);
        if (vg.is_free_locus()) {
          return {Obligation::Status::verified, text + " is not a proper power in a free group"};
        }
        auto const ab = abelianize(w, a);
        if (vg.kind() == VertexKind::free_abelian) {
          if (std::llabs(detail::content(ab)) == 1) {
            return {Obligation::Status::verified, text + " has primitive exponent vector"};
          }
          return {Obligation::Status::refuted, text + " has non-primitive exponent vector"};
        }
        if (std::llabs(detail::content(ab)) == 1) {
          return {Obligation::Status::verified, text + " has primitive abelianization"};
        }
        return {Obligation::Status::budget_limited,
                text + " has non-primitive abelianization; no proper-power decision"};
      }
      for (std::size_t i = 0; i < s.probes().size(); ++i) {
        Word const img = s.probes()[i](w);
        if (!img.empty() && !is_proper_power(img)) {
          return {Obligation::Status::verified,
                  text + " maps to a non-power under probe " + std::to_string(i)};
        }
      }
      return {Obligation::Status::budget_limited, text + " not certified to be a non-power"};
    }

    // Is w conjugate into one of the lattices of the current top stage?
    std::pair<Obligation::Status, std::string> not_in_lattices(Word const& w) const {
      Stage const&    s    = top();
      std::string     text = "'" + format_word(w, s.alphabet()) + "'";
      auto const&     g    = s.graph();
      if (g.vertices().size() == 1 && g.vertex(0).kind() == VertexKind::free_abelian) {
        if (g.vertex(0).alphabet().size() >= 2) {
          return {Obligation::Status::refuted, text + " lies in the abelian summand"};
        }
        return {Obligation::Status::verified, text + ": no lattice of rank >= 2"};
      }
      for (auto const& lat : s.lattices()) {
        bool excluded = false;
        for (auto const& p : s.probes()) {
          Word const img = p(w);
          if (img.empty()) {
            continue;
          }
          std::optional<Word> root;
          for (auto const& x : lat.gens) {
            Word const im = p(x);
            if (!im.empty()) {
              root = primitive_root(im).root;
              break;
            }
          }
          if (!root || !detail::conjugate_into_cyclic(img, *root)) {
            excluded = true;
            break;
          }
        }
        if (!excluded) {
          return {Obligation::Status::budget_limited,
                  text + " not shown to avoid the lattice of " + lat.origin};
        }
      }
      return {Obligation::Status::verified,
              text + " is not conjugate into any of " + std::to_string(s.lattices().size())
                  + " lattice(s)"};
    }

    void check_maximal_cyclic(Word const& w, AttachPolicy policy) {
      auto [st1, d1] = not_proper_power(w);
      record("attach-not-proper-power", st1, d1, policy);
      auto [st2, d2] = not_in_lattices(w);
      record("attach-not-in-lattice", st2, d2, policy);
    }

    void check_new_names(std::vector<std::string> const& names) const {
      for (auto const& n : names) {
        if (!is_valid_name(n)) {
          throw alphabet_error("invalid generator name '" + n + "'");
        }
        if (alphabet().contains(n)) {
          throw alphabet_error("new generator '" + n + "' is already in use");
        }
      }
    }

    VertexGroup previous_vertex() const {
      auto const& g = top().graph();
      if (g.vertices().size() == 1 && g.edges().empty()) {
        return detail::relabel(g.vertex(0), "M");
      }
      return VertexGroup::composite("M", top_ptr());
    }

    void push_stage(std::vector<VertexGroup> vertices, std::vector<EdgeGroup> edges,
                    Block const& block, std::vector<std::string> const& new_names,
                    std::vector<Word> const& new_images, std::vector<TorusLattice> lattices,
                    bool retraction_verified) {
      auto        graph = std::make_shared<GraphOfGroups const>(std::move(vertices), std::move(edges));
      auto const& prev  = alphabet();
      auto const& a     = graph->alphabet();
      for (std::size_t i = 0; i < prev.size(); ++i) {
        if (a.name(i) != prev.name(i)) {
          throw domain_error("stage alphabet does not extend the previous one");
        }
      }
      std::vector<Word>        images;
      std::vector<std::size_t> fresh;
      for (std::size_t i = 0; i < prev.size(); ++i) {
        images.push_back(Word{letter(i)});
      }
      for (std::size_t i = prev.size(); i < a.size(); ++i) {
        auto const it = std::find(new_names.begin(), new_names.end(), a.name(i));
        images.push_back(new_images[static_cast<std::size_t>(it - new_names.begin())]);
      }
      for (auto const& n : new_names) {
        fresh.push_back(a.index(n));
      }
      auto stage = std::make_shared<Stage>(stages_.size(), top_ptr(), graph, block,
                                           GroupHom(a, prev, std::move(images)), std::move(fresh),
                                           std::move(lattices));
      stage->set_retraction_verified(retraction_verified);
      stage->set_probes(build_probes(*stage));
      stages_.push_back(std::move(stage));
    }

    void attach_abelian(Block const& block, std::size_t budget) {
      auto const& b = std::get<AbelianBlock>(block.data);
      if (b.rank < 2 || b.letters.size() != b.rank - 1) {
        throw domain_error("block A needs rank m >= 2 and m - 1 new letters");
      }
      check_new_names(b.letters);
      Word const w = reduce(alphabet(), b.attach);
      require_nontrivial(w, block.policy, budget);
      check_maximal_cyclic(w, block.policy);

      std::vector<std::string> local{"@w"};
      local.insert(local.end(), b.letters.begin(), b.letters.end());
      std::vector<VertexGroup> vertices{
          previous_vertex(), VertexGroup::free_abelian("N", Alphabet(local), {"@w"})};
      std::vector<EdgeGroup> edges{{"e", 1, 0, 1, {w}, {Word{letter(0)}}}};

      auto              lattices = top().lattices();
      TorusLattice      lat{{w}, stages_.size(), "block A at stage " + std::to_string(stages_.size())};
      std::size_t const base     = alphabet().size();
      for (std::size_t i = 0; i < b.letters.size(); ++i) {
        lat.gens.push_back(Word{letter(base + i)});
      }
      lattices.push_back(std::move(lat));
      ++flat_records_;
      Block stored = block;
      std::get<AbelianBlock>(stored.data).attach = w;
      push_stage(std::move(vertices), std::move(edges), stored, b.letters,
                 std::vector<Word>(b.letters.size()), std::move(lattices), true);
    }

    void attach_torus(Block const& block, std::size_t budget) {
      auto const&       b = std::get<TorusBlock>(block.data);
      std::size_t const k = b.attach.size();
      if (k == 0 || b.rank <= k || b.letters.size() != b.rank - k) {
        throw domain_error("block T needs 1 <= k < l attaching words and l - k new letters");
      }
      check_new_names(b.letters);
      std::vector<Word> ws;
      for (auto const& w : b.attach) {
        ws.push_back(reduce(alphabet(), w));
        require_nontrivial(ws.back(), block.policy, budget);
      }
      auto                       lattices = top().lattices();
      std::optional<std::size_t> extends;
      if (k == 1) {
        check_maximal_cyclic(ws.front(), block.policy);
      } else {
        extends = matching_lattice(ws, budget);
        if (extends) {
          record("attach-maximal-lattice", Obligation::Status::verified,
                 "attaching tuple generates the lattice of " + lattices[*extends].origin,
                 block.policy);
        } else {
          record("attach-maximal-lattice", Obligation::Status::budget_limited,
                 "attaching tuple not identified with an existing lattice", block.policy);
        }
      }

      std::vector<std::string> local;
      std::set<std::string>    hidden;
      std::vector<Word>        src, tgt;
      for (std::size_t i = 0; i < k; ++i) {
        local.push_back("@w" + std::to_string(i + 1));
        hidden.insert(local.back());
        src.push_back(ws[i]);
        tgt.push_back(Word{letter(i)});
      }
      local.insert(local.end(), b.letters.begin(), b.letters.end());
      std::vector<VertexGroup> vertices{
          previous_vertex(), VertexGroup::free_abelian("N", Alphabet(local), hidden)};
      std::vector<EdgeGroup> edges{{"e", k, 0, 1, src, tgt}};

      std::size_t const base = alphabet().size();
      TorusLattice      lat{ws, stages_.size(), "block T at stage " + std::to_string(stages_.size())};
      for (std::size_t i = 0; i < b.letters.size(); ++i) {
        lat.gens.push_back(Word{letter(base + i)});
      }
      if (extends) {
        lat.origin = lattices[*extends].origin + ", extended at stage " + std::to_string(stages_.size());
        lattices[*extends] = std::move(lat);
      } else {
        lattices.push_back(std::move(lat));
        ++flat_records_;
      }
      Block stored = block;
      std::get<TorusBlock>(stored.data).attach = ws;
      push_stage(std::move(vertices), std::move(edges), stored, b.letters,
                 std::vector<Word>(b.letters.size()), std::move(lattices), true);
    }

    // Index of a lattice whose generators span the same subgroup as ws.
    std::optional<std::size_t> matching_lattice(std::vector<Word> const& ws,
                                                std::size_t budget) const {
      auto const& g = top().graph();
      if (g.vertices().size() == 1 && g.vertex(0).kind() == VertexKind::free_abelian) {
        lattice::Matrix m;
        for (auto const& w : ws) {
          m.push_back(abelianize(w, alphabet()));
        }
        auto const n = alphabet().size();
        if (ws.size() == n && lattice::rank(m, n) == n) {
          auto e = lattice::column_echelon(m, n);
          std::int64_t det = 1;
          for (std::size_t c = 0; c < n; ++c) {
            det *= e.h[e.pivot_row[c]][c];
          }
          if (std::llabs(det) == 1 && !top().lattices().empty()) {
            return 0;
          }
        }
        return std::nullopt;
      }
      auto const& lats = top().lattices();
      for (std::size_t i = 0; i < lats.size(); ++i) {
        if (lats[i].gens == ws) {
          return i;
        }
        if (lats[i].gens.size() != ws.size()) {
          continue;
        }
        auto const within = [&](std::vector<Word> const& sub, std::vector<Word> const& of) {
          for (auto const& w : sub) {
            if (!top().abelian_membership(of, w, budget).is_member()) {
              return false;
            }
          }
          return true;
        };
        if (within(ws, lats[i].gens) && within(lats[i].gens, ws)) {
          return i;
        }
      }
      return std::nullopt;
    }

    void attach_quadratic(Block const& block, std::size_t budget) {
      auto const&       q = std::get<QuadraticBlock>(block.data);
      auto const&       S = q.surface;
      AttachPolicy const policy = block.policy;
      std::size_t const p = S.punctures();
      if (S.is_closed()) {
        throw domain_error("block Q needs a surface with boundary");
      }
      bool const ok_type = S.euler_characteristic() <= -2 || (S.genus() == 1 && p == 1);
      record("surface-type", ok_type ? Obligation::Status::verified : Obligation::Status::refuted,
             "genus " + std::to_string(S.genus()) + ", " + std::to_string(p)
                 + " boundary component(s), Euler characteristic "
                 + std::to_string(S.euler_characteristic()),
             policy);
      if (q.boundary.size() != p) {
        throw domain_error("block Q needs one attaching word per boundary component");
      }
      if (q.retraction.size() != S.alphabet().size()) {
        throw domain_error("block Q needs a retraction image for every surface generator");
      }
      check_new_names(S.alphabet().names());
      std::vector<std::string> stable = q.stable_letters;
      if (stable.empty()) {
        for (std::size_t j = 1; j < p; ++j) {
          std::string n = "u" + std::to_string(j + 1);
          while (alphabet().contains(n) || S.alphabet().contains(n)) {
            n += "_";
          }
          stable.push_back(n);
        }
      }
      if (stable.size() + 1 != p) {
        throw domain_error("block Q needs one stable letter per boundary component after the first");
      }
      check_new_names(stable);
      std::vector<Word> stable_images = q.stable_retraction;
      stable_images.resize(stable.size());

      // boundary keys against the standard boundary words
      auto const        standard = S.boundary_words();
      std::vector<bool> used(p, false);
      bool              matched   = true;
      for (auto const& [key, w] : q.boundary) {
        Word const k     = reduce(S.alphabet(), key);
        bool       found = false;
        for (std::size_t j = 0; j < p && !found; ++j) {
          if (used[j]) {
            continue;
          }
          if (free_conjugator(standard[j], k) || free_conjugator(inverse(standard[j]), k)) {
            used[j]   = true;
            found     = true;
          }
        }
        matched = matched && found;
      }
      record("boundary-match", matched ? Obligation::Status::verified : Obligation::Status::refuted,
             matched ? "every key is a boundary component" : "a key is not a boundary component",
             policy);

      std::vector<Word> ws;
      for (auto const& [key, w] : q.boundary) {
        ws.push_back(reduce(alphabet(), w));
        require_nontrivial(ws.back(), policy, budget);
      }

      GroupHom const r(S.alphabet(), alphabet(), q.retraction);
      std::size_t    before = ledger_.size();
      for (std::size_t j = 0; j < p; ++j) {
        Word const rk = r(reduce(S.alphabet(), q.boundary[j].first));
        if (j == 0) {
          require_trivial("retraction-boundary", rk * inverse(ws[0]),
                          "retraction of boundary 1 equals its attaching word", policy, budget);
        } else {
          Word const& u = stable_images[j - 1];
          require_trivial("retraction-boundary", u * ws[j] * inverse(u) * inverse(rk),
                          "retraction of boundary " + std::to_string(j + 1)
                              + " equals the conjugated attaching word",
                          policy, budget);
        }
      }
      bool retraction_verified = true;
      for (std::size_t i = before; i < ledger_.size(); ++i) {
        retraction_verified = retraction_verified && ledger_[i].status == Obligation::Status::verified;
      }
      check_nonabelian_image(S, q.retraction, policy, budget);

      std::vector<VertexGroup> vertices{previous_vertex(), VertexGroup::surface("N", S)};
      std::vector<EdgeGroup>   edges;
      for (std::size_t j = 0; j < p; ++j) {
        edges.push_back({j == 0 ? std::string("e") : stable[j - 1], 1, 1, 0,
                         {reduce(S.alphabet(), q.boundary[j].first)}, {ws[j]}});
      }
      std::vector<std::string> names = S.alphabet().names();
      std::vector<Word>        images = q.retraction;
      names.insert(names.end(), stable.begin(), stable.end());
      images.insert(images.end(), stable_images.begin(), stable_images.end());
      Block stored = block;
      auto& sq     = std::get<QuadraticBlock>(stored.data);
      sq.stable_letters    = stable;
      sq.stable_retraction = stable_images;
      for (std::size_t j = 0; j < p; ++j) {
        sq.boundary[j].second = ws[j];
      }
      push_stage(std::move(vertices), std::move(edges), stored, names, images, top().lattices(),
                 retraction_verified);
    }

    void check_nonabelian_image(SurfacePresentation const& S, std::vector<Word> const& images,
                                AttachPolicy policy, std::size_t budget) {
      bool undecided = false;
      for (std::size_t i = 0; i < images.size(); ++i) {
        for (std::size_t j = i + 1; j < images.size(); ++j) {
          switch (top().word_problem(commutator(images[i], images[j]), budget)) {
            case Verdict::nontrivial:
              record("nonabelian-image", Obligation::Status::verified,
                     "images of " + S.alphabet().name(i) + " and " + S.alphabet().name(j)
                         + " do not commute",
                     policy);
              return;
            case Verdict::unknown:
              undecided = true;
              break;
            default:
              break;
          }
        }
      }
      record("nonabelian-image",
             undecided ? Obligation::Status::budget_limited : Obligation::Status::refuted,
             undecided ? "no noncommuting pair of images certified"
                       : "the retraction has abelian image",
             policy);
    }

    std::vector<Summand>                      summands_;
    std::vector<std::shared_ptr<Stage const>> stages_;
    std::vector<Obligation>                   ledger_;
    std::size_t                               flat_records_ = 0;
  };

  inline Tower new_height0(std::vector<Summand> summands) {
    return Tower::height0(std::move(summands));
  }

  inline Tower attach_block(Tower const& t, Block const& b,
                            std::size_t budget = GraphOfGroups::default_budget) {
    return t.attach(b, budget);
  }

  // Composite retraction from the top stage onto the base stage.
  inline GroupHom retraction_to_base(Tower const& t) {
    GroupHom h = GroupHom::identity(t.alphabet());
    for (std::size_t i = t.height(); i > 0; --i) {
      h = compose(t.stage(i).retraction(), h);
    }
    return h;
  }

  inline Verdict tower_word_problem(Tower const& t, Word const& w,
                                    std::size_t budget = GraphOfGroups::default_budget) {
    return t.top().word_problem(w, budget);
  }

}  // namespace rft
