#pragma once

// Structured reports: JSON encoders with fixed key order, the input
// digest, the splitting document read by `embed`, and replay checkers
// that re-verify certificates from report data alone.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rft/core.hpp"
#include "rft/embed.hpp"
#include "rft/errors.hpp"
#include "rft/graph_of_groups.hpp"
#include "rft/surface.hpp"
#include "rft/tower.hpp"
#include "rft/witness.hpp"
#include "rft/word_syntax.hpp"
#include "rft/words.hpp"

namespace rft {

  using Json = nlohmann::ordered_json;

  inline constexpr char const* tool_version = "0.1.0";

  // FNV-1a, 64 bit.
  inline std::string fnv1a_digest(std::string_view data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
  }

  // Report status and exit code are the same fact.
  enum class ReportStatus { complete, refuted, partial, error };

  inline char const* to_string(ReportStatus s) {
    switch (s) {
      case ReportStatus::complete:
        return "complete";
      case ReportStatus::refuted:
        return "refuted";
      case ReportStatus::partial:
        return "partial";
      default:
        return "error";
    }
  }

  inline int exit_code(ReportStatus s) {
    switch (s) {
      case ReportStatus::complete:
        return 0;
      case ReportStatus::refuted:
        return 2;
      case ReportStatus::partial:
        return 3;
      default:
        return 1;
    }
  }

  inline ReportStatus worst(ReportStatus a, ReportStatus b) {
    auto rank = [](ReportStatus s) { return s == ReportStatus::complete ? 0 : s == ReportStatus::partial ? 1 : 2; };
    return rank(a) >= rank(b) ? a : b;
  }

  inline Json words_json(std::vector<Word> const& ws, Alphabet const& a) {
    Json out = Json::array();
    for (auto const& w : ws) {
      out.push_back(format_word(w, a));
    }
    return out;
  }

  inline Json hom_json(GroupHom const& h) {
    Json images = Json::object();
    for (std::size_t i = 0; i < h.source().size(); ++i) {
      images[h.source().name(i)] = format_word(h.image(i), h.target());
    }
    return Json{{"source", h.source().names()}, {"target", h.target().names()}, {"images", images}};
  }

  inline GroupHom hom_from_json(Json const& j) {
    Alphabet const    src(j.at("source").get<std::vector<std::string>>());
    Alphabet const    tgt(j.at("target").get<std::vector<std::string>>());
    std::vector<Word> images;
    for (std::size_t i = 0; i < src.size(); ++i) {
      images.push_back(parse_word(j.at("images").at(src.name(i)).get<std::string>(), tgt));
    }
    return GroupHom(src, tgt, images);
  }

  inline Json obligations_json(std::vector<Obligation> const& os) {
    Json out = Json::array();
    for (auto const& o : os) {
      out.push_back({{"stage", o.stage}, {"check", o.check}, {"status", to_string(o.status)}, {"detail", o.detail}});
    }
    return out;
  }

  inline Json tower_json(Tower const& t) {
    Json lat = Json::array();
    for (auto const& l : t.top().lattices()) {
      lat.push_back({{"stage", l.stage}, {"origin", l.origin}, {"gens", words_json(l.gens, t.alphabet())}});
    }
    return Json{{"height", t.height()},
                {"presentation", format_presentation(t.presentation())},
                {"lattices", lat}};
  }

  ////////////////////////////////////////////////////////////////////////
  // Splitting documents
  ////////////////////////////////////////////////////////////////////////

  //   { "case": "amalgam" | "hnn" | "abelian" | "qh",
  //     "vertices": [ { "label": "A", "kind": "free" | "abelian" | "surface",
  //                     "gens": [..], "genus": g, "punctures": p } ],
  //     "edges": [ { "label": "e", "src": 0, "tgt": 1,
  //                  "src_images": [..], "tgt_images": [..] } ],
  //     "nu": { "generator": "word over the host tower", .. } }
  struct SplittingDocument {
    SplittingData      splitting;
    StrictQuotientData quotient;
  };

  inline SplittingCase splitting_case_from(std::string const& s) {
    for (auto c : {SplittingCase::amalgam_rigid_rigid, SplittingCase::hnn_rigid, SplittingCase::abelian_vertex,
                   SplittingCase::qh_vertex}) {
      if (s == to_string(c)) {
        return c;
      }
    }
    throw domain_error("unknown splitting case '" + s + "'");
  }

  inline SplittingDocument parse_splitting(Json const& j, Tower const& host) {
    try {
      std::vector<VertexGroup> vs;
      for (auto const& v : j.at("vertices")) {
        auto const label = v.at("label").get<std::string>();
        auto const kind  = v.at("kind").get<std::string>();
        auto const gens  = v.at("gens").get<std::vector<std::string>>();
        if (kind == "free") {
          vs.push_back(VertexGroup::free(label, Alphabet(gens)));
        } else if (kind == "abelian") {
          vs.push_back(VertexGroup::free_abelian(label, Alphabet(gens)));
        } else if (kind == "surface") {
          auto const g = v.at("genus").get<std::size_t>();
          auto const p = v.value("punctures", std::size_t{0});
          vs.push_back(VertexGroup::surface(
              label, p == 0 ? SurfacePresentation::closed(g, gens) : SurfacePresentation::bounded(g, p, gens)));
        } else {
          throw domain_error("unknown vertex kind '" + kind + "'");
        }
      }
      std::vector<EdgeGroup> es;
      for (auto const& e : j.at("edges")) {
        EdgeGroup eg;
        eg.label = e.at("label").get<std::string>();
        eg.src   = e.at("src").get<std::size_t>();
        eg.tgt   = e.at("tgt").get<std::size_t>();
        if (eg.src >= vs.size() || eg.tgt >= vs.size()) {
          throw domain_error("edge '" + eg.label + "' names a missing vertex");
        }
        for (auto const& w : e.at("src_images")) {
          eg.src_images.push_back(parse_word(w.get<std::string>(), vs[eg.src].alphabet()));
        }
        for (auto const& w : e.at("tgt_images")) {
          eg.tgt_images.push_back(parse_word(w.get<std::string>(), vs[eg.tgt].alphabet()));
        }
        eg.rank = eg.src_images.size();
        es.push_back(std::move(eg));
      }
      SplittingData     s{splitting_case_from(j.at("case").get<std::string>()), GraphOfGroups(vs, es)};
      auto const&       la = s.graph.alphabet();
      std::vector<Word> images;
      for (std::size_t i = 0; i < la.size(); ++i) {
        if (!j.at("nu").contains(la.name(i))) {
          throw domain_error("nu has no image for '" + la.name(i) + "'");
        }
        images.push_back(parse_word(j.at("nu").at(la.name(i)).get<std::string>(), host.alphabet()));
      }
      GroupHom nu(la, host.alphabet(), images);
      return {std::move(s), {std::move(nu)}};
    } catch (nlohmann::json::exception const& e) {
      throw domain_error(std::string("malformed splitting document: ") + e.what());
    }
  }

  ////////////////////////////////////////////////////////////////////////
  // Certificates and replay
  ////////////////////////////////////////////////////////////////////////

  // `tower` is the certificate's source alphabet; an invalid certificate has no hom.
  inline Json witness_json(WitnessCertificate const& c, Alphabet const& tower) {
    Json params = Json::array();
    for (std::size_t i = 0; i < c.layout.size() && i < c.params.size(); ++i) {
      params.push_back({{"role", c.layout[i].role}, {"value", c.params[i]}});
    }
    Json trace = Json::array();
    for (auto const& a : c.trace) {
      trace.push_back({{"params", a.params}, {"collision", a.collision}});
    }
    Json out{{"valid", c.valid}};
    out["hom"]      = c.valid ? hom_json(c.hom) : Json(nullptr);
    out["words"]    = words_json(c.words, tower);
    out["images"]   = c.valid ? words_json(c.images, c.hom.target()) : Json::array();
    out["relators"] = words_json(c.relators, tower);
    out["params"]   = params;
    out["attempts"] = c.attempts;
    out["budget"]   = c.budget;
    out["seed"]     = c.seed;
    out["trace"]    = trace;
    return out;
  }

  // Every relator maps to the identity; word images are recomputed,
  // nontrivial, pairwise distinct and equal to the recorded ones.
  inline bool replay_witness(Json const& j) {
    GroupHom const h = hom_from_json(j.at("hom"));
    for (auto const& r : j.at("relators")) {
      if (!h(parse_word(r.get<std::string>(), h.source())).empty()) {
        return false;
      }
    }
    std::vector<Word> images;
    for (std::size_t i = 0; i < j.at("words").size(); ++i) {
      Word const img = h(parse_word(j.at("words")[i].get<std::string>(), h.source()));
      if (img.empty() || format_word(img, h.target()) != j.at("images")[i].get<std::string>()) {
        return false;
      }
      if (std::find(images.begin(), images.end(), img) != images.end()) {
        return false;
      }
      images.push_back(img);
    }
    return true;
  }

  inline Json injectivity_json(InjectivityCertificate const& c, Alphabet const& source, Alphabet const& target) {
    Json ev = Json::array();
    for (auto const& e : c.evidence) {
      ev.push_back({{"word", format_word(e.word, source)},
                    {"image", format_word(e.image, target)},
                    {"source", to_string(e.source)},
                    {"target", to_string(e.target)}});
    }
    Json out{{"status", to_string(c.status)},
             {"radius", c.radius},
             {"checked", c.checked},
             {"unknowns", c.unknowns},
             {"refutations", c.refutations}};
    out["kernel_element"] = c.kernel_element ? Json(format_word(*c.kernel_element, source)) : Json(nullptr);
    out["evidence"]       = ev;
    return out;
  }

  // Recomputes j on every evidence word and checks the recorded images;
  // a recorded kernel element must map to a word the host kills.
  inline bool replay_embedding(Json const& report, Tower const& gamma) {
    GroupHom const j    = hom_from_json(report.at("j"));
    auto const&    cert = report.at("certificate");
    for (auto const& e : cert.at("evidence")) {
      Word const img = j(parse_word(e.at("word").get<std::string>(), j.source()));
      if (format_word(img, j.target()) != e.at("image").get<std::string>()) {
        return false;
      }
    }
    if (!cert.at("kernel_element").is_null()) {
      Word const k = j(parse_word(cert.at("kernel_element").get<std::string>(), j.source()));
      return tower_word_problem(gamma, rename_word(k, j.target(), gamma.alphabet())) == Verdict::trivial;
    }
    return true;
  }

}  // namespace rft
