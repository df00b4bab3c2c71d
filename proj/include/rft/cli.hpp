#pragma once

// Command dispatch for the `rft` tool.  Every command writes one JSON
// report to `out`; the exit code is a function of the report status.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rft/core.hpp"
#include "rft/dsl.hpp"
#include "rft/embed.hpp"
#include "rft/flats.hpp"
#include "rft/report.hpp"
#include "rft/surface.hpp"
#include "rft/tower.hpp"
#include "rft/witness.hpp"

namespace rft::cli {

  struct Input {
    std::string   text;
    TowerDocument doc;
    Tower         tower;
  };

  inline std::string read_text(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw error("cannot read '" + path + "'");
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  inline Input load(std::string const& path, std::size_t budget) {
    std::string   text = read_text(path);
    TowerDocument doc  = parse_tower_dsl(text);
    Tower         t    = build_tower(doc, budget);
    return {std::move(text), std::move(doc), std::move(t)};
  }

  // ';'-separated words; blank entries are skipped.
  inline std::vector<Word> word_list(std::string const& s, Alphabet const& a) {
    std::vector<Word> out;
    std::stringstream in(s);
    std::string       item;
    while (std::getline(in, item, ';')) {
      if (item.find_first_not_of(" \t") != std::string::npos) {
        out.push_back(parse_word(item, a));
      }
    }
    return out;
  }

  inline char const* kind_name(VertexKind k) {
    switch (k) {
      case VertexKind::free:
        return "free";
      case VertexKind::free_abelian:
        return "abelian";
      case VertexKind::surface:
        return "surface";
      default:
        return "composite";
    }
  }

  inline Json graph_json(GraphOfGroups const& g) {
    Json vs = Json::array();
    for (auto const& v : g.vertices()) {
      vs.push_back({{"label", v.label()}, {"kind", kind_name(v.kind())}, {"gens", v.alphabet().names()}});
    }
    Json es = Json::array();
    for (auto const& e : g.edges()) {
      es.push_back({{"label", e.label},
                    {"src", e.src},
                    {"tgt", e.tgt},
                    {"rank", e.rank},
                    {"src_images", words_json(e.src_images, g.vertices()[e.src].alphabet())},
                    {"tgt_images", words_json(e.tgt_images, g.vertices()[e.tgt].alphabet())}});
    }
    return Json{{"vertices", vs}, {"edges", es}};
  }

  ////////////////////////////////////////////////////////////////////////
  // Commands; each fills `r` and returns the status.
  ////////////////////////////////////////////////////////////////////////

  inline ReportStatus present(Input const& in, std::optional<std::size_t> stage, Json& r) {
    auto const&       t = in.tower;
    std::size_t const n = stage.value_or(t.height());
    if (n > t.height()) {
      throw domain_error("stage " + std::to_string(n) + " does not exist (height " + std::to_string(t.height())
                         + ")");
    }
    auto const& s = t.stage(n);
    Json        lat = Json::array();
    for (auto const& l : s.lattices()) {
      lat.push_back({{"stage", l.stage}, {"origin", l.origin}, {"gens", words_json(l.gens, s.alphabet())}});
    }
    r["tower"]        = in.doc.name;
    r["height"]       = t.height();
    r["stage"]        = n;
    r["presentation"] = format_presentation(s.presentation());
    r["graph"]        = graph_json(s.graph());
    r["lattices"]     = lat;
    r["obligations"]  = obligations_json(t.ledger());
    return ReportStatus::complete;
  }

  inline ReportStatus word_problem(Input const& in, std::string const& word, std::size_t budget, Json& r) {
    auto const&   t = in.tower;
    Word const    w = parse_word(word, t.alphabet());
    Verdict const v = tower_word_problem(t, w, budget);
    r["word"]       = format_word(w, t.alphabet());
    r["budget"]     = budget;
    r["verdict"]    = to_string(v);
    if (v == Verdict::nontrivial) {
      auto const& probes = t.top().probes();
      for (std::size_t i = 0; i < probes.size(); ++i) {
        if (!probes[i](w).empty()) {
          r["evidence"] = {{"probe", i},
                           {"hom", hom_json(probes[i])},
                           {"image", format_word(probes[i](w), probes[i].target())}};
          break;
        }
      }
    }
    return v == Verdict::unknown ? ReportStatus::partial : ReportStatus::complete;
  }

  inline ReportStatus witness(Input const& in, std::string const& words, std::size_t budget, std::uint64_t seed,
                              Json& r) {
    auto const& t    = in.tower;
    auto const  cert = find_rf_witness(t, word_list(words, t.alphabet()), budget, seed);
    r["certificate"] = witness_json(cert, t.alphabet());
    if (cert.valid) {
      r["replay"] = replay_witness(r["certificate"]);
    }
    return cert.valid ? ReportStatus::complete : ReportStatus::partial;
  }

  inline ReportStatus embed(Input const& in, std::string const& spec_text, std::size_t ball, std::size_t budget,
                            Json& r) {
    auto const&  host = in.tower;
    auto const   doc  = parse_splitting(Json::parse(spec_text), host);
    auto const&  s    = doc.splitting;
    ReportStatus st   = ReportStatus::complete;
    r["case"]         = to_string(s.kind);

    Json qc = Json::array();
    for (auto const& c : validate_strict_quotient(s, doc.quotient, host, ball, budget)) {
      Json item{{"check", c.bullet}, {"status", to_string(c.status)}, {"detail", c.detail}};
      item["witness"] = c.witness ? Json(format_word(*c.witness, s.graph.alphabet())) : Json(nullptr);
      qc.push_back(item);
      st = worst(st, c.status == Obligation::Status::refuted          ? ReportStatus::refuted
                     : c.status == Obligation::Status::budget_limited ? ReportStatus::partial
                                                                      : ReportStatus::complete);
    }
    r["quotient_checks"] = qc;

    EmbeddingResult res = [&] {
      try {
        return embed_step(s, doc.quotient, host, budget);
      } catch (obligation_error const& e) {
        r["failed_obligation"] = {{"check", e.check()}, {"detail", e.what()}};
        throw;
      }
    }();
    auto const& ga = res.gamma.alphabet();
    r["gamma"]     = tower_json(res.gamma);
    r["j"]         = hom_json(res.j);
    r["u"]         = {{"kind", res.u_kind}, {"gens", words_json(res.u_gens, host.alphabet())}};
    Json rc        = Json::array();
    for (auto const& c : res.relator_checks) {
      rc.push_back({{"relator", format_word(c.relator, s.graph.alphabet())},
                    {"image", format_word(c.image, ga)},
                    {"verdict", to_string(c.verdict)}});
      st = worst(st, c.verdict == Verdict::unknown ? ReportStatus::partial : ReportStatus::complete);
    }
    r["relator_checks"] = rc;
    r["obligations"]    = obligations_json(res.obligations);
    for (auto const& o : res.obligations) {
      st = worst(st, o.status == Obligation::Status::refuted          ? ReportStatus::refuted
                     : o.status == Obligation::Status::budget_limited ? ReportStatus::partial
                                                                      : ReportStatus::complete);
    }
    auto const cert   = certify_injectivity_on_ball(res, s.graph, ball, budget);
    r["certificate"]  = injectivity_json(cert, s.graph.alphabet(), ga);
    r["replay"]       = replay_embedding(r, res.gamma);
    st = worst(st, cert.status == InjectivityCertificate::Status::refuted ? ReportStatus::refuted
                   : cert.status == InjectivityCertificate::Status::partial ? ReportStatus::partial
                                                                            : ReportStatus::complete);
    return st;
  }

  // "v3;e7" names cover vertex 3 and cover edge 7.
  inline CoreCells parse_cells(std::string const& s) {
    CoreCells         out;
    std::stringstream in(s);
    std::string       item;
    while (std::getline(in, item, ';')) {
      item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
                 item.end());
      if (item.empty()) {
        continue;
      }
      if (item.size() < 2 || (item[0] != 'v' && item[0] != 'e')
          || item.find_first_not_of("0123456789", 1) != std::string::npos) {
        throw domain_error("bad cell '" + item + "' (expected vN or eN)");
      }
      (item[0] == 'v' ? out.vertices : out.edges).push_back(std::stoul(item.substr(1)));
    }
    return out;
  }

  inline Json core_json(CoreReport const& c) {
    auto const& g  = c.cover.base();
    auto const& ba = g.alphabet();
    Json        vs = Json::array();
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
      auto const& cv = c.cover.vertices()[c.vertices[i]];
      auto const& vg = g.vertices()[cv.base_vertex];
      vs.push_back({{"id", c.vertices[i]},
                    {"base_vertex", vg.label()},
                    {"subgroup", words_json(cv.subgroup, vg.alphabet())},
                    {"tree_word", format_word(c.tree_words[i], ba)}});
    }
    Json es = Json::array();
    for (auto const& e : c.edges) {
      es.push_back({{"id", e.id},
                    {"from", e.from},
                    {"to", e.to},
                    {"base_edge", e.base_edge},
                    {"tree", e.tree},
                    {"stabilizer_rank", e.stabilizer.basis.size()},
                    {"stabilizer_exact", e.stabilizer.exact}});
    }
    Json ps = Json::array();
    for (auto const& p : c.pieces) {
      ps.push_back({{"edge", c.edges[p.edge].id}, {"kind", to_string(p.kind)}, {"stabilizer_rank", p.stabilizer_rank},
                    {"exact", p.exact}});
    }
    Json out{{"vertices", vs},
             {"edges", es},
             {"pieces", ps},
             {"pi1", format_presentation(c.pi1)},
             {"pi1_complete", c.pi1_complete},
             {"realization", hom_json(c.realization)},
             {"generators", words_json(c.generators, ba)},
             {"loop_expressions", words_json(c.loop_expressions, c.realization.source())},
             {"euler_characteristic", c.euler_characteristic},
             {"graph_betti", c.graph_betti},
             {"vertex_ranks", c.vertex_ranks},
             {"vertex_ranks_exact", c.vertex_ranks_exact},
             {"rank", c.rank_estimate},
             {"free_exact", c.free_exact}};
    out["index"] = c.index ? Json(*c.index) : Json(nullptr);
    out["rank_history"]     = c.rank_history;
    out["stabilized"]       = c.stabilized;
    out["criterion"]        = c.criterion;
    out["exact"]            = c.exact;
    out["required_covered"] = c.required_covered;
    out["canonical"]        = c.canonical;
    out["warnings"]         = c.warnings;
    return out;
  }

  inline ReportStatus core(Input const& in, std::string const& gens, std::size_t depth,
                           std::string const& require, std::size_t budget, Json& r) {
    auto const& t     = in.tower;
    auto const  cover = expand_cover(t, word_list(gens, t.alphabet()), depth, budget);
    auto const  c     = extract_core(cover, parse_cells(require));
    r["core"]         = core_json(c);
    bool const covered = std::all_of(c.required_covered.begin(), c.required_covered.end(), [](bool b) { return b; });
    return c.exact && covered ? ReportStatus::complete : ReportStatus::partial;
  }

  inline Json hypothesis_json(HypothesisResult const& h, Alphabet const& a) {
    Json pairs = Json::array();
    for (auto const& p : h.pairs) {
      Json item{{"vertex", p.vertex},
                {"u", format_word(p.u, a)},
                {"v", format_word(p.v, a)},
                {"status", to_string(p.status)}};
      item["powers"]      = p.powers ? Json::array({p.powers->first, p.powers->second}) : Json(nullptr);
      item["roots_equal"] = p.roots_equal ? Json(*p.roots_equal) : Json(nullptr);
      item["detail"]      = p.detail;
      pairs.push_back(item);
    }
    return Json{{"name", h.name}, {"status", to_string(h.status)}, {"detail", h.detail}, {"budget", h.budget},
                {"pairs", pairs}};
  }

  inline ReportStatus status_of(HypothesisStatus s) {
    switch (s) {
      case HypothesisStatus::refuted:
        return ReportStatus::refuted;
      case HypothesisStatus::verified_to_budget:
      case HypothesisStatus::budget_limited:
        return ReportStatus::partial;
      default:
        return ReportStatus::complete;
    }
  }

  inline ReportStatus flats(Input const& in, std::optional<std::string> const& gens, std::size_t power_budget,
                            std::size_t budget, Json& r) {
    auto const& t   = in.tower;
    auto const& a   = t.alphabet();
    Json        inv = Json::array();
    for (auto const& f : flat_inventory(t, budget)) {
      inv.push_back({{"rank", f.rank},
                     {"stage", f.stage},
                     {"origin", f.origin},
                     {"gens", words_json(f.gens, a)},
                     {"commute_verified", f.commute_verified},
                     {"certified_rank", f.certified_rank}});
    }
    r["flat_records"] = t.flat_records();
    r["inventory"]    = inv;
    ReportStatus st   = inv.size() == t.flat_records() ? ReportStatus::complete : ReportStatus::refuted;
    for (auto const& f : inv) {
      st = worst(st, f["commute_verified"].get<bool>() ? ReportStatus::complete : ReportStatus::partial);
    }
    if (t.height() == 0) {
      r["isolation"] = nullptr;
      return st;
    }
    std::vector<Word> subgens;
    if (gens) {
      subgens = word_list(*gens, a);
    } else {
      for (std::size_t i = 0; i < a.size(); ++i) {
        subgens.push_back(Word{letter(i)});
      }
    }
    auto const  core = extract_core(expand_cover(t, subgens, 1, budget));
    auto const  kind = t.top().block()->kind();
    auto const  c    = color_vertices(core, kind);
    auto const  iso  = check_isolation_hypotheses(c, t, power_budget, budget);
    Json        cv   = Json::array();
    std::vector<SymbolicBound> phis, psis;
    std::vector<std::string>   diams;
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
      cv.push_back({{"vertex", i}, {"type", to_string(c.vertices[i].type)}, {"color", to_string(c.vertices[i].color)}});
      if (c.vertices[i].color == VertexColor::good) {
        phis.push_back(SymbolicBound::atom("phi_v" + std::to_string(i)));
      } else {
        diams.push_back("diam_v" + std::to_string(i));
      }
    }
    for (std::size_t k = 0; k < c.edges.size(); ++k) {
      if (c.edges[k].rank > 0) {
        psis.push_back(SymbolicBound::atom("psi_e" + std::to_string(k)));
      }
    }
    std::optional<SymbolicBound> psi_prime;
    if (kind == BlockKind::abelian) {
      psi_prime = SymbolicBound::atom("psi_prime");
    }
    r["coloring"]  = {{"top_block", to_string(kind)}, {"vertices", cv}};
    r["isolation"] = {{"power_budget", power_budget},
                      {"h0", hypothesis_json(iso.h0, a)},
                      {"h1", hypothesis_json(iso.h1, a)},
                      {"h2", hypothesis_json(iso.h2, a)}};
    r["isolation_bound"] = compose_isolation_bound(phis, psis, psi_prime, diams).to_string();
    for (auto const* h : {&iso.h0, &iso.h1, &iso.h2}) {
      st = worst(st, status_of(h->status));
    }
    return st;
  }

  inline std::string const selftest_tower = "tower example1 { base { free(a, b) } block A { attach=\"[a,b]\"; letters=t } }";

  inline ReportStatus selftest(Json& r) {
    Json checks = Json::array();
    bool ok     = true;
    auto check  = [&](std::string const& name, bool pass) {
      checks.push_back({{"check", name}, {"pass", pass}});
      ok = ok && pass;
    };
    auto const doc = parse_tower_dsl(selftest_tower);
    check("dsl-round-trip", parse_tower_dsl(print_tower_dsl(doc)) == doc);
    auto const t = build_tower(doc);
    auto const& a = t.alphabet();
    check("relator-trivial", tower_word_problem(t, parse_word("[[a,b],t]", a)) == Verdict::trivial);
    check("commutator-nontrivial", tower_word_problem(t, parse_word("[a,t]", a)) == Verdict::nontrivial);
    auto const cert = find_rf_witness(t, word_list("a;b;t;[a,t]", a), 16, 1);
    check("witness-valid", cert.valid && check_witness(cert));
    auto const free2 = build_tower(parse_tower_dsl("tower w { base { free(a, b) } }"));
    auto const c     = extract_core(expand_cover(free2, word_list("a^2;b;a b a^-1", free2.alphabet()), 1));
    check("index-2-core", c.vertices.size() == 2 && c.rank_estimate == 3 && c.index == std::size_t{2});
    auto const s = SurfacePresentation::closed(2, {"a", "b", "c", "d"});
    check("dehn-relator", dehn_reduce(s, s.relator()).empty());
    r["checks"] = checks;
    return ok ? ReportStatus::complete : ReportStatus::refuted;
  }

  ////////////////////////////////////////////////////////////////////////
  // Entry point
  ////////////////////////////////////////////////////////////////////////

  inline int run_command(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Towers of residually free groups: presentations, word problems, witnesses, cores and flats",
                 "rft"};
    app.require_subcommand(1);
    std::string                file, word, words, splitting, gens, require;
    std::optional<std::size_t> stage;
    std::optional<std::string> flat_gens;
    std::size_t                budget = GraphOfGroups::default_budget, ball = 3, depth = 1, power_budget = 8;
    std::uint64_t              seed = 0;

    auto* present_cmd = app.add_subcommand("present", "print the presentation and graph of a stage");
    present_cmd->add_option("file", file, "tower file")->required();
    present_cmd->add_option("--stage", stage, "stage index (default: top)");

    auto* wp_cmd = app.add_subcommand("wp", "decide whether a word is trivial");
    wp_cmd->add_option("file", file, "tower file")->required();
    wp_cmd->add_option("--word", word, "word")->required();
    wp_cmd->add_option("--budget", budget, "search budget");

    auto* witness_cmd = app.add_subcommand("witness", "find a map to a free group injective on a word set");
    witness_cmd->add_option("file", file, "tower file")->required();
    witness_cmd->add_option("--words", words, "';'-separated words")->required();
    witness_cmd->add_option("--budget", budget, "largest parameter")->required();
    witness_cmd->add_option("--seed", seed, "shuffle seed (0 keeps lexicographic order)");

    auto* embed_cmd = app.add_subcommand("embed", "embed a one-edge splitting into a tower extension");
    embed_cmd->add_option("file", file, "host tower file")->required();
    embed_cmd->add_option("--splitting", splitting, "splitting JSON file")->required();
    embed_cmd->add_option("--ball", ball, "injectivity ball radius")->required();
    embed_cmd->add_option("--budget", budget, "search budget");

    auto* core_cmd = app.add_subcommand("core", "fold a subgroup cover and extract its core");
    core_cmd->add_option("file", file, "tower file")->required();
    core_cmd->add_option("--gens", gens, "';'-separated subgroup generators")->required();
    core_cmd->add_option("--depth", depth, "expansion rounds");
    core_cmd->add_option("--require", require, "';'-separated cover cells vN / eN");
    core_cmd->add_option("--budget", budget, "search budget");

    auto* flats_cmd = app.add_subcommand("flats", "flat inventory and isolation hypotheses");
    flats_cmd->add_option("file", file, "tower file")->required();
    flats_cmd->add_option("--gens", flat_gens, "';'-separated core generators (default: all)");
    flats_cmd->add_option("--power-budget", power_budget, "largest power in coincidence searches");
    flats_cmd->add_option("--budget", budget, "search budget");

    auto* selftest_cmd = app.add_subcommand("selftest", "run built-in checks");

    std::string echo;
    for (auto const& a : args) {
      echo += (echo.empty() ? "" : " ") + a;
    }
    Json r;
    r["tool_version"] = tool_version;
    r["command"]      = echo;

    auto finish = [&](ReportStatus st) {
      r["status"]    = to_string(st);
      r["exit_code"] = exit_code(st);
      out << r.dump(2) << "\n";
      return exit_code(st);
    };

    try {
      std::vector<std::string> rev(args.rbegin(), args.rend());
      app.parse(rev);
    } catch (CLI::CallForHelp const&) {
      out << app.help();
      return 0;
    } catch (CLI::ParseError const& e) {
      err << "rft: " << e.what() << "\n" << app.help();
      r["error"] = {{"kind", "usage"}, {"message", e.what()}};
      return finish(ReportStatus::error);
    }

    try {
      if (selftest_cmd->parsed()) {
        r["input_digest"] = fnv1a_digest(selftest_tower);
        return finish(selftest(r));
      }
      Input const in = load(file, budget);
      std::string digest_input = in.text;
      std::string spec_text;
      if (embed_cmd->parsed()) {
        spec_text = read_text(splitting);
        digest_input += spec_text;
      }
      r["input_digest"] = fnv1a_digest(digest_input);
      r["tower"]        = in.doc.name;
      ReportStatus st   = ReportStatus::complete;
      if (present_cmd->parsed()) {
        st = present(in, stage, r);
      } else if (wp_cmd->parsed()) {
        st = word_problem(in, word, budget, r);
      } else if (witness_cmd->parsed()) {
        st = witness(in, words, budget, seed, r);
      } else if (embed_cmd->parsed()) {
        try {
          st = embed(in, spec_text, ball, budget, r);
        } catch (obligation_error const&) {
          st = ReportStatus::refuted;
        }
      } else if (core_cmd->parsed()) {
        st = core(in, gens, depth, require, budget, r);
      } else if (flats_cmd->parsed()) {
        st = flats(in, flat_gens, power_budget, budget, r);
      }
      return finish(st);
    } catch (parse_error const& e) {
      err << "rft: " << e.what() << "\n";
      r["error"] = {{"kind", "parse"}, {"message", e.what()}, {"line", e.line()}, {"column", e.column()}};
    } catch (nlohmann::json::exception const& e) {
      err << "rft: " << e.what() << "\n";
      r["error"] = {{"kind", "input"}, {"message", e.what()}};
    } catch (std::exception const& e) {
      err << "rft: " << e.what() << "\n";
      r["error"] = {{"kind", "input"}, {"message", e.what()}};
    }
    return finish(ReportStatus::error);
  }

}  // namespace rft::cli
