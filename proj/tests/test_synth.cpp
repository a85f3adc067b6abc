#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "sdlab/content.hpp"
#include "sdlab/graph.hpp"
#include "sdlab/ingest.hpp"
#include "sdlab/innovation.hpp"
#include "sdlab/synth.hpp"
#include "sdlab/team_metrics.hpp"

using namespace sdlab;

TEST_CASE("synth: empty request yields empty corpus and truth") {
    SynthConfig cfg;
    cfg.n_papers = 0;
    const SynthOutput out = generate_corpus(cfg);
    CHECK(out.corpus.empty());
    CHECK(out.truth["papers"].empty());
    CHECK(out.focal_ids.empty());
}

TEST_CASE("synth: same seed reproduces identical bytes") {
    SynthConfig cfg;
    cfg.n_papers = 150;
    cfg.seed = 987;
    cfg.beta_sd = 0.03;
    const SynthOutput a = generate_corpus(cfg);
    const SynthOutput b = generate_corpus(cfg);

    std::ostringstream ca, cb;
    write_corpus_jsonl(a.corpus, ca);
    write_corpus_jsonl(b.corpus, cb);
    CHECK(ca.str() == cb.str());
    CHECK(a.truth.dump() == b.truth.dump());

    SynthConfig other = cfg;
    other.seed = 988;
    const SynthOutput c = generate_corpus(other);
    std::ostringstream cc;
    write_corpus_jsonl(c.corpus, cc);
    CHECK(ca.str() != cc.str());
}

TEST_CASE("synth: output satisfies the record invariants") {
    SynthConfig cfg;
    cfg.n_papers = 200;
    cfg.seed = 55;
    cfg.review_fraction = 0.1;
    const SynthOutput out = generate_corpus(cfg);

    std::ostringstream buffer;
    write_corpus_jsonl(out.corpus, buffer);
    std::istringstream in(buffer.str());
    const ParseResult parsed = parse_corpus(in);
    CHECK(parsed.rejects.empty());
    CHECK(parsed.self_references_removed == 0);
    CHECK(parsed.corpus.size() == out.corpus.size());

    std::set<std::string> ids;
    for (const auto& p : out.corpus.papers) {
        CHECK(ids.insert(p.paper_id).second);  // ids unique corpus-wide
        CHECK(!p.authors.empty());
    }
}

TEST_CASE("synth: pipeline metrics match the planted per-paper truth exactly") {
    SynthConfig cfg;
    cfg.n_papers = 120;
    cfg.seed = 321;
    cfg.beta_sd = 0.02;
    cfg.a_path = 0.3;
    const SynthOutput out = generate_corpus(cfg);

    const CollabGraph collab = CollabGraph::build(out.corpus);
    const CitationGraph citations = CitationGraph::build(out.corpus);
    std::map<std::string, const PaperRecord*> by_id;
    for (const auto& p : out.corpus.papers) by_id[p.paper_id] = &p;
    std::map<std::string, std::string> disc_of;
    for (const auto& p : out.corpus.papers) disc_of[p.paper_id] = p.discipline;

    for (const auto& row : out.truth["papers"]) {
        const std::string id = row["id"].get<std::string>();
        const PaperRecord& focal = *by_id.at(id);

        const PriorNetwork prior = prior_subnetwork(collab, focal.authors, focal.year, cfg.window);
        const TeamStructureMetrics team = team_structure_metrics(prior);
        CHECK(team.team_size == row["k"].get<std::uint32_t>());
        CHECK(team.cc_count == row["c"].get<std::uint32_t>());
        CHECK(team.sd == doctest::Approx(row["sd"].get<double>()).epsilon(1e-12));
        CHECK(team.freshness == doctest::Approx(row["freshness"].get<double>()).epsilon(1e-12));
        CHECK(prior.edges.size() == row["edges"].get<std::size_t>());

        const CdResult cd = cd_index(*citations.node_of(id), citations, 5);
        REQUIRE(cd.cd.has_value());
        CHECK(*cd.cd == doctest::Approx(row["cd"].get<double>()).epsilon(1e-12));

        std::vector<std::string> ref_disciplines;
        for (const auto& ref : focal.references) ref_disciplines.push_back(disc_of.at(ref));
        const DiResult di = disciplinary_integration(ref_disciplines);
        REQUIRE(di.di.has_value());
        CHECK(*di.di == doctest::Approx(row["di"].get<double>()).epsilon(1e-12));

        CHECK(title_word_count(focal.title) == row["twc"].get<int>());
    }
}

TEST_CASE("synth: intra-group density is honored within binomial noise") {
    SynthConfig cfg;
    cfg.n_papers = 800;
    cfg.seed = 77;
    cfg.intra_group_density = 0.4;
    const SynthOutput out = generate_corpus(cfg);

    const double optional_pairs = out.truth["derived"]["total_optional_pairs"].get<double>();
    const double extra = out.truth["derived"]["total_extra_edges"].get<double>();
    REQUIRE(optional_pairs > 100);
    const double expected = cfg.intra_group_density * optional_pairs;
    const double sd = std::sqrt(optional_pairs * cfg.intra_group_density *
                                (1.0 - cfg.intra_group_density));
    CHECK(std::fabs(extra - expected) <= 3.0 * sd);
}

TEST_CASE("synth: infeasible configurations are rejected") {
    SynthConfig cfg;
    cfg.n_papers = 100;
    SUBCASE("density above one") {
        cfg.intra_group_density = 1.5;
        CHECK_THROWS_AS(generate_corpus(cfg), ConfigError);
    }
    SUBCASE("window out of range") {
        cfg.window = 9;
        CHECK_THROWS_AS(generate_corpus(cfg), ConfigError);
    }
    SUBCASE("planted variance exceeding the normalized budget") {
        cfg.gamma_twc = 0.9;
        cfg.gamma_promo = 0.9;
        CHECK_THROWS_AS(generate_corpus(cfg), ConfigError);
    }
    SUBCASE("team sizes") {
        cfg.team_min = 1;
        CHECK_THROWS_AS(generate_corpus(cfg), ConfigError);
    }
}

TEST_CASE("synth: treated labels mark the planted quartile jump") {
    SynthConfig cfg;
    cfg.n_papers = 400;
    cfg.seed = 31;
    cfg.att_jump = 0.5;
    cfg.gamma_twc = 0.5;
    cfg.confounder_strength = 0.8;
    const SynthOutput out = generate_corpus(cfg);

    int treated = 0, control = 0, mid = 0;
    for (const auto& row : out.truth["papers"]) {
        const int flag = row["treated"].get<int>();
        if (flag == 1) ++treated;
        else if (flag == 0) ++control;
        else ++mid;
    }
    CHECK(treated == 100);
    CHECK(control == 100);
    CHECK(mid == 200);
    CHECK(out.truth["derived"]["tau"].get<double>() > 0.0);
}
