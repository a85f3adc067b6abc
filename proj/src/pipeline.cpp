#include "sdlab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "sdlab/causal.hpp"
#include "sdlab/graph.hpp"
#include "sdlab/innovation.hpp"
#include "sdlab/parallel.hpp"
#include "sdlab/stats.hpp"
#include "sdlab/synth.hpp"
#include "sdlab/team_metrics.hpp"

namespace sdlab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double opt_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

std::string group_key(const MetricsOptions& options, int year, const std::string& discipline) {
    if (options.normalize_groups == "year") return std::to_string(year);
    if (options.normalize_groups == "discipline") return discipline;
    if (options.normalize_groups == "year_discipline")
        return std::to_string(year) + "|" + discipline;
    throw ConfigError("metrics: unknown normalize_groups value: " + options.normalize_groups);
}

}  // namespace

std::vector<std::string> default_controls() {
    return {"title_word_count", "flesch",        "promo_pct",    "log_team_size",
            "freshness",        "career_age",    "career_age_sq", "inst_h_index",
            "log_pub_count"};
}

DataTable compute_metric_rows(const Corpus& corpus, const MetricsOptions& options,
                              const PromoLexicon& lexicon, const HIndexTable* h_index) {
    // Graphs and career profiles come from the full corpus; the analysis
    // filters below only shape the emitted rows.
    const AuthorProfileMap profiles = build_author_profiles(corpus, h_index);
    CollabGraph::BuildOptions collab_options;
    collab_options.team_size_cap = options.team_size_cap;
    const CollabGraph collab = CollabGraph::build(corpus, collab_options);
    const CitationGraph citations = CitationGraph::build(corpus);

    Corpus analysis = options.research_only ? filter_research_articles(corpus) : corpus;
    if (options.traceable_only)
        analysis = filter_traceable_history(analysis, profiles, options.window_years);
    if (options.nsf_only || options.discipline_filter || options.year_lo || options.year_hi) {
        Corpus filtered;
        for (PaperRecord& p : analysis.papers) {
            if (options.nsf_only && !p.nsf_funded) continue;
            if (options.discipline_filter && p.discipline != *options.discipline_filter) continue;
            if (options.year_lo && p.year < *options.year_lo) continue;
            if (options.year_hi && p.year > *options.year_hi) continue;
            filtered.papers.push_back(std::move(p));
        }
        analysis = std::move(filtered);
    }

    const std::size_t n = analysis.papers.size();
    std::vector<std::string> col_id(n), col_disc(n);
    std::vector<double> col_year(n), col_nsf(n), col_team(n), col_logk(n), col_cc(n), col_sd(n),
        col_fresh(n), col_density(n), col_clust(n), col_cd_raw(n), col_citers(n), col_zero_ref(n),
        col_di(n), col_di_known(n), col_di_unknown(n), col_twc(n), col_flesch(n), col_promo(n),
        col_age(n), col_age_sq(n), col_h(n), col_logpubs(n);

    parallel_for(n, options.threads, [&](std::size_t i) {
        const PaperRecord& p = analysis.papers[i];
        col_id[i] = p.paper_id;
        col_disc[i] = p.discipline;
        col_year[i] = p.year;
        col_nsf[i] = p.nsf_funded ? 1.0 : 0.0;

        const PriorNetwork prior =
            prior_subnetwork(collab, p.authors, p.year, options.window_years);
        const TeamStructureMetrics team = team_structure_metrics(prior);
        col_team[i] = team.team_size;
        col_logk[i] = std::log(static_cast<double>(team.team_size));
        col_cc[i] = team.cc_count;
        col_sd[i] = team.sd;
        col_fresh[i] = team.freshness;
        col_density[i] = opt_or_nan(team.edge_density);
        col_clust[i] = opt_or_nan(team.clustering);

        const auto node = citations.node_of(p.paper_id);
        const CdResult cd = cd_index(*node, citations, options.cd_window_years);
        col_cd_raw[i] = opt_or_nan(cd.cd);
        col_citers[i] = cd.citer_count;
        col_zero_ref[i] = cd.zero_reference_focal ? 1.0 : 0.0;

        col_twc[i] = title_word_count(p.title);
        col_flesch[i] = opt_or_nan(flesch_reading_ease(p.title));
        col_promo[i] = opt_or_nan(promotional_fraction(p.title, lexicon));

        const AuthorRef& last = p.authors.back();
        const AuthorProfile& prof = profiles.at(last.author_id);
        const double age = static_cast<double>(p.year - prof.first_pub_year);
        col_age[i] = age;
        col_age_sq[i] = age * age;
        col_logpubs[i] = std::log1p(static_cast<double>(prof.pubs_through(p.year)));
        if (last.institution_id && h_index) {
            col_h[i] = h_index->lookup(*last.institution_id);
        } else {
            col_h[i] = prof.institution_h_index;
        }
    });

    // Integration needs disciplines of the referenced records.
    {
        std::unordered_map<std::string, const std::string*> disc_of;
        disc_of.reserve(corpus.papers.size() * 2);
        for (const PaperRecord& p : corpus.papers) disc_of.emplace(p.paper_id, &p.discipline);
        parallel_for(n, options.threads, [&](std::size_t i) {
            const PaperRecord& p = analysis.papers[i];
            std::vector<std::string> ref_disciplines;
            ref_disciplines.reserve(p.references.size());
            for (const std::string& ref : p.references) {
                auto it = disc_of.find(ref);
                ref_disciplines.push_back(it != disc_of.end() ? *it->second : std::string{});
            }
            const DiResult di = disciplinary_integration(ref_disciplines);
            col_di[i] = opt_or_nan(di.di);
            col_di_known[i] = di.known_refs;
            col_di_unknown[i] = di.unknown_refs;
        });
    }

    // Sample-level standardizations.
    std::vector<double> sd_std(n, kNaN);
    if (n >= 2) {
        const std::vector<double> z = standardize(col_sd);
        sd_std = z;
    }
    std::vector<std::optional<double>> cd_opt(n);
    std::vector<std::string> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isnan(col_cd_raw[i])) cd_opt[i] = col_cd_raw[i];
        keys[i] = group_key(options, static_cast<int>(col_year[i]), col_disc[i]);
    }
    const auto cd_norm = field_normalize(cd_opt, keys);
    std::vector<double> col_cd_norm(n, kNaN);
    for (std::size_t i = 0; i < n; ++i) col_cd_norm[i] = opt_or_nan(cd_norm[i]);

    DataTable table;
    table.add_text("paper_id", std::move(col_id));
    table.add_num("year", std::move(col_year));
    table.add_text("discipline", std::move(col_disc));
    table.add_num("nsf_funded", std::move(col_nsf));
    table.add_num("team_size", std::move(col_team));
    table.add_num("log_team_size", std::move(col_logk));
    table.add_num("cc_count", std::move(col_cc));
    table.add_num("sd", std::move(col_sd));
    table.add_num("sd_std", std::move(sd_std));
    table.add_num("freshness", std::move(col_fresh));
    table.add_num("edge_density", std::move(col_density));
    table.add_num("clustering", std::move(col_clust));
    table.add_num("cd_raw", std::move(col_cd_raw));
    table.add_num("cd_norm", std::move(col_cd_norm));
    table.add_num("citer_count", std::move(col_citers));
    table.add_num("zero_reference", std::move(col_zero_ref));
    table.add_num("di", std::move(col_di));
    table.add_num("di_known_refs", std::move(col_di_known));
    table.add_num("di_unknown_refs", std::move(col_di_unknown));
    table.add_num("title_word_count", std::move(col_twc));
    table.add_num("flesch", std::move(col_flesch));
    table.add_num("promo_pct", std::move(col_promo));
    table.add_num("career_age", std::move(col_age));
    table.add_num("career_age_sq", std::move(col_age_sq));
    table.add_num("inst_h_index", std::move(col_h));
    table.add_num("log_pub_count", std::move(col_logpubs));
    return table;
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

namespace {

/// Tracks written artifacts; removes them if the run does not complete.
class OutputTracker {
public:
    explicit OutputTracker(std::string out_dir) : dir_(std::move(out_dir)) {
        fs::create_directories(dir_);
    }
    ~OutputTracker() {
        if (!committed_) {
            for (const std::string& p : paths_) {
                std::error_code ec;
                fs::remove(p, ec);
            }
        }
    }
    std::string path(const std::string& name) {
        const std::string full = (fs::path(dir_) / name).string();
        paths_.push_back(full);
        return full;
    }
    RunResult commit() {
        committed_ = true;
        return {paths_};
    }

private:
    std::string dir_;
    std::vector<std::string> paths_;
    bool committed_ = false;
};

void write_manifest(OutputTracker& tracker, const std::string& subcommand, const Config& cfg,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, const json& extra = json::object()) {
    json manifest;
    manifest["subcommand"] = subcommand;
    manifest["config_hash"] = cfg.hash();
    manifest["code_version"] = kVersion;
    manifest["seed"] = cfg.integer("seed", cfg.integer("synth.seed", 0));
    manifest["inputs"] = inputs;
    json outs = json::array();
    for (const std::string& o : outputs) outs.push_back(fs::path(o).filename().string());
    manifest["outputs"] = outs;
    if (!extra.empty()) manifest["stats"] = extra;
    const std::string path = tracker.path("manifest_" + subcommand + ".json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write manifest: " + path);
    out << manifest.dump(1) << '\n';
}

std::string output_stamp(const Config& cfg) {
    return std::string("sdlab ") + kVersion + " config=" + cfg.hash();
}

void stamp_json(json& j, const Config& cfg) {
    j["config_hash"] = cfg.hash();
    j["code_version"] = kVersion;
}

SchemaConfig schema_from(const Config& cfg) {
    SchemaConfig schema;
    schema.year_min = static_cast<int>(cfg.integer("parse.year_min", schema.year_min));
    schema.year_max = static_cast<int>(cfg.integer("parse.year_max", schema.year_max));
    for (const auto& [key, value] : cfg.entries()) {
        const std::string prefix = "parse.map.";
        if (key.rfind(prefix, 0) == 0) schema.field_map[key.substr(prefix.size())] = value;
    }
    return schema;
}

Corpus load_corpus(const Config& cfg, OutputTracker& tracker, std::string* used_path) {
    const std::string path = cfg.require("io.corpus");
    if (used_path) *used_path = path;
    ParseResult parsed = parse_corpus_file(path, schema_from(cfg));
    if (!parsed.rejects.empty()) {
        const std::string rejects_path = tracker.path("rejects.tsv");
        std::ofstream out(rejects_path, std::ios::binary);
        write_rejects_tsv(parsed.rejects, out);
    }
    return std::move(parsed.corpus);
}

MetricsOptions metrics_options_from(const Config& cfg, int threads) {
    MetricsOptions opt;
    opt.window_years = static_cast<int>(cfg.integer("metrics.window_years", opt.window_years));
    opt.cd_window_years =
        static_cast<int>(cfg.integer("metrics.cd_window_years", opt.cd_window_years));
    opt.normalize_groups = cfg.str("metrics.normalize_groups", opt.normalize_groups);
    opt.research_only = cfg.boolean("metrics.research_only", opt.research_only);
    opt.traceable_only = cfg.boolean("metrics.traceable_only", opt.traceable_only);
    opt.nsf_only = cfg.boolean("metrics.nsf_only", opt.nsf_only);
    if (cfg.has("metrics.discipline")) opt.discipline_filter = cfg.str("metrics.discipline");
    if (cfg.has("metrics.year_lo")) opt.year_lo = static_cast<int>(cfg.integer("metrics.year_lo", 0));
    if (cfg.has("metrics.year_hi")) opt.year_hi = static_cast<int>(cfg.integer("metrics.year_hi", 0));
    opt.team_size_cap =
        static_cast<std::uint32_t>(cfg.integer("metrics.team_size_cap", opt.team_size_cap));
    opt.threads = threads;
    return opt;
}

DataTable load_metric_rows(const Config& cfg, const std::string& out_dir, std::string* used_path) {
    const std::string path =
        cfg.str("io.metric_rows", (fs::path(out_dir) / "metric_rows.csv").string());
    if (!fs::exists(path))
        throw ConfigError("metric table not found: " + path +
                          "; run the metrics subcommand first");
    if (used_path) *used_path = path;
    return DataTable::read_csv_file(path);
}

json regression_to_json(const RegressionResult& fit) {
    json j;
    j["n_obs"] = fit.n_obs;
    j["n_dropped"] = fit.n_dropped;
    j["df_resid"] = fit.df_resid;
    j["r_squared"] = fit.r_squared;
    json fe = json::object();
    for (const auto& [key, levels] : fit.fe_levels) fe[key] = levels;
    j["fe_levels"] = fe;
    return j;
}

DataTable regression_to_table(const RegressionResult& fit) {
    std::vector<std::string> names;
    std::vector<double> beta, se, tstat, pval;
    for (const RegressionTerm& t : fit.terms) {
        names.push_back(t.name);
        beta.push_back(t.beta);
        se.push_back(t.se);
        tstat.push_back(t.t);
        pval.push_back(t.p);
    }
    DataTable out;
    out.add_text("term", std::move(names));
    out.add_num("beta", std::move(beta));
    out.add_num("se", std::move(se));
    out.add_num("t", std::move(tstat));
    out.add_num("p", std::move(pval));
    return out;
}

ModelSpec model_spec_from(const Config& cfg, const std::string& section) {
    ModelSpec spec;
    spec.outcome = cfg.str(section + ".outcome", "cd_norm");
    spec.predictors = cfg.list(section + ".predictors");
    if (spec.predictors.empty()) {
        spec.predictors = default_controls();
        spec.predictors.insert(spec.predictors.begin(), "sd_std");
    }
    for (const std::string& pair : cfg.list(section + ".interactions")) {
        const auto colon = pair.find(':');
        if (colon == std::string::npos)
            throw ConfigError("interaction term must be \"a:b\": " + pair);
        spec.interactions.emplace_back(pair.substr(0, colon), pair.substr(colon + 1));
    }
    spec.fixed_effects = cfg.list(section + ".fixed_effects");
    if (!cfg.has(section + ".fixed_effects")) spec.fixed_effects = {"year", "discipline"};
    return spec;
}

int threads_from(const Config& cfg) {
    return static_cast<int>(cfg.integer("threads", 1));
}

}  // namespace

RunResult run_synth(const Config& cfg, const std::string& out_dir) {
    OutputTracker tracker(out_dir);
    const SynthConfig synth_cfg = synth_config_from(cfg);
    SynthOutput output = generate_corpus(synth_cfg);
    const std::string corpus_path = tracker.path("corpus.jsonl");
    const std::string truth_path = tracker.path("truth.json");
    const std::string hindex_path = tracker.path("hindex.tsv");
    write_synth_output(output, corpus_path, truth_path, hindex_path);
    json extra;
    extra["n_focal"] = synth_cfg.n_papers;
    extra["n_records"] = output.corpus.papers.size();
    write_manifest(tracker, "synth", cfg, {}, {corpus_path, truth_path, hindex_path}, extra);
    return tracker.commit();
}

RunResult run_metrics(const Config& cfg, const std::string& out_dir) {
    OutputTracker tracker(out_dir);
    std::string corpus_path;
    const Corpus corpus = load_corpus(cfg, tracker, &corpus_path);

    const std::string lexicon_path = cfg.str("io.lexicon");
    const PromoLexicon lexicon =
        lexicon_path.empty()
            ? PromoLexicon::from_words({"unique", "crucial", "unprecedented"})
            : PromoLexicon::from_file(lexicon_path);

    std::optional<HIndexTable> h_index;
    std::vector<std::string> inputs = {corpus_path};
    if (cfg.has("io.h_index")) {
        h_index = HIndexTable::from_tsv_file(cfg.require("io.h_index"));
        inputs.push_back(cfg.require("io.h_index"));
    }
    if (!lexicon_path.empty()) inputs.push_back(lexicon_path);

    const MetricsOptions options = metrics_options_from(cfg, threads_from(cfg));
    const DataTable rows =
        compute_metric_rows(corpus, options, lexicon, h_index ? &*h_index : nullptr);

    const std::string rows_path = tracker.path("metric_rows.csv");
    rows.write_csv_file(rows_path, output_stamp(cfg));
    json extra;
    extra["n_rows"] = rows.rows();
    extra["n_corpus_records"] = corpus.papers.size();
    write_manifest(tracker, "metrics", cfg, inputs, {rows_path}, extra);
    return tracker.commit();
}

RunResult run_regress(const Config& cfg, const std::string& out_dir) {
    OutputTracker tracker(out_dir);
    std::string rows_path;
    const DataTable rows = load_metric_rows(cfg, out_dir, &rows_path);
    const ModelSpec spec = model_spec_from(cfg, "regress");
    const bool robust = cfg.boolean("regress.robust_se", false);

    const Design design = build_design(rows, spec);
    const RegressionResult fit = ols_fit(design, robust);

    const std::string coef_path = tracker.path("regress_coefficients.csv");
    regression_to_table(fit).write_csv_file(coef_path, output_stamp(cfg));
    json summary = regression_to_json(fit);
    std::vector<std::string> outputs = {coef_path};

    // Optional per-level sweep (one model per discipline, say).
    if (cfg.has("regress.split_by")) {
        const std::string split_col = cfg.require("regress.split_by");
        const auto& values = rows.text(split_col);
        std::vector<std::string> levels;
        for (const std::string& v : values)
            if (!v.empty() && std::find(levels.begin(), levels.end(), v) == levels.end())
                levels.push_back(v);
        std::sort(levels.begin(), levels.end());

        std::vector<std::string> out_level;
        std::vector<double> out_beta, out_se, out_p, out_n;
        const std::string focal_term = cfg.str("regress.split_term", "sd_std");
        ModelSpec sub_spec = spec;
        sub_spec.fixed_effects.erase(
            std::remove(sub_spec.fixed_effects.begin(), sub_spec.fixed_effects.end(), split_col),
            sub_spec.fixed_effects.end());
        for (const std::string& level : levels) {
            std::vector<std::size_t> idx;
            for (std::size_t r = 0; r < rows.rows(); ++r)
                if (values[r] == level) idx.push_back(r);
            const DataTable subset = rows.select_rows(idx);
            try {
                const RegressionResult sub_fit = ols_fit(build_design(subset, sub_spec), robust);
                const RegressionTerm& t = sub_fit.term(focal_term);
                out_level.push_back(level);
                out_beta.push_back(t.beta);
                out_se.push_back(t.se);
                out_p.push_back(t.p);
                out_n.push_back(static_cast<double>(sub_fit.n_obs));
            } catch (const StatError&) {
                out_level.push_back(level);
                out_beta.push_back(kNaN);
                out_se.push_back(kNaN);
                out_p.push_back(kNaN);
                out_n.push_back(static_cast<double>(idx.size()));
            }
        }
        DataTable sweep;
        sweep.add_text(split_col, std::move(out_level));
        sweep.add_num("beta", std::move(out_beta));
        sweep.add_num("se", std::move(out_se));
        sweep.add_num("p", std::move(out_p));
        sweep.add_num("n", std::move(out_n));
        const std::string sweep_path = tracker.path("regress_by_" + split_col + ".csv");
        sweep.write_csv_file(sweep_path, output_stamp(cfg));
        outputs.push_back(sweep_path);
    }

    // Optional margins grid.
    if (cfg.has("regress.margins_var")) {
        const std::string var = cfg.require("regress.margins_var");
        const std::string grid_spec = cfg.str("regress.margins_grid", "-2:2:9");
        double lo = -2, hi = 2;
        int count = 9;
        if (std::sscanf(grid_spec.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 2)
            throw ConfigError("regress.margins_grid must be lo:hi:count");
        std::vector<double> grid;
        for (int i = 0; i < count; ++i)
            grid.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
        const std::string moderator = cfg.str("regress.margins_moderator");
        std::vector<double> levels;
        for (const std::string& s : cfg.list("regress.margins_levels"))
            levels.push_back(std::strtod(s.c_str(), nullptr));

        const auto margins = predict_margins(fit, design, var, grid, moderator, levels);
        std::vector<double> m_level, m_x, m_yhat, m_se, m_lo, m_hi;
        for (const MarginPoint& pt : margins) {
            m_level.push_back(pt.moderator_level);
            m_x.push_back(pt.x);
            m_yhat.push_back(pt.yhat);
            m_se.push_back(pt.se);
            m_lo.push_back(pt.lo);
            m_hi.push_back(pt.hi);
        }
        DataTable margins_table;
        margins_table.add_num("moderator_level", std::move(m_level));
        margins_table.add_num(var, std::move(m_x));
        margins_table.add_num("yhat", std::move(m_yhat));
        margins_table.add_num("se", std::move(m_se));
        margins_table.add_num("ci_lo", std::move(m_lo));
        margins_table.add_num("ci_hi", std::move(m_hi));
        const std::string margins_path = tracker.path("margins.csv");
        margins_table.write_csv_file(margins_path, output_stamp(cfg));
        outputs.push_back(margins_path);
    }

    const std::string summary_path = tracker.path("regress_summary.json");
    {
        stamp_json(summary, cfg);
        std::ofstream out(summary_path, std::ios::binary);
        out << summary.dump(1) << '\n';
    }
    outputs.push_back(summary_path);
    write_manifest(tracker, "regress", cfg, {rows_path}, outputs, summary);
    return tracker.commit();
}

RunResult run_binfit(const Config& cfg, const std::string& out_dir) {
    OutputTracker tracker(out_dir);
    std::string rows_path;
    const DataTable rows = load_metric_rows(cfg, out_dir, &rows_path);
    const auto pairs = cfg.list("binfit.pairs");
    if (pairs.empty()) throw ConfigError("binfit.pairs is required (e.g. sd_std:cd_norm)");
    const std::size_t n_bins = static_cast<std::size_t>(cfg.integer("binfit.n_bins", 20));

    std::vector<std::string> col_pair;
    std::vector<double> col_bin, col_x, col_y;
    std::vector<std::string> fit_pair;
    std::vector<double> fit_slope, fit_intercept, fit_r2, fit_bins;
    for (const std::string& pair : pairs) {
        const auto colon = pair.find(':');
        if (colon == std::string::npos) throw ConfigError("binfit pair must be \"x:y\": " + pair);
        const std::string xname = pair.substr(0, colon);
        const std::string yname = pair.substr(colon + 1);
        const auto& xcol = rows.num(xname);
        const auto& ycol = rows.num(yname);
        std::vector<double> x, y;
        for (std::size_t r = 0; r < rows.rows(); ++r) {
            if (std::isnan(xcol[r]) || std::isnan(ycol[r])) continue;
            x.push_back(xcol[r]);
            y.push_back(ycol[r]);
        }
        const BinnedFit fit = binned_means_fit(x, y, n_bins);
        for (std::size_t b = 0; b < fit.actual_bins; ++b) {
            col_pair.push_back(pair);
            col_bin.push_back(static_cast<double>(b + 1));
            col_x.push_back(fit.bin_mean_x[b]);
            col_y.push_back(fit.bin_mean_y[b]);
        }
        fit_pair.push_back(pair);
        fit_slope.push_back(fit.slope);
        fit_intercept.push_back(fit.intercept);
        fit_r2.push_back(fit.r_squared);
        fit_bins.push_back(static_cast<double>(fit.actual_bins));
    }

    DataTable points;
    points.add_text("pair", std::move(col_pair));
    points.add_num("bin", std::move(col_bin));
    points.add_num("mean_x", std::move(col_x));
    points.add_num("mean_y", std::move(col_y));
    const std::string points_path = tracker.path("binfit_points.csv");
    points.write_csv_file(points_path, output_stamp(cfg));

    DataTable fits;
    fits.add_text("pair", std::move(fit_pair));
    fits.add_num("slope", std::move(fit_slope));
    fits.add_num("intercept", std::move(fit_intercept));
    fits.add_num("r_squared", std::move(fit_r2));
    fits.add_num("bins", std::move(fit_bins));
    const std::string fits_path = tracker.path("binfit_fits.csv");
    fits.write_csv_file(fits_path, output_stamp(cfg));

    write_manifest(tracker, "binfit", cfg, {rows_path}, {points_path, fits_path});
    return tracker.commit();
}

namespace {

json att_to_json(const AttEstimate& att) {
    json j;
    j["att"] = att.att;
    j["ci_lo"] = att.lo;
    j["ci_hi"] = att.hi;
    j["p"] = att.p;
    j["n_pairs"] = att.n_pairs;
    j["n_bootstrap"] = att.n_bootstrap;
    return j;
}

PsmOptions psm_options_from(const Config& cfg, int threads) {
    PsmOptions opt;
    opt.covariates = cfg.list("psm.covariates");
    if (opt.covariates.empty()) {
        opt.covariates = default_controls();
    }
    opt.fixed_effects = cfg.list("psm.fixed_effects");
    if (!cfg.has("psm.fixed_effects")) opt.fixed_effects = {"year"};
    opt.outcome = cfg.str("psm.outcome", "cd_norm");
    const std::string caliper = cfg.str("psm.caliper", "off");
    if (caliper != "off" && !caliper.empty())
        opt.caliper_mult = std::strtod(caliper.c_str(), nullptr);
    opt.n_bootstrap = static_cast<int>(cfg.integer("psm.n_bootstrap", opt.n_bootstrap));
    opt.seed = static_cast<std::uint64_t>(cfg.integer("seed", cfg.integer("psm.seed", 42)));
    opt.threads = threads;
    return opt;
}

}  // namespace

RunResult run_psm(const Config& cfg, const std::string& out_dir, bool require_balance) {
    OutputTracker tracker(out_dir);
    std::string rows_path;
    const DataTable rows = load_metric_rows(cfg, out_dir, &rows_path);
    const PsmOptions options = psm_options_from(cfg, threads_from(cfg));
    const std::string treatment_var = cfg.str("psm.treatment_var", "sd_std");

    const MatchReport report = psm_quartile(rows, treatment_var, options);

    json j;
    j["treatment"] = "top vs bottom quartile of " + treatment_var;
    j["outcome"] = options.outcome;
    j["n_treated"] = report.n_treated;
    j["n_control_pool"] = report.n_control_pool;
    j["n_pairs"] = report.pairs.size();
    j["n_unmatched_treated"] = report.n_unmatched_treated;
    j["propensity_converged"] = report.propensity_converged;
    j["att"] = att_to_json(report.att);
    j["balanced"] = report.balanced();
    json balance = json::array();
    for (const SmdEntry& e : report.balance) {
        json row;
        row["covariate"] = e.covariate;
        if (e.before) row["smd_before"] = *e.before;
        if (e.after) row["smd_after"] = *e.after;
        balance.push_back(row);
    }
    j["balance"] = balance;
    j["warnings"] = report.warnings;

    const std::string report_path = tracker.path("psm_report.json");
    {
        stamp_json(j, cfg);
        std::ofstream out(report_path, std::ios::binary);
        out << j.dump(1) << '\n';
    }
    std::vector<std::string> outputs = {report_path};

    if (cfg.boolean("psm.sweep", true)) {
        const auto sweep = psm_decile_sweep(rows, treatment_var, options);
        std::vector<double> s_pair, s_upper, s_lower, s_att, s_lo, s_hi, s_p, s_pairs;
        for (const DecileSweepEntry& e : sweep) {
            s_pair.push_back(e.pair);
            s_upper.push_back(e.upper_decile);
            s_lower.push_back(e.lower_decile);
            s_att.push_back(e.att.att);
            s_lo.push_back(e.att.lo);
            s_hi.push_back(e.att.hi);
            s_p.push_back(e.att.p);
            s_pairs.push_back(static_cast<double>(e.att.n_pairs));
        }
        DataTable sweep_table;
        sweep_table.add_num("pair", std::move(s_pair));
        sweep_table.add_num("upper_decile", std::move(s_upper));
        sweep_table.add_num("lower_decile", std::move(s_lower));
        sweep_table.add_num("att", std::move(s_att));
        sweep_table.add_num("ci_lo", std::move(s_lo));
        sweep_table.add_num("ci_hi", std::move(s_hi));
        sweep_table.add_num("p", std::move(s_p));
        sweep_table.add_num("n_pairs", std::move(s_pairs));
        const std::string sweep_path = tracker.path("psm_sweep.csv");
        sweep_table.write_csv_file(sweep_path, output_stamp(cfg));
        outputs.push_back(sweep_path);
    }

    write_manifest(tracker, "psm", cfg, {rows_path}, outputs, j);
    RunResult result = tracker.commit();
    if (require_balance && !report.balanced())
        throw DataError("psm: balance requirement failed (|SMD| >= 0.1 after matching)");
    return result;
}

RunResult run_prepost(const Config& cfg, const std::string& out_dir) {
    OutputTracker tracker(out_dir);
    std::string rows_path;
    const DataTable rows = load_metric_rows(cfg, out_dir, &rows_path);

    PrepostOptions options;
    options.pre_lo = static_cast<int>(cfg.integer("prepost.pre_lo", options.pre_lo));
    options.pre_hi = static_cast<int>(cfg.integer("prepost.pre_hi", options.pre_hi));
    options.post_lo = static_cast<int>(cfg.integer("prepost.post_lo", options.post_lo));
    options.post_hi = static_cast<int>(cfg.integer("prepost.post_hi", options.post_hi));

    const PrepostReport report = prepost_report(rows, options);

    json j;
    j["n_pre"] = report.n_pre;
    j["n_post"] = report.n_post;
    j["mean_cc_pre"] = report.mean_cc_pre;
    j["mean_cc_post"] = report.mean_cc_post;
    j["mwu_cc"] = {{"u", report.mwu_cc.u}, {"z", report.mwu_cc.z}, {"p", report.mwu_cc.p}};
    j["mwu_sd"] = {{"u", report.mwu_sd.u}, {"z", report.mwu_sd.z}, {"p", report.mwu_sd.p}};
    const auto ttest_json = [](const TTestResult& t) {
        json out;
        out["t"] = t.t;
        out["df"] = t.df;
        if (t.p) out["p"] = *t.p;
        out["mean_pre"] = t.mean_a;
        out["mean_post"] = t.mean_b;
        return out;
    };
    j["ttest_cd_norm"] = ttest_json(report.ttest_cd_norm);
    j["ttest_cd_raw"] = ttest_json(report.ttest_cd_raw);

    const std::string report_path = tracker.path("prepost_report.json");
    {
        stamp_json(j, cfg);
        std::ofstream out(report_path, std::ios::binary);
        out << j.dump(1) << '\n';
    }

    // Plot-ready CSVs: CC share per period and the SD densities.
    DataTable cc_table;
    {
        std::vector<std::string> period;
        std::vector<double> cc, pct;
        for (const auto& [value, share] : report.cc_pct_pre) {
            period.push_back("pre");
            cc.push_back(value);
            pct.push_back(share);
        }
        for (const auto& [value, share] : report.cc_pct_post) {
            period.push_back("post");
            cc.push_back(value);
            pct.push_back(share);
        }
        cc_table.add_text("period", std::move(period));
        cc_table.add_num("cc", std::move(cc));
        cc_table.add_num("pct", std::move(pct));
    }
    const std::string cc_path = tracker.path("prepost_cc_distribution.csv");
    cc_table.write_csv_file(cc_path, output_stamp(cfg));

    DataTable kde_table;
    {
        std::vector<double> grid = report.kde_grid;
        kde_table.add_num("sd", std::move(grid));
        std::vector<double> pre_density = report.kde_sd_pre;
        std::vector<double> post_density = report.kde_sd_post;
        kde_table.add_num("density_pre", std::move(pre_density));
        kde_table.add_num("density_post", std::move(post_density));
    }
    const std::string kde_path = tracker.path("prepost_sd_kde.csv");
    kde_table.write_csv_file(kde_path, output_stamp(cfg));

    write_manifest(tracker, "prepost", cfg, {rows_path}, {report_path, cc_path, kde_path}, j);
    return tracker.commit();
}

RunResult run_mediate(const Config& cfg, const std::string& out_dir) {
    OutputTracker tracker(out_dir);
    std::string rows_path;
    const DataTable rows = load_metric_rows(cfg, out_dir, &rows_path);

    MediationOptions options;
    options.exposure = cfg.str("mediate.exposure", "sd_std");
    options.mediator = cfg.str("mediate.mediator", "di");
    options.outcome = cfg.str("mediate.outcome", "cd_norm");
    options.controls = cfg.list("mediate.controls");
    options.fixed_effects = cfg.list("mediate.fixed_effects");
    options.n_bootstrap = static_cast<int>(cfg.integer("mediate.n_bootstrap", options.n_bootstrap));
    options.seed = static_cast<std::uint64_t>(cfg.integer("seed", cfg.integer("mediate.seed", 7)));
    options.threads = threads_from(cfg);

    const MediationResult m = mediation_analysis(rows, options);

    json j;
    j["exposure"] = options.exposure;
    j["mediator"] = options.mediator;
    j["outcome"] = options.outcome;
    j["n_obs"] = m.n_obs;
    j["a"] = m.a;
    j["p_a"] = m.p_a;
    j["b"] = m.b;
    j["p_b"] = m.p_b;
    j["total"] = m.c_total;
    j["p_total"] = m.p_total;
    j["direct"] = m.c_direct;
    j["indirect"] = m.indirect;
    j["indirect_ci_lo"] = m.indirect_lo;
    j["indirect_ci_hi"] = m.indirect_hi;
    j["indirect_p"] = m.indirect_p;
    if (m.proportion_mediated) j["proportion_mediated"] = *m.proportion_mediated;
    j["n_bootstrap"] = m.n_bootstrap;
    j["n_bootstrap_failed"] = m.n_bootstrap_failed;

    const std::string path = tracker.path("mediation.json");
    {
        stamp_json(j, cfg);
        std::ofstream out(path, std::ios::binary);
        out << j.dump(1) << '\n';
    }
    write_manifest(tracker, "mediate", cfg, {rows_path}, {path}, j);
    return tracker.commit();
}

}  // namespace sdlab
