#include "sdlab/causal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "sdlab/dists.hpp"
#include "sdlab/parallel.hpp"
#include "sdlab/rng.hpp"

namespace sdlab {

std::vector<int> quantile_groups(const std::vector<double>& values,
                                 const std::vector<std::string>& ids, int k) {
    if (k < 2) throw StatError("quantile_groups: k must be >= 2");
    const std::size_t n = values.size();
    if (ids.size() != n) throw StatError("quantile_groups: ids and values differ in length");
    if (n < static_cast<std::size_t>(k))
        throw StatError("quantile_groups: fewer values than groups");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return ids[a] < ids[b];
    });

    // Equal counts; the remainder goes to the lowest bins.
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t rem = n % static_cast<std::size_t>(k);
    std::vector<int> labels(n, 0);
    std::size_t pos = 0;
    for (int g = 1; g <= k; ++g) {
        const std::size_t size = base + (static_cast<std::size_t>(g) <= rem ? 1 : 0);
        if (size == 0)
            throw StatError("quantile_groups: bin " + std::to_string(g) + " would be empty");
        for (std::size_t i = 0; i < size; ++i) labels[order[pos++]] = g;
    }
    return labels;
}

bool MatchReport::balanced(double threshold) const {
    for (const SmdEntry& e : balance)
        if (e.after && std::fabs(*e.after) >= threshold) return false;
    return true;
}

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

std::optional<double> smd_value(const std::vector<double>& treated,
                                const std::vector<double>& control) {
    if (treated.empty() || control.empty()) return std::nullopt;
    const auto moments = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
        return std::pair<double, double>{mean, var};
    };
    const auto [mt, vt] = moments(treated);
    const auto [mc, vc] = moments(control);
    const double pooled = std::sqrt(0.5 * (vt + vc));
    if (!(pooled > 0.0)) return std::nullopt;
    return (mt - mc) / pooled;
}

std::vector<MatchedPair> greedy_nn_match(std::vector<MatchUnit> treated,
                                         const std::vector<MatchUnit>& controls,
                                         std::optional<double> caliper_logit,
                                         std::size_t* n_unmatched) {
    std::sort(treated.begin(), treated.end(), [](const MatchUnit& a, const MatchUnit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    std::vector<std::size_t> control_order(controls.size());
    std::iota(control_order.begin(), control_order.end(), 0);
    std::sort(control_order.begin(), control_order.end(), [&](std::size_t a, std::size_t b) {
        if (controls[a].score != controls[b].score) return controls[a].score < controls[b].score;
        return controls[a].id < controls[b].id;
    });
    // Pool keyed by (score, rank); rank encodes the id tie-break.
    std::set<std::pair<double, std::size_t>> pool;
    for (std::size_t rank = 0; rank < control_order.size(); ++rank)
        pool.emplace(controls[control_order[rank]].score, rank);

    std::vector<MatchedPair> pairs;
    std::size_t unmatched = 0;
    for (const MatchUnit& t : treated) {
        if (pool.empty()) {
            ++unmatched;
            continue;
        }
        auto it = pool.lower_bound({t.score, 0});
        std::optional<decltype(it)> best;
        if (it != pool.end()) best = it;
        if (it != pool.begin()) {
            auto prev = std::prev(it);
            if (!best || std::fabs(prev->first - t.score) <= std::fabs((*best)->first - t.score))
                best = prev;  // ties prefer the lower score
        }
        const MatchUnit& c = controls[control_order[(*best)->second]];
        if (caliper_logit && std::fabs(logit(t.score) - logit(c.score)) > *caliper_logit) {
            ++unmatched;
            continue;
        }
        pairs.push_back({t.row, c.row, std::fabs(t.score - c.score)});
        pool.erase(*best);
    }
    if (n_unmatched) *n_unmatched = unmatched;
    return pairs;
}

AttEstimate att_estimate(const std::vector<double>& pair_gaps, int n_bootstrap, std::uint64_t seed,
                         int threads) {
    AttEstimate est;
    est.n_pairs = pair_gaps.size();
    est.n_bootstrap = static_cast<std::size_t>(n_bootstrap);
    if (pair_gaps.empty()) throw StatError("att_estimate: no matched pairs");

    double sum = 0.0;
    for (double g : pair_gaps) sum += g;
    est.att = sum / static_cast<double>(pair_gaps.size());

    std::vector<double> replicates(static_cast<std::size_t>(n_bootstrap));
    parallel_for(replicates.size(), threads, [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        double s = 0.0;
        for (std::size_t i = 0; i < pair_gaps.size(); ++i) s += pair_gaps[rng.below(pair_gaps.size())];
        replicates[b] = s / static_cast<double>(pair_gaps.size());
    });
    std::sort(replicates.begin(), replicates.end());
    est.lo = quantile(replicates, 0.025);
    est.hi = quantile(replicates, 0.975);

    // Two-sided percentile bootstrap p for H0: ATT = 0.
    std::size_t le = 0, ge = 0;
    for (double r : replicates) {
        if (r <= 0.0) ++le;
        if (r >= 0.0) ++ge;
    }
    const double denom = static_cast<double>(n_bootstrap + 1);
    const double p_le = (1.0 + static_cast<double>(le)) / denom;
    const double p_ge = (1.0 + static_cast<double>(ge)) / denom;
    est.p = std::min(1.0, 2.0 * std::min(p_le, p_ge));
    return est;
}

MatchReport psm_match(const DataTable& rows, const std::vector<int>& treated,
                      const PsmOptions& options) {
    if (treated.size() != rows.rows()) throw StatError("psm_match: flag vector length mismatch");

    // Rows entering the propensity model.
    std::vector<std::size_t> subset;
    for (std::size_t r = 0; r < rows.rows(); ++r)
        if (treated[r] == 0 || treated[r] == 1) subset.push_back(r);
    if (subset.empty()) throw StatError("psm_match: nothing to match");

    DataTable model_table = rows.select_rows(subset);
    std::vector<double> label(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i)
        label[i] = treated[subset[i]] == 1 ? 1.0 : 0.0;
    model_table.add_num("__treated", std::move(label));

    ModelSpec spec;
    spec.outcome = "__treated";
    spec.predictors = options.covariates;
    spec.fixed_effects = options.fixed_effects;
    const Design design = build_design(model_table, spec);

    MatchReport report;
    report.n_dropped_rows = design.n_dropped;

    const LogisticResult logit_fit = logistic_fit(design.X, design.y);
    report.propensity_converged = logit_fit.converged;
    for (const std::string& w : logit_fit.warnings) report.warnings.push_back(w);

    // Design rows split by arm; scores aligned with design rows.
    std::vector<MatchUnit> treated_units, control_units;
    const auto& ids = rows.text(options.id_column);
    for (Eigen::Index i = 0; i < design.y.size(); ++i) {
        const std::size_t local = design.row_index[static_cast<std::size_t>(i)];
        const std::size_t table_row = subset[local];
        MatchUnit u{table_row, logit_fit.fitted(i), ids[table_row]};
        (design.y(i) == 1.0 ? treated_units : control_units).push_back(std::move(u));
    }
    report.n_treated = treated_units.size();
    report.n_control_pool = control_units.size();
    if (control_units.empty()) throw StatError("psm_match: empty control pool");

    std::optional<double> caliper;
    if (options.caliper_mult) {
        std::vector<double> logits;
        logits.reserve(treated_units.size() + control_units.size());
        for (const MatchUnit& u : treated_units) logits.push_back(logit(u.score));
        for (const MatchUnit& u : control_units) logits.push_back(logit(u.score));
        double mean = 0.0;
        for (double v : logits) mean += v;
        mean /= static_cast<double>(logits.size());
        double ss = 0.0;
        for (double v : logits) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(logits.size() - 1));
        caliper = *options.caliper_mult * sd;
    }

    report.pairs = greedy_nn_match(treated_units, control_units, caliper,
                                   &report.n_unmatched_treated);

    // Balance diagnostics for every covariate, before and after matching.
    for (const std::string& cov : options.covariates) {
        const auto& col = rows.num(cov);
        std::vector<double> bt, bc, at, ac;
        for (const MatchUnit& u : treated_units)
            if (!std::isnan(col[u.row])) bt.push_back(col[u.row]);
        for (const MatchUnit& u : control_units)
            if (!std::isnan(col[u.row])) bc.push_back(col[u.row]);
        for (const MatchedPair& p : report.pairs) {
            if (!std::isnan(col[p.treated_row])) at.push_back(col[p.treated_row]);
            if (!std::isnan(col[p.control_row])) ac.push_back(col[p.control_row]);
        }
        SmdEntry entry;
        entry.covariate = cov;
        entry.before = smd_value(bt, bc);
        entry.after = smd_value(at, ac);
        if (!entry.after)
            report.warnings.push_back("smd missing for covariate " + cov + " (zero pooled sd)");
        report.balance.push_back(std::move(entry));
    }

    if (report.pairs.empty()) throw StatError("psm_match: no pairs survived matching");
    if (report.pairs.size() < 30)
        report.warnings.push_back("fewer than 30 matched pairs; bootstrap CI may be unreliable");

    const auto& outcome = rows.num(options.outcome);
    std::vector<double> gaps;
    gaps.reserve(report.pairs.size());
    for (const MatchedPair& p : report.pairs) {
        const double yt = outcome[p.treated_row];
        const double yc = outcome[p.control_row];
        if (!std::isnan(yt) && !std::isnan(yc)) gaps.push_back(yt - yc);
    }
    report.att = att_estimate(gaps, options.n_bootstrap, options.seed, options.threads);
    return report;
}

MatchReport psm_quartile(const DataTable& rows, const std::string& treatment_var,
                         const PsmOptions& options) {
    const auto& values = rows.num(treatment_var);
    const auto& ids = rows.text(options.id_column);
    std::vector<double> clean;
    std::vector<std::string> clean_ids;
    std::vector<std::size_t> clean_rows;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        if (std::isnan(values[r])) continue;
        clean.push_back(values[r]);
        clean_ids.push_back(ids[r]);
        clean_rows.push_back(r);
    }
    const auto labels = quantile_groups(clean, clean_ids, 4);
    std::vector<int> flags(rows.rows(), -1);
    for (std::size_t i = 0; i < clean_rows.size(); ++i) {
        if (labels[i] == 4) flags[clean_rows[i]] = 1;
        if (labels[i] == 1) flags[clean_rows[i]] = 0;
    }
    return psm_match(rows, flags, options);
}

std::vector<DecileSweepEntry> psm_decile_sweep(const DataTable& rows,
                                               const std::string& treatment_var,
                                               const PsmOptions& options) {
    const auto& values = rows.num(treatment_var);
    const auto& ids = rows.text(options.id_column);
    std::vector<double> clean;
    std::vector<std::string> clean_ids;
    std::vector<std::size_t> clean_rows;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        if (std::isnan(values[r])) continue;
        clean.push_back(values[r]);
        clean_ids.push_back(ids[r]);
        clean_rows.push_back(r);
    }
    const auto labels = quantile_groups(clean, clean_ids, 10);

    std::vector<DecileSweepEntry> sweep;
    for (int pair = 1; pair <= 5; ++pair) {
        const int upper = 11 - pair;
        const int lower = pair;
        std::vector<int> flags(rows.rows(), -1);
        for (std::size_t i = 0; i < clean_rows.size(); ++i) {
            if (labels[i] == upper) flags[clean_rows[i]] = 1;
            if (labels[i] == lower) flags[clean_rows[i]] = 0;
        }
        PsmOptions sub = options;
        sub.seed = derive_seed(options.seed, static_cast<std::uint64_t>(pair));
        const MatchReport report = psm_match(rows, flags, sub);
        DecileSweepEntry entry;
        entry.pair = pair;
        entry.upper_decile = upper;
        entry.lower_decile = lower;
        entry.att = report.att;
        entry.balanced = report.balanced();
        sweep.push_back(entry);
    }
    return sweep;
}

PrepostReport prepost_report(const DataTable& rows, const PrepostOptions& options) {
    const auto& year = rows.num("year");
    const auto& cc = rows.num("cc_count");
    const auto& sd = rows.num("sd");
    const auto& cd_norm = rows.num("cd_norm");
    const auto& cd_raw = rows.num("cd_raw");

    std::vector<std::size_t> pre, post;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        if (std::isnan(year[r])) continue;
        const int y = static_cast<int>(year[r]);
        if (y >= options.pre_lo && y <= options.pre_hi) pre.push_back(r);
        if (y >= options.post_lo && y <= options.post_hi) post.push_back(r);
    }
    if (pre.empty()) throw StatError("prepost_report: no rows in the pre period");
    if (post.empty()) throw StatError("prepost_report: no rows in the post period");

    PrepostReport report;
    report.n_pre = pre.size();
    report.n_post = post.size();

    const auto collect = [](const std::vector<std::size_t>& idx, const std::vector<double>& col) {
        std::vector<double> out;
        out.reserve(idx.size());
        for (std::size_t r : idx)
            if (!std::isnan(col[r])) out.push_back(col[r]);
        return out;
    };

    const auto cc_pre = collect(pre, cc);
    const auto cc_post = collect(post, cc);
    const auto histogram = [](const std::vector<double>& v) {
        std::map<int, std::size_t> counts;
        for (double x : v) ++counts[static_cast<int>(x)];
        std::vector<std::pair<int, double>> pct;
        for (const auto& [value, count] : counts)
            pct.emplace_back(value, 100.0 * static_cast<double>(count) / static_cast<double>(v.size()));
        return pct;
    };
    report.cc_pct_pre = histogram(cc_pre);
    report.cc_pct_post = histogram(cc_post);
    const auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    report.mean_cc_pre = mean(cc_pre);
    report.mean_cc_post = mean(cc_post);
    report.mwu_cc = mann_whitney_u(cc_pre, cc_post);

    const auto sd_pre = collect(pre, sd);
    const auto sd_post = collect(post, sd);
    report.mwu_sd = mann_whitney_u(sd_pre, sd_post);

    report.ttest_cd_norm = t_test_welch(collect(pre, cd_norm), collect(post, cd_norm));
    report.ttest_cd_raw = t_test_welch(collect(pre, cd_raw), collect(post, cd_raw));

    report.kde_grid = options.kde_grid;
    if (report.kde_grid.empty()) {
        for (int i = 0; i <= 100; ++i) report.kde_grid.push_back(static_cast<double>(i) / 100.0);
    }
    report.kde_sd_pre = gaussian_kde(sd_pre, report.kde_grid);
    report.kde_sd_post = gaussian_kde(sd_post, report.kde_grid);
    return report;
}

MediationResult mediation_analysis(const DataTable& rows, const MediationOptions& options) {
    // One listwise-complete sample shared by all three models keeps the
    // c = c' + a*b identity exact.
    std::vector<std::string> needed = {options.exposure, options.mediator, options.outcome};
    needed.insert(needed.end(), options.controls.begin(), options.controls.end());
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        bool ok = true;
        for (const std::string& c : needed)
            if (std::isnan(rows.num(c)[r])) {
                ok = false;
                break;
            }
        for (const std::string& key : options.fixed_effects) {
            if (rows.is_text(key)) {
                if (rows.text(key)[r].empty()) ok = false;
            } else if (std::isnan(rows.num(key)[r])) {
                ok = false;
            }
        }
        if (ok) keep.push_back(r);
    }
    const DataTable sample = rows.select_rows(keep);

    ModelSpec m_spec;  // M ~ X + C
    m_spec.outcome = options.mediator;
    m_spec.predictors = options.controls;
    m_spec.predictors.insert(m_spec.predictors.begin(), options.exposure);
    m_spec.fixed_effects = options.fixed_effects;

    ModelSpec y_spec;  // Y ~ X + M + C
    y_spec.outcome = options.outcome;
    y_spec.predictors = options.controls;
    y_spec.predictors.insert(y_spec.predictors.begin(), options.mediator);
    y_spec.predictors.insert(y_spec.predictors.begin(), options.exposure);
    y_spec.fixed_effects = options.fixed_effects;

    ModelSpec t_spec;  // Y ~ X + C
    t_spec.outcome = options.outcome;
    t_spec.predictors = options.controls;
    t_spec.predictors.insert(t_spec.predictors.begin(), options.exposure);
    t_spec.fixed_effects = options.fixed_effects;

    const Design m_design = build_design(sample, m_spec);
    const Design y_design = build_design(sample, y_spec);
    const Design t_design = build_design(sample, t_spec);

    const RegressionResult m_fit = ols_fit(m_design);
    const RegressionResult y_fit = ols_fit(y_design);
    const RegressionResult t_fit = ols_fit(t_design);

    MediationResult result;
    result.n_obs = m_fit.n_obs;
    result.a = m_fit.term(options.exposure).beta;
    result.p_a = m_fit.term(options.exposure).p;
    result.b = y_fit.term(options.mediator).beta;
    result.p_b = y_fit.term(options.mediator).p;
    result.c_direct = y_fit.term(options.exposure).beta;
    result.c_total = t_fit.term(options.exposure).beta;
    result.p_total = t_fit.term(options.exposure).p;
    result.indirect = result.a * result.b;
    if (std::fabs(result.c_total) >= 1e-10)
        result.proportion_mediated = result.indirect / result.c_total;

    // Bootstrap the indirect effect: resample rows, refit the a and b models.
    const std::size_t n = m_design.row_index.size();
    const auto refit_indirect = [&](Rng& rng) -> std::optional<double> {
        std::vector<Eigen::Index> draw(n);
        for (std::size_t i = 0; i < n; ++i) draw[i] = static_cast<Eigen::Index>(rng.below(n));
        Design md;
        md.X.resize(static_cast<Eigen::Index>(n), m_design.X.cols());
        md.y.resize(static_cast<Eigen::Index>(n));
        md.term_names = m_design.term_names;
        Design yd;
        yd.X.resize(static_cast<Eigen::Index>(n), y_design.X.cols());
        yd.y.resize(static_cast<Eigen::Index>(n));
        yd.term_names = y_design.term_names;
        for (std::size_t i = 0; i < n; ++i) {
            md.X.row(static_cast<Eigen::Index>(i)) = m_design.X.row(draw[i]);
            md.y(static_cast<Eigen::Index>(i)) = m_design.y(draw[i]);
            yd.X.row(static_cast<Eigen::Index>(i)) = y_design.X.row(draw[i]);
            yd.y(static_cast<Eigen::Index>(i)) = y_design.y(draw[i]);
        }
        try {
            const RegressionResult mf = ols_fit(md);
            const RegressionResult yf = ols_fit(yd);
            return mf.term(options.exposure).beta * yf.term(options.mediator).beta;
        } catch (const StatError&) {
            return std::nullopt;  // degenerate resample (e.g. an FE level vanished)
        }
    };

    std::vector<std::optional<double>> replicates(static_cast<std::size_t>(options.n_bootstrap));
    parallel_for(replicates.size(), options.threads, [&](std::size_t b) {
        Rng rng(derive_seed(options.seed, b));
        replicates[b] = refit_indirect(rng);
    });

    std::vector<double> ok;
    ok.reserve(replicates.size());
    for (const auto& r : replicates) {
        if (r)
            ok.push_back(*r);
        else
            ++result.n_bootstrap_failed;
    }
    result.n_bootstrap = ok.size();
    if (ok.size() >= 10) {
        std::sort(ok.begin(), ok.end());
        result.indirect_lo = quantile(ok, 0.025);
        result.indirect_hi = quantile(ok, 0.975);
        std::size_t le = 0, ge = 0;
        for (double r : ok) {
            if (r <= 0.0) ++le;
            if (r >= 0.0) ++ge;
        }
        const double denom = static_cast<double>(ok.size() + 1);
        result.indirect_p = std::min(
            1.0, 2.0 * std::min((1.0 + static_cast<double>(le)) / denom,
                                (1.0 + static_cast<double>(ge)) / denom));
    }
    return result;
}

}  // namespace sdlab
