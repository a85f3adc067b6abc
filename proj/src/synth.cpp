#include "sdlab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "sdlab/causal.hpp"
#include "sdlab/config.hpp"
#include "sdlab/dists.hpp"
#include "sdlab/rng.hpp"
#include "sdlab/team_metrics.hpp"

namespace sdlab {

using nlohmann::json;

namespace {

/// Scale mapping the planted normalized outcome onto the raw [-1, 1]
/// disruption range; ~3.3 sigma of headroom before clamping.
constexpr double kNormScale = 0.30;

std::string fmt_id(const char* prefix, std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%s%07zu", prefix, i);
    return buf;
}

std::string fmt_sub_id(const char* prefix, std::size_t i, std::size_t j) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%07zux%zu", prefix, i, j);
    return buf;
}

// Achievable disruption values with all citers citing the focal paper:
// cd = (nc - 2*kb) / nc for kb consolidators out of nc citers.
struct CdQuantizer {
    struct Entry {
        double value;
        int nc, kb;
    };
    std::vector<Entry> entries;  // ascending by value

    static CdQuantizer build(int nc_min, int nc_max) {
        CdQuantizer q;
        for (int nc = nc_min; nc <= nc_max; ++nc)
            for (int kb = 0; kb <= nc; ++kb)
                q.entries.push_back({static_cast<double>(nc - 2 * kb) / nc, nc, kb});
        std::sort(q.entries.begin(), q.entries.end(), [](const Entry& a, const Entry& b) {
            if (a.value != b.value) return a.value < b.value;
            if (a.nc != b.nc) return a.nc < b.nc;
            return a.kb < b.kb;
        });
        // Keep the smallest (nc, kb) representation per distinct value.
        std::vector<Entry> unique;
        for (const Entry& e : q.entries)
            if (unique.empty() || unique.back().value != e.value) unique.push_back(e);
        q.entries = std::move(unique);
        return q;
    }

    const Entry& nearest(double target) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), target,
                                   [](const Entry& e, double t) { return e.value < t; });
        if (it == entries.end()) return entries.back();
        if (it == entries.begin()) return entries.front();
        const auto prev = std::prev(it);
        return (target - prev->value) <= (it->value - target) ? *prev : *it;
    }
};

// Integration values achievable by splitting n_refs references over
// disciplines: di = 1 - sum (c_j / R)^2 for a partition (c_j) of R.
struct DiQuantizer {
    struct Entry {
        double di;
        std::vector<int> parts;
    };
    std::vector<Entry> entries;  // ascending by di

    static DiQuantizer build(int r) {
        DiQuantizer q;
        std::vector<int> parts;
        enumerate(r, r, parts, q.entries);
        std::sort(q.entries.begin(), q.entries.end(), [](const Entry& a, const Entry& b) {
            if (a.di != b.di) return a.di < b.di;
            return a.parts.size() < b.parts.size();
        });
        return q;
    }

    const Entry& nearest(double target) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), target,
                                   [](const Entry& e, double t) { return e.di < t; });
        if (it == entries.end()) return entries.back();
        if (it == entries.begin()) return entries.front();
        const auto prev = std::prev(it);
        return (target - prev->di) <= (it->di - target) ? *prev : *it;
    }

private:
    static void enumerate(int remaining, int max_part, std::vector<int>& parts,
                          std::vector<Entry>& out) {
        if (remaining == 0) {
            double total = 0.0;
            double r = 0.0;
            for (int p : parts) r += p;
            for (int p : parts) total += (p / r) * (p / r);
            out.push_back({1.0 - total, parts});
            return;
        }
        for (int p = std::min(remaining, max_part); p >= 1; --p) {
            parts.push_back(p);
            enumerate(remaining - p, p, parts, out);
            parts.pop_back();
        }
    }
};

const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> pool = {
        "deep",     "model",   "data",    "graph",   "study",  "analysis",
        "method",   "network", "system",  "result",  "theory", "signal",
        "pattern",  "design",  "effect",  "dynamic", "scale",  "field",
        "process",  "measure",
    };
    return pool;
}

const std::vector<std::string>& promo_words() {
    static const std::vector<std::string> pool = {"unique", "crucial", "unprecedented"};
    return pool;
}

struct Plan {
    int year = 0;
    bool post = false;
    int disc_idx = 0;
    int k = 0;
    int c = 0;
    std::vector<int> group_sizes;
    std::vector<std::tuple<int, int, int>> history_edges;  // (member, member, year)
    std::vector<std::pair<int, int>> solo_papers;          // (member, year)
    std::vector<std::pair<int, int>> extra_solo;           // last-author (year) extras
    std::vector<int> inst_idx;
    std::string title;
    int twc = 0;
    int promo_count = 0;
    double promo_pct = 0.0;
    double sd = 0.0;
    double freshness = 0.0;
    std::size_t optional_pairs = 0;
    std::size_t extra_edges = 0;
    double di_target = 0.0;
    double di_real = 0.0;
    std::vector<std::pair<int, int>> ref_disciplines;  // (label index, count)
    double v_linear = 0.0;   // planted linear part before noise
    double v_final = 0.0;    // after noise/jump
    double cd_target = 0.0;
    double cd_real = 0.0;
    int nc = 0;
    int kb = 0;
    int treated = -1;  // 1 treated / 0 control / -1 neither (jump corpora)
    bool decoy = false;
};

}  // namespace

void SynthConfig::validate() const {
    if (team_min < 2 || team_max < team_min || team_max > 64)
        throw ConfigError("synth: team size range must satisfy 2 <= min <= max <= 64");
    if (window < 2 || window > 7) throw ConfigError("synth: window must be in [2, 7]");
    if (n_refs < 1 || n_refs > 12) throw ConfigError("synth: n_refs must be in [1, 12]");
    if (citers_min < 1 || citers_max < citers_min || citers_max > 64)
        throw ConfigError("synth: citers range must satisfy 1 <= min <= max <= 64");
    if (year_min > year_max) throw ConfigError("synth: year_min must not exceed year_max");
    if (year_min < 1913 || year_max > 2023)
        throw ConfigError("synth: focal years must lie in [1913, 2023] so history and citer "
                          "years stay inside the default parse range");
    if (n_disciplines < 1 || n_disciplines > 19)
        throw ConfigError("synth: n_disciplines must be in [1, 19]");
    if (intra_group_density < 0.0 || intra_group_density > 1.0)
        throw ConfigError("synth: intra_group_density must be in [0, 1]");
    if (review_fraction < 0.0 || review_fraction > 1.0)
        throw ConfigError("synth: review_fraction must be in [0, 1]");
    if (sigma_m < 0.0 || sigma_raw < 0.0) throw ConfigError("synth: noise sds must be >= 0");
    if (att_jump != 0.0 && n_papers < 8)
        throw ConfigError("synth: quartile jump needs at least 8 papers");
    if (cc_p_pre < 0.0 || cc_p_pre > 1.0 || cc_p_post < 0.0 || cc_p_post > 1.0)
        throw ConfigError("synth: component rates must be probabilities");
    if (confounder_strength < 0.0 || confounder_strength > 0.95)
        throw ConfigError("synth: confounder_strength is a mixing weight in [0, 0.95]");
}

SynthOutput generate_corpus(const SynthConfig& cfg) {
    cfg.validate();

    SynthOutput out;
    json truth;
    truth["config"] = {
        {"n_papers", cfg.n_papers},
        {"seed", cfg.seed},
        {"year_min", cfg.year_min},
        {"year_max", cfg.year_max},
        {"n_disciplines", cfg.n_disciplines},
        {"team_min", cfg.team_min},
        {"team_max", cfg.team_max},
        {"window", cfg.window},
        {"n_refs", cfg.n_refs},
        {"citers_min", cfg.citers_min},
        {"citers_max", cfg.citers_max},
        {"intra_group_density", cfg.intra_group_density},
        {"beta_sd", cfg.beta_sd},
        {"beta_interaction", cfg.beta_interaction},
        {"beta_logk", cfg.beta_logk},
        {"gamma_twc", cfg.gamma_twc},
        {"gamma_promo", cfg.gamma_promo},
        {"confounder_strength", cfg.confounder_strength},
        {"att_jump", cfg.att_jump},
        {"raw_outcome", cfg.raw_outcome},
        {"a_path", cfg.a_path},
        {"di_base", cfg.di_base},
        {"sigma_m", cfg.sigma_m},
        {"b_path", cfg.b_path},
        {"direct_path", cfg.direct_path},
        {"raw_intercept", cfg.raw_intercept},
        {"sigma_raw", cfg.sigma_raw},
        {"prepost", cfg.prepost},
        {"shock_year", cfg.shock_year},
        {"cc_p_pre", cfg.cc_p_pre},
        {"cc_p_post", cfg.cc_p_post},
        {"cd_shift", cfg.cd_shift},
        {"nsf_all", cfg.nsf_all},
        {"review_fraction", cfg.review_fraction},
    };
    truth["papers"] = json::array();
    if (cfg.n_papers == 0) {
        truth["derived"] = json::object();
        out.truth = std::move(truth);
        return out;
    }

    Rng rng(derive_seed(cfg.seed, 0));
    Rng rng_inst(derive_seed(cfg.seed, 1));
    Rng rng_eps(derive_seed(cfg.seed, 2));

    constexpr int kInstitutions = 200;
    for (int j = 0; j < kInstitutions; ++j)
        out.h_index.set(fmt_id("inst", static_cast<std::size_t>(j)),
                        5 + static_cast<int>(rng_inst.below(146)));

    const DiQuantizer di_quant = DiQuantizer::build(cfg.n_refs);
    const CdQuantizer cd_quant = CdQuantizer::build(cfg.citers_min, cfg.citers_max);
    const auto& labels = discipline_labels();

    const std::size_t n = cfg.n_papers;
    std::vector<Plan> plans(n);

    // ---- pass 1: per-paper draws -------------------------------------------
    for (std::size_t i = 0; i < n; ++i) {
        Plan& p = plans[i];
        p.year = cfg.year_min + static_cast<int>(rng.below(
                     static_cast<std::uint64_t>(cfg.year_max - cfg.year_min + 1)));
        p.post = cfg.prepost && p.year >= cfg.shock_year;
        p.disc_idx = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.n_disciplines)));
        p.k = cfg.team_min + static_cast<int>(rng.below(
                  static_cast<std::uint64_t>(cfg.team_max - cfg.team_min + 1)));

        // Title: twc tokens, promo_count of them from the promotional lexicon.
        const double u1 = rng.normal();
        p.twc = std::clamp(static_cast<int>(std::lround(12.0 + 3.0 * u1)), 4, 24);
        // Promotional share drawn as a target fraction so promo_pct stays
        // roughly independent of the title length.
        static constexpr double kPromoFracs[4] = {0.0, 0.08, 0.17, 0.25};
        const double frac = kPromoFracs[rng.below(4)];
        p.promo_count = std::clamp(static_cast<int>(std::lround(frac * p.twc)), 0, p.twc);
        {
            std::vector<std::string> tokens;
            for (int w = 0; w < p.promo_count; ++w)
                tokens.push_back(promo_words()[static_cast<std::size_t>(w) % promo_words().size()]);
            for (int w = p.promo_count; w < p.twc; ++w)
                tokens.push_back(filler_words()[rng.below(filler_words().size())]);
            p.title.clear();
            for (std::size_t w = 0; w < tokens.size(); ++w) {
                if (w) p.title += ' ';
                p.title += tokens[w];
            }
        }
        p.promo_pct = 100.0 * static_cast<double>(p.promo_count) / static_cast<double>(p.twc);

        // Component count. Pre/post corpora draw it as 1 + binomial(k-1, rate);
        // otherwise a continuous diversity latent is discretized, mixed with
        // the title-length latent when confounding is requested. The latent is
        // shared across team sizes so sd and team size stay nearly independent.
        if (cfg.prepost) {
            const double rate = p.post ? cfg.cc_p_post : cfg.cc_p_pre;
            int successes = 0;
            for (int tr = 0; tr < p.k - 1; ++tr)
                if (rng.bernoulli(rate)) ++successes;
            p.c = 1 + successes;
        } else {
            const double base = rng.uniform();
            double s = base;
            if (cfg.confounder_strength != 0.0) {
                const double u1_real = (static_cast<double>(p.twc) - 12.0) / 3.0;
                const double p1 = normal_cdf(u1_real);
                const double mix = cfg.confounder_strength;
                s = mix * p1 + (1.0 - mix) * base;
            }
            p.c = 1 + std::min(p.k - 1, static_cast<int>(s * p.k));
        }
        p.sd = static_cast<double>(p.c) / static_cast<double>(p.k);

        // Uniform composition of k members into c ordered groups: c-1 distinct
        // cut positions in 1..k-1.
        {
            std::vector<int> positions(static_cast<std::size_t>(p.k - 1));
            std::iota(positions.begin(), positions.end(), 1);
            for (int j = 0; j < p.c - 1; ++j) {
                const std::size_t pick =
                    static_cast<std::size_t>(j) +
                    rng.below(positions.size() - static_cast<std::size_t>(j));
                std::swap(positions[static_cast<std::size_t>(j)], positions[pick]);
            }
            std::vector<int> cuts(positions.begin(), positions.begin() + (p.c - 1));
            std::sort(cuts.begin(), cuts.end());
            int prev = 0;
            for (int cut : cuts) {
                p.group_sizes.push_back(cut - prev);
                prev = cut;
            }
            p.group_sizes.push_back(p.k - prev);
        }

        // History: spanning tree per group plus density-controlled extras;
        // singleton groups get a solo paper so every member stays traceable.
        int fresh = 0;
        int member_base = 0;
        for (int g : p.group_sizes) {
            if (g == 1) {
                const int year = p.year - cfg.window +
                                 static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.window)));
                p.solo_papers.emplace_back(member_base, year);
                ++fresh;
            } else {
                for (int j = 1; j < g; ++j) {
                    const int parent = static_cast<int>(rng.below(static_cast<std::uint64_t>(j)));
                    const int year = p.year - cfg.window +
                                     static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.window)));
                    p.history_edges.emplace_back(member_base + parent, member_base + j, year);
                }
                // Extras only for pairs not already linked by the tree.
                for (int a = 0; a < g; ++a) {
                    for (int b = a + 1; b < g; ++b) {
                        bool is_tree = false;
                        for (const auto& [ea, eb, ey] : p.history_edges) {
                            if (ea == member_base + a && eb == member_base + b) {
                                is_tree = true;
                                break;
                            }
                        }
                        if (is_tree) continue;
                        ++p.optional_pairs;
                        if (rng.bernoulli(cfg.intra_group_density)) {
                            const int year =
                                p.year - cfg.window +
                                static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.window)));
                            p.history_edges.emplace_back(member_base + a, member_base + b, year);
                            ++p.extra_edges;
                        }
                    }
                }
            }
            member_base += g;
        }
        p.freshness = static_cast<double>(fresh) / static_cast<double>(p.k);

        // Last-author career depth: extra solo publications.
        {
            const int extras = static_cast<int>(rng.below(4));
            for (int e = 0; e < extras; ++e) {
                const int year = p.year - 12 + static_cast<int>(rng.below(12));
                p.extra_solo.emplace_back(p.k - 1, year);
            }
        }

        p.inst_idx.resize(static_cast<std::size_t>(p.k));
        for (int m = 0; m < p.k; ++m)
            p.inst_idx[static_cast<std::size_t>(m)] = static_cast<int>(rng.below(kInstitutions));

        // Integration target and its realized reference composition. The clamp
        // spans the full achievable range; keep di_base + a_path*sd + 4*sigma_m
        // inside it or the clamp flattens the planted slope.
        p.di_target = std::clamp(cfg.di_base + cfg.a_path * p.sd + cfg.sigma_m * rng.normal(),
                                 0.0, 0.872);
        const auto& di_entry = di_quant.nearest(p.di_target);
        p.di_real = di_entry.di;
        {
            // Distinct disciplines for the parts, drawn from all 19 labels.
            std::vector<int> disc(19);
            std::iota(disc.begin(), disc.end(), 0);
            for (std::size_t j = 0; j < di_entry.parts.size(); ++j) {
                const std::size_t pick = j + rng.below(disc.size() - j);
                std::swap(disc[j], disc[pick]);
                p.ref_disciplines.emplace_back(disc[j], di_entry.parts[j]);
            }
        }

        p.decoy = cfg.review_fraction > 0.0 && rng.bernoulli(cfg.review_fraction);
    }

    // ---- latent outcome construction ---------------------------------------
    std::vector<double> sd_values(n), logk(n), twc_values(n), promo_values(n);
    for (std::size_t i = 0; i < n; ++i) {
        sd_values[i] = plans[i].sd;
        logk[i] = std::log(static_cast<double>(plans[i].k));
        twc_values[i] = static_cast<double>(plans[i].twc);
        promo_values[i] = plans[i].promo_pct;
    }
    out.focal_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.focal_ids[i] = fmt_id("p", i);

    double sigma_eps = 0.0;
    double var_linear = 0.0;
    double tau = 0.0;
    std::size_t clamped = 0;

    if (!cfg.raw_outcome) {
        const std::vector<double> z = standardize(sd_values);
        const std::vector<double> twc_z = standardize(twc_values);
        const std::vector<double> promo_z = standardize(promo_values);
        double mean_logk = 0.0;
        for (double v : logk) mean_logk += v;
        mean_logk /= static_cast<double>(n);

        for (std::size_t i = 0; i < n; ++i) {
            plans[i].v_linear = cfg.beta_sd * z[i] + cfg.beta_interaction * z[i] * logk[i] +
                                cfg.beta_logk * (logk[i] - mean_logk) +
                                cfg.gamma_twc * twc_z[i] + cfg.gamma_promo * promo_z[i];
        }
        double mean_v = 0.0;
        for (const Plan& p : plans) mean_v += p.v_linear;
        mean_v /= static_cast<double>(n);
        for (const Plan& p : plans)
            var_linear += (p.v_linear - mean_v) * (p.v_linear - mean_v);
        var_linear /= static_cast<double>(n - 1);
        if (var_linear > 0.97)
            throw ConfigError("synth: planted coefficients explain more variance than the "
                              "normalized outcome allows (var = " +
                              std::to_string(var_linear) + ")");
        sigma_eps = std::sqrt(1.0 - var_linear);
        for (Plan& p : plans) p.v_final = p.v_linear + sigma_eps * rng_eps.normal();

        if (cfg.att_jump != 0.0) {
            const auto quartiles = quantile_groups(sd_values, out.focal_ids, 4);
            for (std::size_t i = 0; i < n; ++i)
                plans[i].treated = quartiles[i] == 4 ? 1 : (quartiles[i] == 1 ? 0 : -1);

            // Calibrate the raw jump so the post-normalization treated-vs-
            // control gap equals att_jump: solve att = tau * E_T[1 / sd_g(tau)].
            std::vector<int> group_of(n);
            std::vector<int> group_treated_counts;
            {
                std::map<std::pair<int, int>, int> index;
                for (std::size_t i = 0; i < n; ++i) {
                    const auto key = std::make_pair(plans[i].year, plans[i].disc_idx);
                    auto [it, inserted] = index.emplace(key, static_cast<int>(index.size()));
                    group_of[i] = it->second;
                }
                group_treated_counts.assign(index.size(), 0);
                for (std::size_t i = 0; i < n; ++i)
                    if (plans[i].treated == 1) ++group_treated_counts[static_cast<std::size_t>(group_of[i])];
            }
            const auto gap_for = [&](double t) {
                const std::size_t n_groups = group_treated_counts.size();
                std::vector<double> sum(n_groups, 0.0), sum_sq(n_groups, 0.0);
                std::vector<std::size_t> count(n_groups, 0);
                for (std::size_t i = 0; i < n; ++i) {
                    const double v = plans[i].v_final + (plans[i].treated == 1 ? t : 0.0);
                    const auto g = static_cast<std::size_t>(group_of[i]);
                    sum[g] += v;
                    sum_sq[g] += v * v;
                    ++count[g];
                }
                double weighted = 0.0;
                double weight = 0.0;
                for (std::size_t g = 0; g < n_groups; ++g) {
                    if (count[g] < 2 || group_treated_counts[g] == 0) continue;
                    const double mean = sum[g] / static_cast<double>(count[g]);
                    const double var =
                        std::max(1e-12, (sum_sq[g] - sum[g] * mean) / static_cast<double>(count[g] - 1));
                    weighted += static_cast<double>(group_treated_counts[g]) * t / std::sqrt(var);
                    weight += static_cast<double>(group_treated_counts[g]);
                }
                return weight > 0.0 ? weighted / weight : 0.0;
            };
            double lo = 0.0, hi = std::fabs(cfg.att_jump) * 4.0 + 1.0;
            const double sign = cfg.att_jump >= 0.0 ? 1.0 : -1.0;
            for (int iter = 0; iter < 80; ++iter) {
                const double mid = 0.5 * (lo + hi);
                (gap_for(sign * mid) * sign < std::fabs(cfg.att_jump) ? lo : hi) = mid;
            }
            tau = sign * 0.5 * (lo + hi);
            for (Plan& p : plans)
                if (p.treated == 1) p.v_final += tau;
        }

        for (Plan& p : plans) {
            p.cd_target = kNormScale * p.v_final;
            if (p.cd_target > 1.0 || p.cd_target < -1.0) {
                p.cd_target = std::clamp(p.cd_target, -1.0, 1.0);
                ++clamped;
            }
        }
    } else {
        for (Plan& p : plans) {
            p.v_final = cfg.raw_intercept + cfg.direct_path * p.sd + cfg.b_path * p.di_real +
                        (p.post ? cfg.cd_shift : 0.0) + cfg.sigma_raw * rng_eps.normal();
            p.cd_target = p.v_final;
            if (p.cd_target > 1.0 || p.cd_target < -1.0) {
                p.cd_target = std::clamp(p.cd_target, -1.0, 1.0);
                ++clamped;
            }
        }
    }

    std::size_t total_optional_pairs = 0, total_extra_edges = 0, total_tree_edges = 0;
    for (Plan& p : plans) {
        const auto& entry = cd_quant.nearest(p.cd_target);
        p.cd_real = entry.value;
        p.nc = entry.nc;
        p.kb = entry.kb;
        total_optional_pairs += p.optional_pairs;
        total_extra_edges += p.extra_edges;
        total_tree_edges += p.history_edges.size() - p.extra_edges;
    }

    // ---- pass 2: materialize records ---------------------------------------
    std::size_t est = 0;
    for (const Plan& p : plans)
        est += 2 + p.history_edges.size() + p.solo_papers.size() + p.extra_solo.size() +
               static_cast<std::size_t>(cfg.n_refs + p.nc) + (p.decoy ? 1 : 0);
    out.corpus.papers.reserve(est);

    for (std::size_t i = 0; i < n; ++i) {
        const Plan& p = plans[i];
        const std::string focal_id = out.focal_ids[i];
        const std::string& disc = labels[static_cast<std::size_t>(p.disc_idx)];

        std::vector<std::string> member_ids(static_cast<std::size_t>(p.k));
        for (int m = 0; m < p.k; ++m)
            member_ids[static_cast<std::size_t>(m)] = fmt_sub_id("a", i, static_cast<std::size_t>(m));

        std::size_t hist_no = 0;
        // History papers carry article_type `other`: they exist to realize the
        // prior network and career profiles, and repeat authors would otherwise
        // leak extra rows into the research-article analysis sample.
        const auto push_history = [&](const std::vector<int>& members, int year) {
            PaperRecord rec;
            rec.paper_id = fmt_sub_id("h", i, hist_no++);
            rec.title = "prior study";
            rec.year = year;
            rec.discipline = disc;
            rec.article_type = ArticleType::Other;
            for (int m : members) rec.authors.push_back({member_ids[static_cast<std::size_t>(m)], std::nullopt});
            out.corpus.papers.push_back(std::move(rec));
        };
        for (const auto& [a, b, year] : p.history_edges) push_history({a, b}, year);
        for (const auto& [m, year] : p.solo_papers) push_history({m}, year);
        for (const auto& [m, year] : p.extra_solo) push_history({m}, year);

        std::vector<std::string> ref_ids;
        ref_ids.reserve(static_cast<std::size_t>(cfg.n_refs));
        std::size_t ref_no = 0;
        for (const auto& [label_idx, count] : p.ref_disciplines) {
            for (int r = 0; r < count; ++r) {
                PaperRecord rec;
                rec.paper_id = fmt_sub_id("r", i, ref_no);
                rec.title = "source text";
                rec.year = p.year - 3;
                rec.discipline = labels[static_cast<std::size_t>(label_idx)];
                rec.authors.push_back({fmt_sub_id("q", i, ref_no), std::nullopt});
                ref_ids.push_back(rec.paper_id);
                out.corpus.papers.push_back(std::move(rec));
                ++ref_no;
            }
        }

        PaperRecord focal;
        focal.paper_id = focal_id;
        focal.title = p.title;
        focal.year = p.year;
        focal.discipline = disc;
        for (int m = 0; m < p.k; ++m)
            focal.authors.push_back({member_ids[static_cast<std::size_t>(m)],
                                     fmt_id("inst", static_cast<std::size_t>(
                                                        p.inst_idx[static_cast<std::size_t>(m)]))});
        focal.references = ref_ids;
        focal.nsf_funded = cfg.nsf_all;
        out.corpus.papers.push_back(std::move(focal));

        for (int cj = 0; cj < p.nc; ++cj) {
            PaperRecord rec;
            rec.paper_id = fmt_sub_id("c", i, static_cast<std::size_t>(cj));
            rec.title = "follow up";
            rec.year = p.year + 1 + (cj % 2);
            rec.discipline = labels[static_cast<std::size_t>(cj % 19)];
            rec.authors.push_back({fmt_sub_id("w", i, static_cast<std::size_t>(cj)), std::nullopt});
            rec.references.push_back(focal_id);
            if (cj < p.kb) rec.references.push_back(ref_ids.front());  // consolidator
            out.corpus.papers.push_back(std::move(rec));
        }

        if (p.decoy) {
            PaperRecord rec;
            rec.paper_id = fmt_id("d", i);
            rec.title = "survey of the field";
            rec.year = p.year;
            rec.discipline = disc;
            rec.article_type = (i % 2 == 0) ? ArticleType::Review : ArticleType::Editorial;
            rec.authors.push_back({fmt_sub_id("y", i, 0), std::nullopt});
            out.corpus.papers.push_back(std::move(rec));
        }
    }

    std::size_t n_research = 0;
    for (const PaperRecord& p : out.corpus.papers)
        if (p.article_type == ArticleType::ResearchArticle) ++n_research;

    json derived;
    derived["n_research_records"] = n_research;
    derived["sigma_eps"] = sigma_eps;
    derived["var_linear"] = var_linear;
    derived["tau"] = tau;
    derived["norm_scale"] = kNormScale;
    derived["cd_clamped"] = clamped;
    derived["total_tree_edges"] = total_tree_edges;
    derived["total_optional_pairs"] = total_optional_pairs;
    derived["total_extra_edges"] = total_extra_edges;
    derived["n_records"] = out.corpus.papers.size();
    truth["derived"] = std::move(derived);

    for (std::size_t i = 0; i < n; ++i) {
        const Plan& p = plans[i];
        json row;
        row["id"] = out.focal_ids[i];
        row["year"] = p.year;
        row["discipline"] = labels[static_cast<std::size_t>(p.disc_idx)];
        row["k"] = p.k;
        row["c"] = p.c;
        row["sd"] = p.sd;
        row["freshness"] = p.freshness;
        row["edges"] = p.history_edges.size();
        row["di_target"] = p.di_target;
        row["di"] = p.di_real;
        row["cd_target"] = p.cd_target;
        row["cd"] = p.cd_real;
        row["twc"] = p.twc;
        row["promo_pct"] = p.promo_pct;
        row["treated"] = p.treated;
        row["post"] = p.post;
        row["decoy"] = p.decoy;
        truth["papers"].push_back(std::move(row));
    }
    out.truth = std::move(truth);
    return out;
}

void write_synth_output(const SynthOutput& output, const std::string& corpus_path,
                        const std::string& truth_path, const std::string& hindex_path) {
    {
        std::ofstream out(corpus_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write corpus: " + corpus_path);
        write_corpus_jsonl(output.corpus, out);
    }
    {
        std::ofstream out(truth_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write ground truth: " + truth_path);
        out << output.truth.dump(1) << '\n';
    }
    {
        std::ofstream out(hindex_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write h-index table: " + hindex_path);
        for (int j = 0; j < 200; ++j) {
            const std::string id = fmt_id("inst", static_cast<std::size_t>(j));
            out << id << '\t' << output.h_index.lookup(id) << '\n';
        }
    }
}

SynthConfig synth_config_from(const Config& cfg, const std::string& section) {
    SynthConfig s;
    const auto key = [&](const char* k) { return section + "." + k; };
    s.n_papers = static_cast<std::size_t>(cfg.integer(key("n_papers"), static_cast<std::int64_t>(s.n_papers)));
    s.seed = static_cast<std::uint64_t>(cfg.integer(key("seed"), static_cast<std::int64_t>(s.seed)));
    s.year_min = static_cast<int>(cfg.integer(key("year_min"), s.year_min));
    s.year_max = static_cast<int>(cfg.integer(key("year_max"), s.year_max));
    s.n_disciplines = static_cast<int>(cfg.integer(key("n_disciplines"), s.n_disciplines));
    s.team_min = static_cast<int>(cfg.integer(key("team_min"), s.team_min));
    s.team_max = static_cast<int>(cfg.integer(key("team_max"), s.team_max));
    s.window = static_cast<int>(cfg.integer(key("window"), s.window));
    s.n_refs = static_cast<int>(cfg.integer(key("n_refs"), s.n_refs));
    s.citers_min = static_cast<int>(cfg.integer(key("citers_min"), s.citers_min));
    s.citers_max = static_cast<int>(cfg.integer(key("citers_max"), s.citers_max));
    s.intra_group_density = cfg.real(key("intra_group_density"), s.intra_group_density);
    s.beta_sd = cfg.real(key("beta_sd"), s.beta_sd);
    s.beta_interaction = cfg.real(key("beta_interaction"), s.beta_interaction);
    s.beta_logk = cfg.real(key("beta_logk"), s.beta_logk);
    s.gamma_twc = cfg.real(key("gamma_twc"), s.gamma_twc);
    s.gamma_promo = cfg.real(key("gamma_promo"), s.gamma_promo);
    s.confounder_strength = cfg.real(key("confounder_strength"), s.confounder_strength);
    s.att_jump = cfg.real(key("att_jump"), s.att_jump);
    s.raw_outcome = cfg.boolean(key("raw_outcome"), s.raw_outcome);
    s.a_path = cfg.real(key("a_path"), s.a_path);
    s.di_base = cfg.real(key("di_base"), s.di_base);
    s.sigma_m = cfg.real(key("sigma_m"), s.sigma_m);
    s.b_path = cfg.real(key("b_path"), s.b_path);
    s.direct_path = cfg.real(key("direct_path"), s.direct_path);
    s.raw_intercept = cfg.real(key("raw_intercept"), s.raw_intercept);
    s.sigma_raw = cfg.real(key("sigma_raw"), s.sigma_raw);
    s.prepost = cfg.boolean(key("prepost"), s.prepost);
    s.shock_year = static_cast<int>(cfg.integer(key("shock_year"), s.shock_year));
    s.cc_p_pre = cfg.real(key("cc_p_pre"), s.cc_p_pre);
    s.cc_p_post = cfg.real(key("cc_p_post"), s.cc_p_post);
    s.cd_shift = cfg.real(key("cd_shift"), s.cd_shift);
    s.nsf_all = cfg.boolean(key("nsf_all"), s.nsf_all);
    s.review_fraction = cfg.real(key("review_fraction"), s.review_fraction);
    return s;
}

}  // namespace sdlab
