#ifndef SDLAB_CAUSAL_HPP
#define SDLAB_CAUSAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdlab/stats.hpp"
#include "sdlab/table.hpp"

namespace sdlab {

/// Equal-count quantile bins, labels 1..k (ascending). Ties are broken by the
/// stable id order so the split is deterministic.
std::vector<int> quantile_groups(const std::vector<double>& values,
                                 const std::vector<std::string>& ids, int k);

struct MatchedPair {
    std::size_t treated_row = 0;  // row indices into the analyzed table
    std::size_t control_row = 0;
    double score_gap = 0.0;
};

struct MatchUnit {
    std::size_t row = 0;
    double score = 0.0;
    std::string id;  // tie-break key
};

/// Greedy one-to-one nearest-neighbor matching without replacement in
/// descending treated-score order. Equal-gap candidates resolve to the lower
/// score, then the smaller id. An optional caliper (on the logit scale)
/// discards pairs whose logit-score gap exceeds it.
std::vector<MatchedPair> greedy_nn_match(std::vector<MatchUnit> treated,
                                         const std::vector<MatchUnit>& controls,
                                         std::optional<double> caliper_logit,
                                         std::size_t* n_unmatched);

/// (mean_T - mean_C) / sqrt((var_T + var_C) / 2); missing when the pooled sd
/// vanishes.
std::optional<double> smd_value(const std::vector<double>& treated,
                                const std::vector<double>& control);

struct SmdEntry {
    std::string covariate;
    std::optional<double> before;  // missing when the pooled sd is zero
    std::optional<double> after;
};

struct AttEstimate {
    double att = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double p = 1.0;
    std::size_t n_pairs = 0;
    std::size_t n_bootstrap = 0;
};

/// Mean matched-pair outcome gap with a seeded percentile bootstrap
/// (95% CI, two-sided p for ATT = 0). Deterministic given the seed,
/// independent of the worker count.
AttEstimate att_estimate(const std::vector<double>& pair_gaps, int n_bootstrap,
                         std::uint64_t seed, int threads = 1);

struct MatchReport {
    std::vector<MatchedPair> pairs;
    std::vector<SmdEntry> balance;
    AttEstimate att;
    std::size_t n_treated = 0;
    std::size_t n_control_pool = 0;
    std::size_t n_unmatched_treated = 0;
    std::size_t n_dropped_rows = 0;  // listwise-deleted in the propensity model
    bool propensity_converged = true;
    std::vector<std::string> warnings;

    bool balanced(double threshold = 0.1) const;  // all |after| < threshold
};

struct PsmOptions {
    std::vector<std::string> covariates;
    std::vector<std::string> fixed_effects;  // FE keys for the propensity model
    std::string outcome = "cd_norm";
    std::string id_column = "paper_id";
    /// Pairs whose |logit score gap| exceeds caliper_mult * sd(logit scores)
    /// are discarded; disabled by default.
    std::optional<double> caliper_mult;
    int n_bootstrap = 1000;
    std::uint64_t seed = 42;
    int threads = 1;
};

/// One-to-one greedy nearest-neighbor matching without replacement in
/// descending treated-score order, then balance diagnostics and the
/// bootstrap ATT. `treated` holds one flag per table row: 1 treated,
/// 0 control, anything else excluded.
MatchReport psm_match(const DataTable& rows, const std::vector<int>& treated,
                      const PsmOptions& options);

/// Quartile treatment: top quartile of `treatment_var` vs bottom quartile.
MatchReport psm_quartile(const DataTable& rows, const std::string& treatment_var,
                         const PsmOptions& options);

struct DecileSweepEntry {
    int pair = 0;  // 1 = top vs bottom decile, ..., 5 = adjacent to the median
    int upper_decile = 0;
    int lower_decile = 0;
    AttEstimate att;
    bool balanced = false;
};

/// Symmetric decile pairs (10|1), (9|2), ..., (6|5), full pipeline per pair.
std::vector<DecileSweepEntry> psm_decile_sweep(const DataTable& rows,
                                               const std::string& treatment_var,
                                               const PsmOptions& options);

struct PrepostOptions {
    int pre_lo = 2010, pre_hi = 2011;
    int post_lo = 2012, post_hi = 2013;
    std::vector<double> kde_grid;  // default: 0..1 step 0.01
};

struct PrepostReport {
    std::size_t n_pre = 0, n_post = 0;
    double mean_cc_pre = 0.0, mean_cc_post = 0.0;
    std::vector<std::pair<int, double>> cc_pct_pre;   // (cc value, share %)
    std::vector<std::pair<int, double>> cc_pct_post;
    MwuResult mwu_cc;
    MwuResult mwu_sd;
    TTestResult ttest_cd_norm;
    TTestResult ttest_cd_raw;
    std::vector<double> kde_grid;
    std::vector<double> kde_sd_pre;
    std::vector<double> kde_sd_post;
};

/// Pre/post comparison of team structure and outcomes. Periods are derived
/// from the year column; rows outside both ranges are ignored.
PrepostReport prepost_report(const DataTable& rows, const PrepostOptions& options);

struct MediationOptions {
    std::string exposure;
    std::string mediator;
    std::string outcome;
    std::vector<std::string> controls;
    std::vector<std::string> fixed_effects;
    int n_bootstrap = 1000;
    std::uint64_t seed = 7;
    int threads = 1;
};

struct MediationResult {
    double a = 0.0;        // exposure -> mediator
    double b = 0.0;        // mediator -> outcome, exposure-adjusted
    double c_total = 0.0;  // exposure -> outcome
    double c_direct = 0.0;
    double indirect = 0.0;  // a * b
    std::optional<double> proportion_mediated;
    double p_a = 1.0, p_b = 1.0, p_total = 1.0;
    double indirect_lo = 0.0, indirect_hi = 0.0;
    double indirect_p = 1.0;
    std::size_t n_obs = 0;
    std::size_t n_bootstrap = 0;
    std::size_t n_bootstrap_failed = 0;
};

/// Product-of-coefficients mediation on nested linear models, all three fitted
/// on the same listwise-complete sample; percentile bootstrap for the
/// indirect effect, deterministic by seed.
MediationResult mediation_analysis(const DataTable& rows, const MediationOptions& options);

}  // namespace sdlab

#endif
