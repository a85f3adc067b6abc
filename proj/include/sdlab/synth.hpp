#ifndef SDLAB_SYNTH_HPP
#define SDLAB_SYNTH_HPP

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "sdlab/ingest.hpp"
#include "sdlab/types.hpp"

namespace sdlab {

/// Seeded synthetic-corpus generator. Every focal paper gets a planted prior
/// collaboration structure (exact component count), a reference set realizing
/// a target integration value, and forward citers realizing a target
/// disruption value, so the full pipeline recovers the planted effects.
struct SynthConfig {
    std::size_t n_papers = 10000;  // focal papers
    std::uint64_t seed = 1;

    int year_min = 2000;
    int year_max = 2005;
    int n_disciplines = 5;  // focal papers use the first n of the 19 labels
    int team_min = 2;
    int team_max = 8;
    int window = 5;   // prior-history window the corpus is built for
    int n_refs = 8;   // references per focal paper
    int citers_min = 8;
    int citers_max = 12;

    /// Within-group extra-edge probability beyond the spanning tree
    /// (1.0 reproduces full cliques).
    double intra_group_density = 0.35;

    /// Outcome planted on the field-normalized scale (z within year x
    /// discipline groups). Residual noise is auto-scaled so the planted
    /// coefficients survive normalization.
    double beta_sd = 0.0;           // on standardized SD
    double beta_interaction = 0.0;  // on sd_std * log(team size)
    double beta_logk = 0.0;         // on log(team size)
    double gamma_twc = 0.0;         // on the standardized title-word-count latent
    double gamma_promo = 0.0;       // on the standardized promotional-share latent

    /// Tilts the component-count draw by the title-word-count latent, making
    /// it a confounder of both structure and outcome.
    double confounder_strength = 0.0;

    /// Planted treated-vs-control outcome jump for the top-vs-bottom SD
    /// quartile, on the normalized scale (calibrated numerically).
    double att_jump = 0.0;

    /// Raw-outcome mode: the disruption value is planted directly as
    /// intercept + direct*SD + b*DI + shift + noise (mediation and pre/post
    /// corpora). Normalized-scale coefficients above are ignored.
    bool raw_outcome = false;
    double a_path = 0.0;       // DI = di_base + a*SD + noise
    double di_base = 0.10;
    double sigma_m = 0.05;
    double b_path = 0.0;
    double direct_path = 0.0;  // c'
    double raw_intercept = -0.30;
    double sigma_raw = 0.10;

    /// Pre/post shock: before shock_year the component rate is cc_p_pre,
    /// from shock_year on it is cc_p_post, and the raw outcome gains cd_shift.
    bool prepost = false;
    int shock_year = 2012;
    double cc_p_pre = 0.3142857142857143;   // mean CC 2.10 at E[k]=4.5
    double cc_p_post = 0.3657142857142857;  // mean CC 2.28
    double cd_shift = 0.0;

    bool nsf_all = false;           // mark focal papers NSF-funded
    double review_fraction = 0.0;   // decoy review/editorial papers per focal

    void validate() const;  // throws ConfigError on infeasible settings
};

struct SynthOutput {
    Corpus corpus;
    HIndexTable h_index;
    nlohmann::json truth;  // planted parameters + per-paper latent values
    std::vector<std::string> focal_ids;
};

SynthOutput generate_corpus(const SynthConfig& config);

/// Corpus as JSON Lines, truth as JSON, h-index lookup as TSV. Byte-identical
/// across runs with the same config.
void write_synth_output(const SynthOutput& output, const std::string& corpus_path,
                        const std::string& truth_path, const std::string& hindex_path);

SynthConfig synth_config_from(const class Config& cfg, const std::string& section = "synth");

}  // namespace sdlab

#endif
