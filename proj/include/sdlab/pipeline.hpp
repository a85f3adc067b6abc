#ifndef SDLAB_PIPELINE_HPP
#define SDLAB_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "sdlab/config.hpp"
#include "sdlab/content.hpp"
#include "sdlab/ingest.hpp"
#include "sdlab/table.hpp"

namespace sdlab {

inline constexpr const char* kVersion = "0.1.0";

struct MetricsOptions {
    int window_years = 5;
    int cd_window_years = 5;
    /// Grouping for the outcome z-score: year_discipline | year | discipline.
    std::string normalize_groups = "year_discipline";
    bool research_only = true;
    bool traceable_only = true;
    bool nsf_only = false;
    std::optional<std::string> discipline_filter;
    std::optional<int> year_lo;
    std::optional<int> year_hi;
    std::uint32_t team_size_cap = 500;
    int threads = 1;
};

/// Runs the metric stack over a parsed corpus: graphs and profiles from the
/// full corpus, per-paper metrics for the filtered analysis sample, then the
/// sample-level standardizations. Column layout is documented in the README.
DataTable compute_metric_rows(const Corpus& corpus, const MetricsOptions& options,
                              const PromoLexicon& lexicon, const HIndexTable* h_index);

/// Standard covariate list (content + author + team controls).
std::vector<std::string> default_controls();

// ---------------------------------------------------------------------------
// CLI-facing runners. Each writes its artifacts plus a manifest into out_dir
// and returns the produced file names. On failure partial outputs are removed.
// ---------------------------------------------------------------------------

struct RunResult {
    std::vector<std::string> outputs;  // paths written (manifest last)
};

RunResult run_synth(const Config& cfg, const std::string& out_dir);
RunResult run_metrics(const Config& cfg, const std::string& out_dir);
RunResult run_regress(const Config& cfg, const std::string& out_dir);
RunResult run_binfit(const Config& cfg, const std::string& out_dir);
RunResult run_psm(const Config& cfg, const std::string& out_dir, bool require_balance);
RunResult run_prepost(const Config& cfg, const std::string& out_dir);
RunResult run_mediate(const Config& cfg, const std::string& out_dir);

}  // namespace sdlab

#endif
