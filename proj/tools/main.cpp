#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "sdlab/pipeline.hpp"

namespace {

void apply_overrides(sdlab::Config& cfg, const std::string& seed, int threads) {
    if (!seed.empty()) cfg.set("seed", seed);
    cfg.set("threads", std::to_string(threads));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sdlab: bibliometric team-structure metrics and causal analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string seed_override;
    int threads = 1;
    bool require_balance = false;

    app.add_option("--config", config_path, "Path to the key-value config file");
    app.add_option("--out", out_dir, "Output directory (default: out)");
    app.add_option("--seed", seed_override, "Override the configured seed");
    app.add_option("--threads", threads, "Worker threads for parallel sections")
        ->check(CLI::Range(1, 256));
    app.add_flag("--require-balance", require_balance,
                 "psm: exit nonzero when any post-match |SMD| >= 0.1");

    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
    auto* metrics = app.add_subcommand("metrics", "Compute the per-paper metric table");
    auto* regress = app.add_subcommand("regress", "Fixed-effects OLS (optional sweep/margins)");
    auto* binfit = app.add_subcommand("bin-fit", "Binned-mean fits of outcome vs predictors");
    auto* psm = app.add_subcommand("psm", "Propensity-score matching and decile sweep");
    auto* prepost = app.add_subcommand("prepost", "Pre/post comparison report");
    auto* mediate = app.add_subcommand("mediate", "Product-of-coefficients mediation");
    // Global flags may follow the subcommand name.
    for (auto* sub : {synth, metrics, regress, binfit, psm, prepost, mediate}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        sdlab::Config cfg =
            config_path.empty() ? sdlab::Config{} : sdlab::Config::from_file(config_path);
        apply_overrides(cfg, seed_override, threads);

        sdlab::RunResult result;
        if (synth->parsed()) result = sdlab::run_synth(cfg, out_dir);
        if (metrics->parsed()) result = sdlab::run_metrics(cfg, out_dir);
        if (regress->parsed()) result = sdlab::run_regress(cfg, out_dir);
        if (binfit->parsed()) result = sdlab::run_binfit(cfg, out_dir);
        if (psm->parsed()) result = sdlab::run_psm(cfg, out_dir, require_balance);
        if (prepost->parsed()) result = sdlab::run_prepost(cfg, out_dir);
        if (mediate->parsed()) result = sdlab::run_mediate(cfg, out_dir);

        for (const std::string& path : result.outputs) std::printf("wrote %s\n", path.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
