#ifndef SDLAB_STATS_HPP
#define SDLAB_STATS_HPP

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdlab/table.hpp"

namespace sdlab {

// ---------------------------------------------------------------------------
// Design construction
// ---------------------------------------------------------------------------

struct ModelSpec {
    std::string outcome;
    std::vector<std::string> predictors;
    /// Pairwise interactions; each becomes an elementwise-product column "a:b".
    std::vector<std::pair<std::string, std::string>> interactions;
    /// Categorical fixed-effect keys, dummy-encoded minus one reference level.
    std::vector<std::string> fixed_effects;
};

struct Design {
    Eigen::MatrixXd X;  // n x k, intercept first
    Eigen::VectorXd y;
    std::vector<std::string> term_names;    // size k
    std::vector<std::size_t> row_index;     // design row -> source table row
    std::size_t n_dropped = 0;              // listwise-deleted rows
    std::map<std::string, std::size_t> fe_levels;  // per key: levels present
    std::vector<std::string> warnings;

    std::optional<std::size_t> term_index(const std::string& name) const;
};

/// Rows with a missing value in any used column are dropped (and counted).
/// Duplicate term names are rejected up front.
Design build_design(const DataTable& table, const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

struct RegressionTerm {
    std::string name;
    double beta = 0.0;
    double se = 0.0;
    double t = 0.0;
    double p = 1.0;
};

struct RegressionResult {
    std::vector<RegressionTerm> terms;
    double r_squared = 0.0;
    double sigma2 = 0.0;  // residual variance estimate
    std::size_t n_obs = 0;
    std::size_t df_resid = 0;
    std::size_t n_dropped = 0;
    std::map<std::string, std::size_t> fe_levels;
    Eigen::MatrixXd cov;  // coefficient covariance (same order as terms)

    const RegressionTerm& term(const std::string& name) const;
    std::optional<std::size_t> term_index(const std::string& name) const;
    /// beta_hat +/- t_{97.5%, df} * se
    std::pair<double, double> conf_int(const std::string& name, double level = 0.95) const;
};

/// Householder-QR least squares with classical (homoskedastic) standard
/// errors; robust=true switches to HC1. Rank deficiency is an error naming
/// the dependent columns.
RegressionResult ols_fit(const Design& design, bool robust = false);

/// Same model fitted by absorbing the fixed effects with iterative
/// within-group demeaning instead of dummies; returns the non-FE terms only.
/// Exists as an independent algebraic route to the dummy encoding.
RegressionResult ols_fit_within(const DataTable& table, const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Margins
// ---------------------------------------------------------------------------

struct MarginPoint {
    double moderator_level = 0.0;
    double x = 0.0;
    double yhat = 0.0;
    double se = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Predicted outcome over a grid of `var`, at each moderator level, all other
/// design columns held at their sample means. Interaction columns touching
/// `var` or `moderator` are recomputed; delta-method CIs.
std::vector<MarginPoint> predict_margins(const RegressionResult& fit, const Design& design,
                                         const std::string& var, const std::vector<double>& grid,
                                         const std::string& moderator,
                                         const std::vector<double>& moderator_levels,
                                         double level = 0.95);

// ---------------------------------------------------------------------------
// Classical tests and summaries
// ---------------------------------------------------------------------------

/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

struct SpearmanResult {
    std::optional<double> rho;
    std::optional<double> p;
    std::size_t n = 0;
};
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

struct BinnedFit {
    std::vector<double> bin_mean_x;
    std::vector<double> bin_mean_y;
    std::size_t requested_bins = 0;
    std::size_t actual_bins = 0;  // after merging tied-x mass
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Equal-count bins by x-quantile (ties merged into one bin), per-bin means,
/// then a simple linear fit on the binned points.
BinnedFit binned_means_fit(std::span<const double> x, std::span<const double> y,
                           std::size_t n_bins);

struct TTestResult {
    double t = 0.0;
    std::optional<double> p;
    double df = 0.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
};
/// Welch two-sample t test with Welch-Satterthwaite degrees of freedom.
TTestResult t_test_welch(std::span<const double> a, std::span<const double> b);

struct MwuResult {
    double u = 0.0;  // U from the first sample's side
    double z = 0.0;
    double p = 1.0;  // tie-corrected normal approximation, two-sided
};
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

struct LogisticResult {
    Eigen::VectorXd beta;
    Eigen::VectorXd fitted;  // probabilities, clamped to (0, 1)
    bool converged = false;
    int iterations = 0;
    std::vector<std::string> warnings;
};

/// Logistic regression by iteratively reweighted least squares.
/// Non-convergence (e.g. complete separation) is flagged, not thrown; the
/// last iterate's scores remain usable.
LogisticResult logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            double tol = 1e-8, int max_iter = 100);

double silverman_bandwidth(std::span<const double> values);

/// Gaussian kernel density with Silverman's bandwidth, evaluated on `grid`.
std::vector<double> gaussian_kde(std::span<const double> values, std::span<const double> grid);

/// Linear-interpolation quantile (the common "type 7" definition).
double quantile(std::span<const double> sorted_values, double q);

}  // namespace sdlab

#endif
