#include "sdlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sdlab/dists.hpp"

namespace sdlab {

namespace {

bool missing(double v) { return std::isnan(v); }

std::string interaction_name(const std::string& a, const std::string& b) { return a + ":" + b; }

std::string fe_value_at(const DataTable& table, const std::string& key, std::size_t row) {
    if (table.is_text(key)) return table.text(key)[row];
    const double v = table.num(key)[row];
    return missing(v) ? std::string{} : format_double(v);
}

}  // namespace

std::optional<std::size_t> Design::term_index(const std::string& name) const {
    for (std::size_t i = 0; i < term_names.size(); ++i)
        if (term_names[i] == name) return i;
    return std::nullopt;
}

Design build_design(const DataTable& table, const ModelSpec& spec) {
    // Reject duplicate requested terms before touching data.
    {
        std::vector<std::string> requested = spec.predictors;
        for (const auto& [a, b] : spec.interactions) requested.push_back(interaction_name(a, b));
        std::set<std::string> seen;
        for (const std::string& t : requested)
            if (!seen.insert(t).second) throw StatError("duplicate model term: " + t);
    }

    std::vector<std::string> numeric_cols = spec.predictors;
    for (const auto& [a, b] : spec.interactions) {
        if (std::find(numeric_cols.begin(), numeric_cols.end(), a) == numeric_cols.end())
            numeric_cols.push_back(a);
        if (std::find(numeric_cols.begin(), numeric_cols.end(), b) == numeric_cols.end())
            numeric_cols.push_back(b);
    }

    const std::size_t n = table.rows();
    const std::vector<double>& y_col = table.num(spec.outcome);

    // Listwise deletion over every used column.
    std::vector<std::size_t> keep;
    keep.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        bool ok = !missing(y_col[r]);
        for (const std::string& c : numeric_cols)
            if (ok && missing(table.num(c)[r])) ok = false;
        for (const std::string& key : spec.fixed_effects)
            if (ok && fe_value_at(table, key, r).empty()) ok = false;
        if (ok) keep.push_back(r);
    }

    Design d;
    d.row_index = keep;
    d.n_dropped = n - keep.size();

    std::size_t k = 1 + spec.predictors.size() + spec.interactions.size();
    struct FeEncoding {
        std::string key;
        std::vector<std::string> levels;  // levels[0] = reference (dropped)
        std::unordered_map<std::string, std::size_t> index;
    };
    std::vector<FeEncoding> fes;
    for (const std::string& key : spec.fixed_effects) {
        FeEncoding fe;
        fe.key = key;
        // Levels present among the kept rows only.
        std::set<std::string> seen;
        for (std::size_t r : keep) seen.insert(fe_value_at(table, key, r));
        if (!table.is_text(key)) {
            // Re-sort numerically; set ordering on formatted strings is lexicographic.
            std::vector<double> nums;
            for (const std::string& s : seen) nums.push_back(std::strtod(s.c_str(), nullptr));
            std::sort(nums.begin(), nums.end());
            fe.levels.clear();
            for (double v : nums) fe.levels.push_back(format_double(v));
        } else {
            fe.levels.assign(seen.begin(), seen.end());
        }
        for (std::size_t i = 0; i < fe.levels.size(); ++i) fe.index.emplace(fe.levels[i], i);
        // Warn on levels observed fewer than twice.
        std::unordered_map<std::string, std::size_t> counts;
        for (std::size_t r : keep) ++counts[fe_value_at(table, key, r)];
        for (const auto& [level, count] : counts)
            if (count < 2)
                d.warnings.push_back("fixed effect " + key + " level \"" + level +
                                     "\" has fewer than 2 rows");
        d.fe_levels[key] = fe.levels.size();
        k += fe.levels.size() > 0 ? fe.levels.size() - 1 : 0;
        fes.push_back(std::move(fe));
    }

    d.X.setZero(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(k));
    d.y.resize(static_cast<Eigen::Index>(keep.size()));
    d.term_names.reserve(k);
    d.term_names.push_back("(intercept)");

    for (Eigen::Index i = 0; i < d.y.size(); ++i) {
        d.y(i) = y_col[keep[static_cast<std::size_t>(i)]];
        d.X(i, 0) = 1.0;
    }

    Eigen::Index col = 1;
    for (const std::string& name : spec.predictors) {
        const auto& v = table.num(name);
        for (Eigen::Index i = 0; i < d.y.size(); ++i)
            d.X(i, col) = v[keep[static_cast<std::size_t>(i)]];
        d.term_names.push_back(name);
        ++col;
    }
    for (const auto& [a, b] : spec.interactions) {
        const auto& va = table.num(a);
        const auto& vb = table.num(b);
        for (Eigen::Index i = 0; i < d.y.size(); ++i) {
            const std::size_t r = keep[static_cast<std::size_t>(i)];
            d.X(i, col) = va[r] * vb[r];
        }
        d.term_names.push_back(interaction_name(a, b));
        ++col;
    }
    for (const FeEncoding& fe : fes) {
        for (std::size_t level = 1; level < fe.levels.size(); ++level)
            d.term_names.push_back(fe.key + "=" + fe.levels[level]);
        for (Eigen::Index i = 0; i < d.y.size(); ++i) {
            const std::size_t r = keep[static_cast<std::size_t>(i)];
            const std::size_t level = fe.index.at(fe_value_at(table, fe.key, r));
            if (level > 0) d.X(i, col + static_cast<Eigen::Index>(level) - 1) = 1.0;
        }
        col += fe.levels.empty() ? 0 : static_cast<Eigen::Index>(fe.levels.size()) - 1;
    }
    return d;
}

const RegressionTerm& RegressionResult::term(const std::string& name) const {
    for (const RegressionTerm& t : terms)
        if (t.name == name) return t;
    throw StatError("no such model term: " + name);
}

std::optional<std::size_t> RegressionResult::term_index(const std::string& name) const {
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (terms[i].name == name) return i;
    return std::nullopt;
}

std::pair<double, double> RegressionResult::conf_int(const std::string& name, double level) const {
    const RegressionTerm& t = term(name);
    const double q = student_t_quantile(0.5 + level / 2.0, static_cast<double>(df_resid));
    return {t.beta - q * t.se, t.beta + q * t.se};
}

RegressionResult ols_fit(const Design& design, bool robust) {
    const Eigen::Index n = design.X.rows();
    const Eigen::Index k = design.X.cols();
    if (n <= k)
        throw StatError("ols_fit: n (" + std::to_string(n) + ") must exceed number of columns (" +
                        std::to_string(k) + ")");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
        const auto& perm = qr.colsPermutation().indices();
        std::ostringstream oss;
        oss << "ols_fit: rank-deficient design; dependent columns:";
        for (Eigen::Index i = qr.rank(); i < k; ++i)
            oss << " " << design.term_names[static_cast<std::size_t>(perm(i))];
        throw StatError(oss.str());
    }

    const Eigen::VectorXd beta = qr.solve(design.y);
    const Eigen::VectorXd resid = design.y - design.X * beta;
    const double rss = resid.squaredNorm();
    const double mean_y = design.y.mean();
    const double tss = (design.y.array() - mean_y).square().sum();

    RegressionResult out;
    out.n_obs = static_cast<std::size_t>(n);
    out.df_resid = static_cast<std::size_t>(n - k);
    out.n_dropped = design.n_dropped;
    out.fe_levels = design.fe_levels;
    out.sigma2 = rss / static_cast<double>(n - k);
    out.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;

    // (X'X)^-1 from the QR factors: X P = Q R  =>  (X'X)^-1 = P (R'R)^-1 P'.
    const Eigen::MatrixXd r_mat =
        qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r_mat.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd base = r_inv * r_inv.transpose();
    const auto& perm = qr.colsPermutation().indices();
    Eigen::MatrixXd xtx_inv(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) xtx_inv(perm(i), perm(j)) = base(i, j);

    if (robust) {
        // HC1: (X'X)^-1 X' diag(e^2) X (X'X)^-1 * n/(n-k)
        Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e2 = resid(i) * resid(i);
            meat.noalias() += e2 * design.X.row(i).transpose() * design.X.row(i);
        }
        out.cov = xtx_inv * meat * xtx_inv *
                  (static_cast<double>(n) / static_cast<double>(n - k));
    } else {
        out.cov = out.sigma2 * xtx_inv;
    }

    out.terms.resize(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        RegressionTerm& t = out.terms[static_cast<std::size_t>(j)];
        t.name = design.term_names[static_cast<std::size_t>(j)];
        t.beta = beta(j);
        t.se = std::sqrt(std::max(0.0, out.cov(j, j)));
        t.t = t.se > 0.0 ? t.beta / t.se : 0.0;
        t.p = t.se > 0.0
                  ? student_t_p_two_sided(t.t, static_cast<double>(out.df_resid))
                  : 1.0;
    }
    return out;
}

RegressionResult ols_fit_within(const DataTable& table, const ModelSpec& spec) {
    ModelSpec no_fe = spec;
    no_fe.fixed_effects.clear();
    Design d = build_design(table, no_fe);

    // Drop the same rows a dummy-encoded fit would drop (missing FE keys).
    std::vector<Eigen::Index> keep;
    std::vector<std::vector<std::string>> fe_vals(spec.fixed_effects.size());
    for (Eigen::Index i = 0; i < d.y.size(); ++i) {
        const std::size_t r = d.row_index[static_cast<std::size_t>(i)];
        bool ok = true;
        for (std::size_t f = 0; f < spec.fixed_effects.size(); ++f)
            if (fe_value_at(table, spec.fixed_effects[f], r).empty()) ok = false;
        if (ok) {
            keep.push_back(i);
            for (std::size_t f = 0; f < spec.fixed_effects.size(); ++f)
                fe_vals[f].push_back(fe_value_at(table, spec.fixed_effects[f], r));
        }
    }
    const Eigen::Index n = static_cast<Eigen::Index>(keep.size());
    const Eigen::Index k_slopes = d.X.cols() - 1;  // drop the intercept column
    Eigen::MatrixXd Z(n, k_slopes + 1);            // last column: outcome
    for (Eigen::Index i = 0; i < n; ++i) {
        Z.row(i).head(k_slopes) = d.X.row(keep[static_cast<std::size_t>(i)]).tail(k_slopes);
        Z(i, k_slopes) = d.y(keep[static_cast<std::size_t>(i)]);
    }

    // Group index per FE key.
    std::size_t total_fe_levels = 0;
    std::vector<std::vector<std::size_t>> groups(spec.fixed_effects.size());
    std::vector<std::size_t> group_counts(spec.fixed_effects.size());
    for (std::size_t f = 0; f < spec.fixed_effects.size(); ++f) {
        std::unordered_map<std::string, std::size_t> index;
        groups[f].resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            auto [it, inserted] =
                index.emplace(fe_vals[f][static_cast<std::size_t>(i)], index.size());
            groups[f][static_cast<std::size_t>(i)] = it->second;
        }
        group_counts[f] = index.size();
        total_fe_levels += index.size();
    }

    // Alternating projections: demean every column within each FE grouping
    // until all group means vanish. One pass is exact for a single key.
    const double tol = 1e-11;
    for (int iter = 0; iter < 200; ++iter) {
        double worst = 0.0;
        for (std::size_t f = 0; f < spec.fixed_effects.size(); ++f) {
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(
                static_cast<Eigen::Index>(group_counts[f]), Z.cols());
            Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(group_counts[f]));
            for (Eigen::Index i = 0; i < n; ++i) {
                sums.row(static_cast<Eigen::Index>(groups[f][static_cast<std::size_t>(i)])) += Z.row(i);
                counts(static_cast<Eigen::Index>(groups[f][static_cast<std::size_t>(i)])) += 1.0;
            }
            for (Eigen::Index g = 0; g < sums.rows(); ++g) sums.row(g) /= counts(g);
            worst = std::max(worst, sums.cwiseAbs().maxCoeff());
            for (Eigen::Index i = 0; i < n; ++i)
                Z.row(i) -= sums.row(static_cast<Eigen::Index>(groups[f][static_cast<std::size_t>(i)]));
        }
        if (worst < tol) break;
    }
    // Grand-mean removal stands in for the absorbed intercept.
    Z.rowwise() -= Z.colwise().mean();

    const Eigen::MatrixXd Xw = Z.leftCols(k_slopes);
    const Eigen::VectorXd yw = Z.col(k_slopes);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Xw);
    const Eigen::VectorXd beta = qr.solve(yw);
    const Eigen::VectorXd resid = yw - Xw * beta;

    // Effective dof: slopes + absorbed intercepts (one level per key is
    // redundant with the grand mean).
    const std::size_t absorbed =
        1 + total_fe_levels - (spec.fixed_effects.empty() ? 0 : spec.fixed_effects.size());
    RegressionResult out;
    out.n_obs = static_cast<std::size_t>(n);
    out.df_resid = static_cast<std::size_t>(n) - static_cast<std::size_t>(k_slopes) - absorbed;
    out.sigma2 = resid.squaredNorm() / static_cast<double>(out.df_resid);
    const double tss = (yw.array() - yw.mean()).square().sum();
    out.r_squared = tss > 0.0 ? 1.0 - resid.squaredNorm() / tss : 1.0;

    const Eigen::MatrixXd xtx_inv =
        (Xw.transpose() * Xw).ldlt().solve(Eigen::MatrixXd::Identity(k_slopes, k_slopes));
    out.cov = out.sigma2 * xtx_inv;
    out.terms.resize(static_cast<std::size_t>(k_slopes));
    for (Eigen::Index j = 0; j < k_slopes; ++j) {
        RegressionTerm& t = out.terms[static_cast<std::size_t>(j)];
        t.name = d.term_names[static_cast<std::size_t>(j) + 1];
        t.beta = beta(j);
        t.se = std::sqrt(std::max(0.0, out.cov(j, j)));
        t.t = t.se > 0.0 ? t.beta / t.se : 0.0;
        t.p = t.se > 0.0 ? student_t_p_two_sided(t.t, static_cast<double>(out.df_resid)) : 1.0;
    }
    return out;
}

std::vector<MarginPoint> predict_margins(const RegressionResult& fit, const Design& design,
                                         const std::string& var, const std::vector<double>& grid,
                                         const std::string& moderator,
                                         const std::vector<double>& moderator_levels,
                                         double level) {
    if (!design.term_index(var))
        throw StatError("predict_margins: variable " + var + " is not in the model");
    const Eigen::Index k = design.X.cols();
    const Eigen::VectorXd means = design.X.colwise().mean();
    Eigen::VectorXd beta(k);
    for (Eigen::Index j = 0; j < k; ++j) beta(j) = fit.terms[static_cast<std::size_t>(j)].beta;

    const double tq = student_t_quantile(0.5 + level / 2.0, static_cast<double>(fit.df_resid));

    std::vector<double> levels = moderator_levels;
    if (levels.empty()) levels.push_back(std::numeric_limits<double>::quiet_NaN());

    const auto value_of = [&](const std::string& name, double gx, double ml) -> double {
        if (name == var) return gx;
        if (!moderator.empty() && name == moderator) return ml;
        const auto idx = design.term_index(name);
        return idx ? means(static_cast<Eigen::Index>(*idx))
                   : std::numeric_limits<double>::quiet_NaN();
    };

    std::vector<MarginPoint> out;
    out.reserve(levels.size() * grid.size());
    for (double ml : levels) {
        for (double gx : grid) {
            Eigen::VectorXd x0 = means;
            for (Eigen::Index j = 0; j < k; ++j) {
                const std::string& name = design.term_names[static_cast<std::size_t>(j)];
                if (name == var) {
                    x0(j) = gx;
                } else if (!moderator.empty() && name == moderator) {
                    x0(j) = ml;
                } else if (const auto colon = name.find(':'); colon != std::string::npos) {
                    const std::string a = name.substr(0, colon);
                    const std::string b = name.substr(colon + 1);
                    if (a == var || b == var || (!moderator.empty() && (a == moderator || b == moderator))) {
                        const double va = value_of(a, gx, ml);
                        const double vb = value_of(b, gx, ml);
                        if (!std::isnan(va) && !std::isnan(vb)) x0(j) = va * vb;
                    }
                }
            }
            MarginPoint pt;
            pt.moderator_level = ml;
            pt.x = gx;
            pt.yhat = x0.dot(beta);
            pt.se = std::sqrt(std::max(0.0, (x0.transpose() * fit.cov * x0)(0, 0)));
            pt.lo = pt.yhat - tq * pt.se;
            pt.hi = pt.yhat + tq * pt.se;
            out.push_back(pt);
        }
    }
    return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw StatError("spearman: length mismatch");
    SpearmanResult out;
    out.n = x.size();
    if (out.n < 3) throw StatError("spearman: need at least 3 pairs");

    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < out.n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(out.n);
    my /= static_cast<double>(out.n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < out.n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return out;  // constant vector: rho missing

    const double rho = sxy / std::sqrt(sxx * syy);
    out.rho = rho;
    const double denom = 1.0 - rho * rho;
    if (denom <= 0.0) {
        out.p = 0.0;
    } else {
        const double t = rho * std::sqrt(static_cast<double>(out.n - 2) / denom);
        out.p = student_t_p_two_sided(t, static_cast<double>(out.n - 2));
    }
    return out;
}

BinnedFit binned_means_fit(std::span<const double> x, std::span<const double> y,
                           std::size_t n_bins) {
    if (x.size() != y.size()) throw StatError("binned_means_fit: length mismatch");
    if (n_bins < 2) throw StatError("binned_means_fit: need at least 2 bins");
    if (x.size() < n_bins) throw StatError("binned_means_fit: fewer points than bins");

    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    BinnedFit out;
    out.requested_bins = n_bins;
    const std::size_t base = n / n_bins;
    const std::size_t rem = n % n_bins;

    std::size_t start = 0;
    for (std::size_t b = 0; b < n_bins && start < n; ++b) {
        std::size_t end = start + base + (b < rem ? 1 : 0);
        if (end > n) end = n;
        if (end <= start) continue;
        // Ties spanning a boundary are merged into the current bin.
        while (end < n && x[order[end]] == x[order[end - 1]]) ++end;
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = start; i < end; ++i) {
            sx += x[order[i]];
            sy += y[order[i]];
        }
        const double count = static_cast<double>(end - start);
        out.bin_mean_x.push_back(sx / count);
        out.bin_mean_y.push_back(sy / count);
        start = end;
    }
    out.actual_bins = out.bin_mean_x.size();
    if (out.actual_bins < 2)
        throw StatError("binned_means_fit: tied x mass left fewer than 2 bins");

    const std::size_t m = out.actual_bins;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += out.bin_mean_x[i];
        my += out.bin_mean_y[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxy += (out.bin_mean_x[i] - mx) * (out.bin_mean_y[i] - my);
        sxx += (out.bin_mean_x[i] - mx) * (out.bin_mean_x[i] - mx);
        syy += (out.bin_mean_y[i] - my) * (out.bin_mean_y[i] - my);
    }
    if (sxx <= 0.0) throw StatError("binned_means_fit: binned x has zero spread");
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    if (syy <= 0.0) {
        out.r_squared = 1.0;  // flat y fits exactly
    } else {
        double rss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double fit = out.intercept + out.slope * out.bin_mean_x[i];
            rss += (out.bin_mean_y[i] - fit) * (out.bin_mean_y[i] - fit);
        }
        out.r_squared = 1.0 - rss / syy;
    }
    return out;
}

TTestResult t_test_welch(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw StatError("t_test_welch: need >= 2 values per sample");
    TTestResult out;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    for (double v : a) out.mean_a += v;
    for (double v : b) out.mean_b += v;
    out.mean_a /= na;
    out.mean_b /= nb;
    double va = 0.0, vb = 0.0;
    for (double v : a) va += (v - out.mean_a) * (v - out.mean_a);
    for (double v : b) vb += (v - out.mean_b) * (v - out.mean_b);
    va /= na - 1.0;
    vb /= nb - 1.0;

    const double se2 = va / na + vb / nb;
    if (se2 <= 0.0) {
        out.t = 0.0;
        out.df = na + nb - 2.0;
        return out;  // both samples degenerate: p missing
    }
    out.t = (out.mean_a - out.mean_b) / std::sqrt(se2);
    const double da = (va / na) * (va / na) / (na - 1.0);
    const double db = (vb / nb) * (vb / nb) / (nb - 1.0);
    out.df = se2 * se2 / (da + db);
    out.p = student_t_p_two_sided(out.t, out.df);
    return out;
}

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw StatError("mann_whitney_u: empty sample");
    const std::size_t n1 = a.size(), n2 = b.size();
    std::vector<double> pooled;
    pooled.reserve(n1 + n2);
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = average_ranks(pooled);

    double r1 = 0.0;
    for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
    MwuResult out;
    out.u = r1 - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);

    // Tie-corrected normal approximation (documented approximation; no
    // continuity correction).
    const double n = static_cast<double>(n1 + n2);
    double tie_sum = 0.0;
    {
        std::vector<double> sorted = pooled;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_sum += t * t * t - t;
            i = j + 1;
        }
    }
    const double mean_u = 0.5 * static_cast<double>(n1) * static_cast<double>(n2);
    const double var_u = (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
                         ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if (var_u <= 0.0) {
        out.z = 0.0;
        out.p = 1.0;  // every value tied
        return out;
    }
    out.z = (out.u - mean_u) / std::sqrt(var_u);
    out.p = normal_p_two_sided(out.z);
    return out;
}

LogisticResult logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol,
                            int max_iter) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (y.size() != n) throw StatError("logistic_fit: X and y size mismatch");
    bool has0 = false, has1 = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y(i) == 0.0) has0 = true;
        else if (y(i) == 1.0) has1 = true;
        else throw StatError("logistic_fit: outcome must be 0/1");
    }
    if (!has0 || !has1) throw StatError("logistic_fit: both outcome classes must be present");

    LogisticResult out;
    out.beta = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd eta(n), mu(n), w(n), z(n);
    for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
        eta = X * out.beta;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e = std::clamp(eta(i), -30.0, 30.0);
            const double p = 1.0 / (1.0 + std::exp(-e));
            mu(i) = p;
            w(i) = std::max(p * (1.0 - p), 1e-10);
            z(i) = e + (y(i) - p) / w(i);
        }
        const Eigen::MatrixXd xw = X.transpose() * w.asDiagonal();
        const Eigen::VectorXd beta_new = (xw * X).ldlt().solve(xw * z);
        const double delta = (beta_new - out.beta).cwiseAbs().maxCoeff();
        out.beta = beta_new;
        if (delta < tol) {
            out.converged = true;
            ++out.iterations;
            break;
        }
    }
    if (!out.converged)
        out.warnings.push_back(
            "logistic_fit: no convergence in " + std::to_string(max_iter) +
            " iterations (possible complete separation); scores from last iterate");

    out.fitted.resize(n);
    eta = X * out.beta;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-eta(i)));
        out.fitted(i) = std::clamp(p, 1e-15, 1.0 - 1e-15);
    }
    return out;
}

double quantile(std::span<const double> sorted_values, double q) {
    if (sorted_values.empty()) throw StatError("quantile: empty input");
    if (q <= 0.0) return sorted_values.front();
    if (q >= 1.0) return sorted_values.back();
    const double pos = q * static_cast<double>(sorted_values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted_values.size()) return sorted_values.back();
    return sorted_values[lo] * (1.0 - frac) + sorted_values[lo + 1] * frac;
}

double silverman_bandwidth(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw StatError("silverman_bandwidth: need >= 2 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);

    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) throw StatError("silverman_bandwidth: zero spread");
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> gaussian_kde(std::span<const double> values, std::span<const double> grid) {
    const double h = silverman_bandwidth(values);
    const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * 3.14159265358979323846));
    std::vector<double> density(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0.0;
        for (double v : values) {
            const double u = (grid[g] - v) / h;
            sum += std::exp(-0.5 * u * u);
        }
        density[g] = norm * sum;
    }
    return density;
}

}  // namespace sdlab
