#include "sdlab/innovation.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

namespace sdlab {

CdResult cd_index(std::uint32_t focal, const CitationGraph& graph, int window_years) {
    if (window_years < 1) throw ConfigError("cd window must be >= 1");
    CdResult result;
    const int t = graph.year(focal);
    if (t == kUnknownYear) throw DataError("cd_index: focal paper has no year");

    const auto refs = graph.references(focal);
    result.zero_reference_focal = refs.empty();

    const auto in_window = [&](std::uint32_t node) {
        const int y = graph.year(node);
        return y != kUnknownYear && y > t && y <= t + window_years;
    };

    // flags bit 0: cites focal; bit 1: cites a reference.
    std::unordered_map<std::uint32_t, std::uint8_t> flags;
    for (std::uint32_t citer : graph.citers(focal))
        if (in_window(citer)) flags[citer] |= 1;
    for (std::uint32_t ref : refs)
        for (std::uint32_t citer : graph.citers(ref))
            if (citer != focal && in_window(citer)) flags[citer] |= 2;

    if (flags.empty()) return result;

    // Integer numerator: +1 for focal-only, -1 for focal-and-reference,
    // 0 for reference-only. Exact regardless of iteration order.
    long long numerator = 0;
    for (const auto& [_, flag] : flags) {
        const bool f = flag & 1;
        const bool b = flag & 2;
        if (f && !b) ++numerator;
        if (f && b) --numerator;
    }
    result.citer_count = static_cast<std::uint32_t>(flags.size());
    result.cd = static_cast<double>(numerator) / static_cast<double>(flags.size());
    return result;
}

std::vector<std::optional<double>> field_normalize(const std::vector<std::optional<double>>& values,
                                                   const std::vector<std::string>& group_keys) {
    if (values.size() != group_keys.size())
        throw StatError("field_normalize: values and group keys differ in length");

    struct Stats {
        std::size_t n = 0;
        double sum = 0.0, sum_sq = 0.0;
    };
    std::unordered_map<std::string, Stats> stats;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i]) continue;
        Stats& s = stats[group_keys[i]];
        ++s.n;
        s.sum += *values[i];
        s.sum_sq += *values[i] * *values[i];
    }

    struct MeanSd {
        double mean = 0.0, sd = 0.0;
        bool usable = false;
    };
    std::unordered_map<std::string, MeanSd> moments;
    moments.reserve(stats.size());
    for (const auto& [key, s] : stats) {
        MeanSd m;
        if (s.n >= 2) {
            m.mean = s.sum / static_cast<double>(s.n);
            const double ss = s.sum_sq - s.sum * s.sum / static_cast<double>(s.n);
            const double var = std::max(0.0, ss) / static_cast<double>(s.n - 1);
            m.sd = std::sqrt(var);
            m.usable = m.sd > 0.0;
        }
        moments.emplace(key, m);
    }

    std::vector<std::optional<double>> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i]) continue;
        const MeanSd& m = moments.at(group_keys[i]);
        if (m.usable) out[i] = (*values[i] - m.mean) / m.sd;
    }
    return out;
}

DiResult disciplinary_integration(const std::vector<std::string>& reference_disciplines) {
    DiResult result;
    std::map<std::string, std::uint32_t> counts;
    for (const std::string& d : reference_disciplines) {
        if (d.empty()) {
            ++result.unknown_refs;
        } else {
            ++counts[d];
            ++result.known_refs;
        }
    }
    if (result.known_refs == 0) return result;

    const double total = static_cast<double>(result.known_refs);
    double sum_sq = 0.0;
    for (const auto& [_, c] : counts) {
        const double p = static_cast<double>(c) / total;
        sum_sq += p * p;
    }
    result.di = 1.0 - sum_sq;
    return result;
}

}  // namespace sdlab
