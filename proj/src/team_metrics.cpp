#include "sdlab/team_metrics.hpp"

#include <algorithm>
#include <cmath>

namespace sdlab {

std::pair<std::uint32_t, double> structural_diversity(const PriorNetwork& prior) {
    if (prior.members.empty()) throw DataError("structural_diversity: empty team");
    const auto cc = connected_components(prior.team_size(), prior.edges);
    return {cc.count, static_cast<double>(cc.count) / static_cast<double>(prior.team_size())};
}

namespace {

std::vector<std::uint32_t> degrees(const PriorNetwork& prior) {
    std::vector<std::uint32_t> deg(prior.team_size(), 0);
    for (const auto& [a, b] : prior.edges) {
        ++deg[a];
        ++deg[b];
    }
    return deg;
}

}  // namespace

double team_freshness(const PriorNetwork& prior) {
    if (prior.members.empty()) throw DataError("team_freshness: empty team");
    const auto deg = degrees(prior);
    const auto fresh = std::count(deg.begin(), deg.end(), 0u);
    return static_cast<double>(fresh) / static_cast<double>(prior.team_size());
}

std::optional<double> edge_density(const PriorNetwork& prior) {
    const std::uint32_t n = prior.team_size();
    if (n < 2) return std::nullopt;
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return static_cast<double>(prior.edges.size()) / pairs;
}

std::optional<double> clustering_coefficient(const PriorNetwork& prior) {
    const std::uint32_t n = prior.team_size();
    if (n < 2) return std::nullopt;

    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const auto& [a, b] : prior.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());

    const auto connected = [&](std::uint32_t a, std::uint32_t b) {
        return std::binary_search(adj[a].begin(), adj[a].end(), b);
    };

    double total = 0.0;
    for (std::uint32_t v = 0; v < n; ++v) {
        const auto& nb = adj[v];
        if (nb.size() < 2) continue;  // contributes 0
        std::uint32_t closed = 0;
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j)
                if (connected(nb[i], nb[j])) ++closed;
        const double triples = 0.5 * static_cast<double>(nb.size()) * static_cast<double>(nb.size() - 1);
        total += static_cast<double>(closed) / triples;
    }
    return total / static_cast<double>(n);
}

TeamStructureMetrics team_structure_metrics(const PriorNetwork& prior) {
    TeamStructureMetrics m;
    m.team_size = prior.team_size();
    auto [cc, sd] = structural_diversity(prior);
    m.cc_count = cc;
    m.sd = sd;
    m.freshness = team_freshness(prior);
    m.edge_density = edge_density(prior);
    m.clustering = clustering_coefficient(prior);
    return m;
}

std::vector<double> standardize(const std::vector<double>& values) {
    if (values.size() < 2) throw StatError("standardize: need at least 2 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    if (!(sd > 0.0)) throw StatError("standardize: sample has zero variance");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sd;
    return out;
}

}  // namespace sdlab
