#ifndef SDLAB_TEAM_METRICS_HPP
#define SDLAB_TEAM_METRICS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "sdlab/graph.hpp"

namespace sdlab {

struct TeamStructureMetrics {
    std::uint32_t team_size = 0;
    std::uint32_t cc_count = 0;
    double sd = 0.0;        // cc_count / team_size, in (0, 1]
    double freshness = 0.0; // fraction of members with no prior tie to the team
    std::optional<double> edge_density;  // missing for singleton teams
    std::optional<double> clustering;    // missing for singleton teams
};

/// Number of connected components and the size-normalized ratio.
std::pair<std::uint32_t, double> structural_diversity(const PriorNetwork& prior);

/// Fraction of team members with degree 0 in the prior network.
double team_freshness(const PriorNetwork& prior);

/// |edges| / C(team_size, 2); missing for teams of one.
std::optional<double> edge_density(const PriorNetwork& prior);

/// Mean local clustering over members; degree-<2 members contribute 0.
/// Missing for teams of one.
std::optional<double> clustering_coefficient(const PriorNetwork& prior);

/// All of the above in one pass.
TeamStructureMetrics team_structure_metrics(const PriorNetwork& prior);

/// z-scores with the sample standard deviation (n-1). Requires >= 2 values
/// and nonzero variance.
std::vector<double> standardize(const std::vector<double>& values);

}  // namespace sdlab

#endif
