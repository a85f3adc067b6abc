#ifndef SDLAB_INNOVATION_HPP
#define SDLAB_INNOVATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdlab/graph.hpp"

namespace sdlab {

struct CdResult {
    std::optional<double> cd;       // missing when no citers fall in the window
    std::uint32_t citer_count = 0;  // size of the denominator set
    bool zero_reference_focal = false;
};

/// Disruption index of one focal paper. The citer set is every in-corpus
/// paper published in (t, t + window_years] that cites the focal paper or at
/// least one of its references; each citer contributes (-2*f*b + f) where
/// f = cites the focal, b = cites >= 1 reference. Citers with f=0, b=1 count
/// in the denominator with contribution 0.
CdResult cd_index(std::uint32_t focal, const CitationGraph& graph, int window_years = 5);

/// Per-value z-score within groups; groups of size 1 or zero variance map to
/// missing. `values` may already contain missing entries, which stay missing
/// and do not enter the group statistics.
std::vector<std::optional<double>> field_normalize(const std::vector<std::optional<double>>& values,
                                                   const std::vector<std::string>& group_keys);

struct DiResult {
    std::optional<double> di;         // 1 - sum p_i^2; missing without known refs
    std::uint32_t known_refs = 0;
    std::uint32_t unknown_refs = 0;   // references without a discipline label
};

/// Simpson diversity over the discipline distribution of the focal paper's
/// references. Empty-string disciplines count as unknown.
DiResult disciplinary_integration(const std::vector<std::string>& reference_disciplines);

}  // namespace sdlab

#endif
