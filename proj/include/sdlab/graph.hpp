#ifndef SDLAB_GRAPH_HPP
#define SDLAB_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sdlab/types.hpp"

namespace sdlab {

/// String-id -> dense index mapping. Indices are assigned in lexicographic
/// id order, so the mapping (and everything built on it) is invariant under
/// permutations of the input papers.
class IdInterner {
public:
    void assign_sorted(std::vector<std::string> ids);  // ids may contain duplicates
    std::optional<std::uint32_t> find(const std::string& id) const;
    const std::string& name(std::uint32_t idx) const { return names_[idx]; }
    std::uint32_t size() const { return static_cast<std::uint32_t>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

constexpr int kUnknownYear = std::numeric_limits<int>::min();

/// Directed citation structure. Backward lists keep dangling references
/// (targets outside the corpus); forward lists only contain in-corpus citers.
class CitationGraph {
public:
    static CitationGraph build(const Corpus& corpus);

    std::optional<std::uint32_t> node_of(const std::string& paper_id) const;
    const std::string& paper_id(std::uint32_t node) const { return papers_.name(node); }
    std::uint32_t node_count() const { return papers_.size(); }

    bool in_corpus(std::uint32_t node) const { return in_corpus_[node] != 0; }
    int year(std::uint32_t node) const { return years_[node]; }

    std::span<const std::uint32_t> references(std::uint32_t node) const;
    std::span<const std::uint32_t> citers(std::uint32_t node) const;

    std::size_t dangling_reference_count() const { return dangling_references_; }
    /// Edges where the citing paper's year precedes the cited paper's year.
    std::size_t year_anomaly_count() const { return year_anomalies_; }

    void save(std::ostream& out) const;
    static CitationGraph load(std::istream& in);

private:
    IdInterner papers_;
    std::vector<std::uint8_t> in_corpus_;
    std::vector<int> years_;
    std::vector<std::uint64_t> backward_offsets_;
    std::vector<std::uint32_t> backward_targets_;
    std::vector<std::uint64_t> forward_offsets_;
    std::vector<std::uint32_t> forward_targets_;
    std::size_t dangling_references_ = 0;
    std::size_t year_anomalies_ = 0;

    void finalize_from_backward();
};

/// Undirected temporal co-authorship multigraph: each edge carries the
/// multiset of years in which the pair co-published.
class CollabGraph {
public:
    struct BuildOptions {
        std::uint32_t team_size_cap = 500;  // papers above this skip edge expansion
    };

    static CollabGraph build(const Corpus& corpus);
    static CollabGraph build(const Corpus& corpus, const BuildOptions& options);

    std::optional<std::uint32_t> node_of(const std::string& author_id) const;
    const std::string& author_id(std::uint32_t node) const { return authors_.name(node); }
    std::uint32_t node_count() const { return authors_.size(); }

    struct Neighbor {
        std::uint32_t node;
        std::span<const int> years;  // ascending
    };

    std::size_t neighbor_count(std::uint32_t node) const;
    Neighbor neighbor(std::uint32_t node, std::size_t i) const;

    /// True if the pair co-published in some year within [year_lo, year_hi].
    bool edge_in_window(std::uint32_t a, std::uint32_t b, int year_lo, int year_hi) const;

    std::size_t skipped_paper_count() const { return skipped_papers_; }
    std::uint64_t edge_count() const;  // distinct pairs

    void save(std::ostream& out) const;
    static CollabGraph load(std::istream& in);

private:
    IdInterner authors_;
    std::vector<std::uint64_t> adj_offsets_;     // node -> entry range
    std::vector<std::uint32_t> adj_neighbors_;   // sorted within each node
    std::vector<std::uint64_t> year_offsets_;    // entry -> year range (size = entries + 1)
    std::vector<int> years_;
    std::size_t skipped_papers_ = 0;

    void finalize_from_edges(std::vector<std::pair<std::uint64_t, int>>& edge_years);
};

/// Induced prior-collaboration network of one focal team: nodes are the team
/// members, edges those pairs with at least one co-publication in
/// [t - window, t - 1]. Member order follows the focal author list.
struct PriorNetwork {
    std::vector<std::string> members;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // local indices, first < second
    int focal_year = 0;
    int window = 5;

    std::uint32_t team_size() const { return static_cast<std::uint32_t>(members.size()); }
};

/// window must be in [2, 7]; team must be non-empty. Members absent from the
/// collaboration graph are isolated nodes.
PriorNetwork prior_subnetwork(const CollabGraph& graph, const std::vector<AuthorRef>& team,
                              int focal_year, int window);

struct ComponentResult {
    std::uint32_t count = 0;
    /// label[v] = smallest node index in v's component.
    std::vector<std::uint32_t> labels;
};

/// Union-find with path compression and union by size; labels canonicalized
/// to the smallest member index.
ComponentResult connected_components(std::uint32_t n_nodes,
                                     std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

}  // namespace sdlab

#endif
