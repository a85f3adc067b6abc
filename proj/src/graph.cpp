#include "sdlab/graph.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>

namespace sdlab {

void IdInterner::assign_sorted(std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    names_ = std::move(ids);
    index_.clear();
    index_.reserve(names_.size() * 2);
    for (std::uint32_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
}

std::optional<std::uint32_t> IdInterner::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// Binary snapshot primitives. Layout is little-endian and versioned; the
// snapshot stores the minimal build inputs and derived structures are
// reconstructed deterministically on load.
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'S', 'D', 'L', 'G', 'R', 'P', 'H', '1'};

template <typename T>
void write_pod(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw DataError("graph snapshot: unexpected end of stream");
    return value;
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const auto len = read_pod<std::uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw DataError("graph snapshot: unexpected end of stream");
    return s;
}

template <typename T>
void write_vector(std::ostream& out, const std::vector<T>& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    write_pod<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
std::vector<T> read_vector(std::istream& in) {
    const auto n = read_pod<std::uint64_t>(in);
    std::vector<T> v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    if (!in) throw DataError("graph snapshot: unexpected end of stream");
    return v;
}

void write_names(std::ostream& out, const std::vector<std::string>& names) {
    write_pod<std::uint64_t>(out, names.size());
    for (const auto& s : names) write_string(out, s);
}

std::vector<std::string> read_names(std::istream& in) {
    const auto n = read_pod<std::uint64_t>(in);
    std::vector<std::string> names;
    names.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) names.push_back(read_string(in));
    return names;
}

void write_header(std::ostream& out, std::uint8_t kind) {
    out.write(kMagic, sizeof(kMagic));
    write_pod<std::uint32_t>(out, 1u);  // format version
    write_pod<std::uint8_t>(out, kind);
}

void read_header(std::istream& in, std::uint8_t expected_kind) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DataError("graph snapshot: bad magic");
    const auto version = read_pod<std::uint32_t>(in);
    if (version != 1) throw DataError("graph snapshot: unsupported version");
    const auto kind = read_pod<std::uint8_t>(in);
    if (kind != expected_kind) throw DataError("graph snapshot: wrong graph kind");
}

}  // namespace

// ---------------------------------------------------------------------------
// CitationGraph
// ---------------------------------------------------------------------------

CitationGraph CitationGraph::build(const Corpus& corpus) {
    CitationGraph g;

    std::vector<std::string> ids;
    ids.reserve(corpus.papers.size() * 2);
    for (const PaperRecord& p : corpus.papers) {
        ids.push_back(p.paper_id);
        for (const std::string& r : p.references) ids.push_back(r);
    }
    g.papers_.assign_sorted(std::move(ids));

    const std::uint32_t n = g.papers_.size();
    g.in_corpus_.assign(n, 0);
    g.years_.assign(n, kUnknownYear);
    for (const PaperRecord& p : corpus.papers) {
        const std::uint32_t node = *g.papers_.find(p.paper_id);
        g.in_corpus_[node] = 1;
        g.years_[node] = p.year;
    }

    std::vector<std::uint32_t> degree(n, 0);
    for (const PaperRecord& p : corpus.papers)
        degree[*g.papers_.find(p.paper_id)] = static_cast<std::uint32_t>(p.references.size());

    g.backward_offsets_.assign(n + 1, 0);
    for (std::uint32_t v = 0; v < n; ++v) g.backward_offsets_[v + 1] = g.backward_offsets_[v] + degree[v];
    g.backward_targets_.assign(g.backward_offsets_[n], 0);

    std::vector<std::uint64_t> cursor(g.backward_offsets_.begin(), g.backward_offsets_.end() - 1);
    for (const PaperRecord& p : corpus.papers) {
        const std::uint32_t src = *g.papers_.find(p.paper_id);
        for (const std::string& r : p.references)
            g.backward_targets_[cursor[src]++] = *g.papers_.find(r);
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        auto begin = g.backward_targets_.begin() + static_cast<std::ptrdiff_t>(g.backward_offsets_[v]);
        auto end = g.backward_targets_.begin() + static_cast<std::ptrdiff_t>(g.backward_offsets_[v + 1]);
        std::sort(begin, end);
    }

    g.finalize_from_backward();
    return g;
}

void CitationGraph::finalize_from_backward() {
    const std::uint32_t n = papers_.size();
    dangling_references_ = 0;
    year_anomalies_ = 0;

    // Every citing paper is in-corpus by construction; forward lists are also
    // kept for dangling targets so citers of out-of-corpus references stay
    // queryable.
    std::vector<std::uint32_t> fwd_degree(n, 0);
    for (std::uint32_t src = 0; src < n; ++src) {
        for (std::uint64_t i = backward_offsets_[src]; i < backward_offsets_[src + 1]; ++i) {
            const std::uint32_t dst = backward_targets_[i];
            if (!in_corpus_[dst])
                ++dangling_references_;
            else if (years_[src] < years_[dst])
                ++year_anomalies_;
            ++fwd_degree[dst];
        }
    }

    forward_offsets_.assign(n + 1, 0);
    for (std::uint32_t v = 0; v < n; ++v) forward_offsets_[v + 1] = forward_offsets_[v] + fwd_degree[v];
    forward_targets_.assign(forward_offsets_[n], 0);
    std::vector<std::uint64_t> cursor(forward_offsets_.begin(), forward_offsets_.end() - 1);
    for (std::uint32_t src = 0; src < n; ++src) {
        for (std::uint64_t i = backward_offsets_[src]; i < backward_offsets_[src + 1]; ++i)
            forward_targets_[cursor[backward_targets_[i]]++] = src;
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        auto begin = forward_targets_.begin() + static_cast<std::ptrdiff_t>(forward_offsets_[v]);
        auto end = forward_targets_.begin() + static_cast<std::ptrdiff_t>(forward_offsets_[v + 1]);
        std::sort(begin, end);
    }
}

std::optional<std::uint32_t> CitationGraph::node_of(const std::string& paper_id) const {
    return papers_.find(paper_id);
}

std::span<const std::uint32_t> CitationGraph::references(std::uint32_t node) const {
    return {backward_targets_.data() + backward_offsets_[node],
            backward_targets_.data() + backward_offsets_[node + 1]};
}

std::span<const std::uint32_t> CitationGraph::citers(std::uint32_t node) const {
    return {forward_targets_.data() + forward_offsets_[node],
            forward_targets_.data() + forward_offsets_[node + 1]};
}

void CitationGraph::save(std::ostream& out) const {
    write_header(out, 0);
    write_names(out, papers_.names());
    write_vector(out, in_corpus_);
    write_vector(out, years_);
    write_vector(out, backward_offsets_);
    write_vector(out, backward_targets_);
}

CitationGraph CitationGraph::load(std::istream& in) {
    read_header(in, 0);
    CitationGraph g;
    g.papers_.assign_sorted(read_names(in));
    g.in_corpus_ = read_vector<std::uint8_t>(in);
    g.years_ = read_vector<int>(in);
    g.backward_offsets_ = read_vector<std::uint64_t>(in);
    g.backward_targets_ = read_vector<std::uint32_t>(in);
    if (g.in_corpus_.size() != g.papers_.size() || g.years_.size() != g.papers_.size() ||
        g.backward_offsets_.size() != g.papers_.size() + 1)
        throw DataError("graph snapshot: inconsistent citation sections");
    g.finalize_from_backward();
    return g;
}

// ---------------------------------------------------------------------------
// CollabGraph
// ---------------------------------------------------------------------------

CollabGraph CollabGraph::build(const Corpus& corpus) { return build(corpus, BuildOptions{}); }

CollabGraph CollabGraph::build(const Corpus& corpus, const BuildOptions& options) {
    CollabGraph g;

    std::vector<std::string> ids;
    for (const PaperRecord& p : corpus.papers)
        for (const AuthorRef& a : p.authors) ids.push_back(a.author_id);
    g.authors_.assign_sorted(std::move(ids));

    // (packed pair key, year) per co-authorship event.
    std::vector<std::pair<std::uint64_t, int>> edge_years;
    for (const PaperRecord& p : corpus.papers) {
        if (p.authors.size() > options.team_size_cap) {
            ++g.skipped_papers_;
            continue;
        }
        const std::size_t k = p.authors.size();
        for (std::size_t i = 0; i < k; ++i) {
            const std::uint32_t a = *g.authors_.find(p.authors[i].author_id);
            for (std::size_t j = i + 1; j < k; ++j) {
                const std::uint32_t b = *g.authors_.find(p.authors[j].author_id);
                const std::uint32_t lo = std::min(a, b), hi = std::max(a, b);
                edge_years.emplace_back((static_cast<std::uint64_t>(lo) << 32) | hi, p.year);
            }
        }
    }
    g.finalize_from_edges(edge_years);
    return g;
}

void CollabGraph::finalize_from_edges(std::vector<std::pair<std::uint64_t, int>>& edge_years) {
    std::sort(edge_years.begin(), edge_years.end());

    const std::uint32_t n = authors_.size();
    // Distinct (lo, hi) pairs, each with its sorted year run.
    struct EdgeRun {
        std::uint32_t lo, hi;
        std::uint64_t year_begin, year_end;
    };
    std::vector<EdgeRun> runs;
    std::vector<int> all_years;
    all_years.reserve(edge_years.size());
    for (std::size_t i = 0; i < edge_years.size();) {
        std::size_t j = i;
        const std::uint64_t key = edge_years[i].first;
        const std::uint64_t year_begin = all_years.size();
        while (j < edge_years.size() && edge_years[j].first == key)
            all_years.push_back(edge_years[j++].second);
        runs.push_back({static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key),
                        year_begin, all_years.size()});
        i = j;
    }

    // Symmetric adjacency: every run appears under both endpoints.
    std::vector<std::uint32_t> degree(n, 0);
    for (const EdgeRun& r : runs) {
        ++degree[r.lo];
        ++degree[r.hi];
    }
    adj_offsets_.assign(n + 1, 0);
    for (std::uint32_t v = 0; v < n; ++v) adj_offsets_[v + 1] = adj_offsets_[v] + degree[v];
    const std::uint64_t entries = adj_offsets_[n];
    adj_neighbors_.assign(entries, 0);
    std::vector<std::uint64_t> entry_year_begin(entries, 0), entry_year_end(entries, 0);
    std::vector<std::uint64_t> cursor(adj_offsets_.begin(), adj_offsets_.end() - 1);
    // Runs are sorted by (lo, hi): inserting lo-side entries in run order keeps
    // each node's neighbor list sorted for the lo side; hi-side entries need a
    // per-node sort afterwards.
    for (const EdgeRun& r : runs) {
        const std::uint64_t e1 = cursor[r.lo]++;
        adj_neighbors_[e1] = r.hi;
        entry_year_begin[e1] = r.year_begin;
        entry_year_end[e1] = r.year_end;
        const std::uint64_t e2 = cursor[r.hi]++;
        adj_neighbors_[e2] = r.lo;
        entry_year_begin[e2] = r.year_begin;
        entry_year_end[e2] = r.year_end;
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        const std::uint64_t lo = adj_offsets_[v], hi = adj_offsets_[v + 1];
        std::vector<std::uint64_t> order(hi - lo);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::uint64_t x, std::uint64_t y) {
            return adj_neighbors_[lo + x] < adj_neighbors_[lo + y];
        });
        std::vector<std::uint32_t> nb(hi - lo);
        std::vector<std::uint64_t> yb(hi - lo), ye(hi - lo);
        for (std::uint64_t i = 0; i < hi - lo; ++i) {
            nb[i] = adj_neighbors_[lo + order[i]];
            yb[i] = entry_year_begin[lo + order[i]];
            ye[i] = entry_year_end[lo + order[i]];
        }
        std::copy(nb.begin(), nb.end(), adj_neighbors_.begin() + static_cast<std::ptrdiff_t>(lo));
        std::copy(yb.begin(), yb.end(), entry_year_begin.begin() + static_cast<std::ptrdiff_t>(lo));
        std::copy(ye.begin(), ye.end(), entry_year_end.begin() + static_cast<std::ptrdiff_t>(lo));
    }

    year_offsets_.assign(entries + 1, 0);
    std::uint64_t total = 0;
    years_.clear();
    years_.reserve(all_years.size() * 2);
    for (std::uint64_t e = 0; e < entries; ++e) {
        year_offsets_[e] = total;
        for (std::uint64_t i = entry_year_begin[e]; i < entry_year_end[e]; ++i)
            years_.push_back(all_years[i]);
        total = years_.size();
    }
    year_offsets_[entries] = total;
}

std::optional<std::uint32_t> CollabGraph::node_of(const std::string& author_id) const {
    return authors_.find(author_id);
}

std::size_t CollabGraph::neighbor_count(std::uint32_t node) const {
    return adj_offsets_[node + 1] - adj_offsets_[node];
}

CollabGraph::Neighbor CollabGraph::neighbor(std::uint32_t node, std::size_t i) const {
    const std::uint64_t e = adj_offsets_[node] + i;
    return {adj_neighbors_[e],
            {years_.data() + year_offsets_[e], years_.data() + year_offsets_[e + 1]}};
}

bool CollabGraph::edge_in_window(std::uint32_t a, std::uint32_t b, int year_lo, int year_hi) const {
    const std::uint64_t lo = adj_offsets_[a], hi = adj_offsets_[a + 1];
    auto begin = adj_neighbors_.begin() + static_cast<std::ptrdiff_t>(lo);
    auto end = adj_neighbors_.begin() + static_cast<std::ptrdiff_t>(hi);
    auto it = std::lower_bound(begin, end, b);
    if (it == end || *it != b) return false;
    const std::uint64_t e = lo + static_cast<std::uint64_t>(it - begin);
    const int* ybegin = years_.data() + year_offsets_[e];
    const int* yend = years_.data() + year_offsets_[e + 1];
    auto y = std::lower_bound(ybegin, yend, year_lo);
    return y != yend && *y <= year_hi;
}

std::uint64_t CollabGraph::edge_count() const {
    return adj_neighbors_.size() / 2;
}

void CollabGraph::save(std::ostream& out) const {
    write_header(out, 1);
    write_names(out, authors_.names());
    write_pod<std::uint64_t>(out, skipped_papers_);
    // Store each distinct pair once (lo < hi) with its year run.
    std::vector<std::pair<std::uint64_t, int>> edge_years;
    const std::uint32_t n = authors_.size();
    for (std::uint32_t v = 0; v < n; ++v) {
        for (std::uint64_t e = adj_offsets_[v]; e < adj_offsets_[v + 1]; ++e) {
            const std::uint32_t w = adj_neighbors_[e];
            if (w < v) continue;
            for (std::uint64_t i = year_offsets_[e]; i < year_offsets_[e + 1]; ++i)
                edge_years.emplace_back((static_cast<std::uint64_t>(v) << 32) | w, years_[i]);
        }
    }
    write_pod<std::uint64_t>(out, edge_years.size());
    for (const auto& [key, year] : edge_years) {
        write_pod<std::uint64_t>(out, key);
        write_pod<std::int32_t>(out, year);
    }
}

CollabGraph CollabGraph::load(std::istream& in) {
    read_header(in, 1);
    CollabGraph g;
    g.authors_.assign_sorted(read_names(in));
    g.skipped_papers_ = read_pod<std::uint64_t>(in);
    const auto n_events = read_pod<std::uint64_t>(in);
    std::vector<std::pair<std::uint64_t, int>> edge_years;
    edge_years.reserve(n_events);
    for (std::uint64_t i = 0; i < n_events; ++i) {
        const auto key = read_pod<std::uint64_t>(in);
        const auto year = read_pod<std::int32_t>(in);
        edge_years.emplace_back(key, year);
    }
    g.finalize_from_edges(edge_years);
    return g;
}

// ---------------------------------------------------------------------------
// Prior network and connected components
// ---------------------------------------------------------------------------

PriorNetwork prior_subnetwork(const CollabGraph& graph, const std::vector<AuthorRef>& team,
                              int focal_year, int window) {
    if (team.empty()) throw DataError("prior_subnetwork: empty team");
    if (window < 2 || window > 7)
        throw ConfigError("prior window must be in [2, 7], got " + std::to_string(window));

    PriorNetwork net;
    net.focal_year = focal_year;
    net.window = window;
    net.members.reserve(team.size());
    for (const AuthorRef& a : team) net.members.push_back(a.author_id);

    const int year_lo = focal_year - window;
    const int year_hi = focal_year - 1;

    std::unordered_map<std::uint32_t, std::uint32_t> local;  // graph node -> member index
    std::vector<std::optional<std::uint32_t>> nodes(team.size());
    for (std::uint32_t i = 0; i < team.size(); ++i) {
        nodes[i] = graph.node_of(team[i].author_id);
        if (nodes[i]) local.emplace(*nodes[i], i);
    }

    for (std::uint32_t i = 0; i < team.size(); ++i) {
        if (!nodes[i]) continue;
        const std::uint32_t v = *nodes[i];
        const std::size_t deg = graph.neighbor_count(v);
        for (std::size_t k = 0; k < deg; ++k) {
            const auto nb = graph.neighbor(v, k);
            auto it = local.find(nb.node);
            if (it == local.end() || it->second <= i) continue;  // count each pair once
            auto y = std::lower_bound(nb.years.begin(), nb.years.end(), year_lo);
            if (y != nb.years.end() && *y <= year_hi) net.edges.emplace_back(i, it->second);
        }
    }
    std::sort(net.edges.begin(), net.edges.end());
    return net;
}

namespace {

class UnionFind {
public:
    explicit UnionFind(std::uint32_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        std::uint32_t root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) {
            std::uint32_t next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

}  // namespace

ComponentResult connected_components(std::uint32_t n_nodes,
                                     std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
    UnionFind uf(n_nodes);
    for (const auto& [a, b] : edges) uf.unite(a, b);

    ComponentResult result;
    result.labels.assign(n_nodes, 0);
    std::vector<std::uint32_t> canonical(n_nodes, std::numeric_limits<std::uint32_t>::max());
    for (std::uint32_t v = 0; v < n_nodes; ++v) {
        const std::uint32_t root = uf.find(v);
        if (canonical[root] == std::numeric_limits<std::uint32_t>::max()) {
            canonical[root] = v;  // first visit in index order = smallest member
            ++result.count;
        }
        result.labels[v] = canonical[root];
    }
    return result;
}

}  // namespace sdlab
