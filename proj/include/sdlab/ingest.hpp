#ifndef SDLAB_INGEST_HPP
#define SDLAB_INGEST_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdlab/types.hpp"

namespace sdlab {

/// Maps our canonical field names onto the names used by the input source,
/// so OpenAlex- and AMiner-style exports can be ingested without rewriting.
/// Keys not present fall back to the canonical name itself.
struct SchemaConfig {
    int year_min = 1900;
    int year_max = 2025;
    std::map<std::string, std::string> field_map;  // canonical -> source name

    const std::string& source_name(const std::string& canonical) const;
};

struct Reject {
    std::size_t line = 0;  // 1-based input line number
    std::string reason;
};

struct ParseResult {
    Corpus corpus;
    std::vector<Reject> rejects;
    std::size_t lines_total = 0;
    std::size_t self_references_removed = 0;
    std::size_t duplicate_references_removed = 0;
    std::size_t article_type_defaulted = 0;
};

/// Parses one JSON object per line. Malformed or structurally invalid lines
/// go to the rejects report; parsing never aborts the stream. Order of
/// accepted records follows input order.
ParseResult parse_corpus(std::istream& input, const SchemaConfig& config = {});
ParseResult parse_corpus_file(const std::string& path, const SchemaConfig& config = {});

/// Canonical single-line JSON form of a record. parse(serialize(r)) == r for
/// every valid record, and serialization is byte-deterministic.
std::string serialize_record(const PaperRecord& record);
void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);

void write_rejects_tsv(const std::vector<Reject>& rejects, std::ostream& out);

Corpus filter_research_articles(const Corpus& corpus);

struct AuthorProfile {
    std::string author_id;
    int first_pub_year = 0;
    /// (year, cumulative publication count through that year), ascending.
    std::vector<std::pair<int, int>> cumulative_pubs;
    int institution_h_index = 0;

    int pubs_through(int year) const;      // cumulative count at `year`
    int pubs_in_window(int lo, int hi) const;  // publications with year in [lo, hi]
};

using AuthorProfileMap = std::unordered_map<std::string, AuthorProfile>;

/// institution_id -> h-index. Duplicate rows with conflicting values are an
/// error; exact duplicates are tolerated.
class HIndexTable {
public:
    static HIndexTable from_tsv(std::istream& in);
    static HIndexTable from_tsv_file(const std::string& path);

    int lookup(const std::string& institution_id) const;  // 0 when absent
    bool contains(const std::string& institution_id) const;
    std::size_t size() const { return table_.size(); }
    void set(const std::string& institution_id, int h) { table_[institution_id] = h; }

private:
    std::unordered_map<std::string, int> table_;
};

/// Builds per-author career profiles over the full corpus. The profile
/// h-index is resolved from the institution on the author's most recent
/// paper that lists one (0 when nothing is known).
AuthorProfileMap build_author_profiles(const Corpus& corpus, const HIndexTable* h_index = nullptr);

/// Keeps papers whose every author has at least one publication in
/// [t - window_years, t - 1] according to `profiles`. window_years must be
/// in [2, 7].
Corpus filter_traceable_history(const Corpus& corpus, const AuthorProfileMap& profiles,
                                int window_years = 5);

}  // namespace sdlab

#endif
