#ifndef SDLAB_TYPES_HPP
#define SDLAB_TYPES_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdlab {

/// Error in user-supplied configuration (bad window, missing file, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Error in input data that cannot be repaired (conflicting lookup rows, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical/statistical precondition failure (rank deficiency, zero variance, ...).
class StatError : public std::runtime_error {
public:
    explicit StatError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ArticleType : std::uint8_t {
    ResearchArticle = 0,
    Review = 1,
    Editorial = 2,
    Other = 3,
};

const char* to_string(ArticleType t);
ArticleType article_type_from_string(const std::string& s, bool* known = nullptr);

struct AuthorRef {
    std::string author_id;
    std::optional<std::string> institution_id;

    bool operator==(const AuthorRef&) const = default;
};

/// One bibliographic record. Validation happens at parse time; a constructed
/// record is assumed to satisfy the invariants (non-empty distinct authors,
/// no self-reference, year within the configured range).
struct PaperRecord {
    std::string paper_id;
    std::string title;
    int year = 0;
    std::string discipline;
    std::vector<AuthorRef> authors;
    std::vector<std::string> references;
    ArticleType article_type = ArticleType::ResearchArticle;
    bool nsf_funded = false;

    bool operator==(const PaperRecord&) const = default;
};

struct Corpus {
    std::vector<PaperRecord> papers;

    std::size_t size() const { return papers.size(); }
    bool empty() const { return papers.empty(); }
};

enum class BroadField : std::uint8_t {
    NaturalSciences = 0,
    AppliedSciences = 1,
    SocialSciences = 2,
    Humanities = 3,
};

const char* to_string(BroadField f);

/// The 19 top-level discipline labels recognized by the toolkit.
const std::vector<std::string>& discipline_labels();

/// Maps one of the 19 labels onto its broad category.
/// Throws DataError for unknown labels (message lists the valid ones).
BroadField map_discipline_group(const std::string& discipline);

}  // namespace sdlab

#endif
