#include "sdlab/types.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <unordered_map>

namespace sdlab {

const char* to_string(ArticleType t) {
    switch (t) {
        case ArticleType::ResearchArticle: return "research_article";
        case ArticleType::Review: return "review";
        case ArticleType::Editorial: return "editorial";
        case ArticleType::Other: return "other";
    }
    return "other";
}

ArticleType article_type_from_string(const std::string& s, bool* known) {
    std::string v = s;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (known) *known = true;
    if (v == "research_article" || v == "research-article" || v == "article" || v == "journal-article")
        return ArticleType::ResearchArticle;
    if (v == "review" || v == "review-article") return ArticleType::Review;
    if (v == "editorial") return ArticleType::Editorial;
    if (v == "other" || v == "letter" || v == "erratum" || v == "book-chapter" || v == "dataset" ||
        v == "paratext")
        return ArticleType::Other;
    if (known) *known = false;
    return ArticleType::Other;
}

const char* to_string(BroadField f) {
    switch (f) {
        case BroadField::NaturalSciences: return "Natural Sciences";
        case BroadField::AppliedSciences: return "Applied Sciences";
        case BroadField::SocialSciences: return "Social Sciences";
        case BroadField::Humanities: return "Humanities";
    }
    return "Natural Sciences";
}

namespace {

const std::vector<std::pair<std::string, BroadField>>& field_table() {
    static const std::vector<std::pair<std::string, BroadField>> table = {
        {"Biology", BroadField::NaturalSciences},
        {"Chemistry", BroadField::NaturalSciences},
        {"Environmental Science", BroadField::NaturalSciences},
        {"Geology", BroadField::NaturalSciences},
        {"Mathematics", BroadField::NaturalSciences},
        {"Medicine", BroadField::NaturalSciences},
        {"Physics", BroadField::NaturalSciences},
        {"Computer Science", BroadField::AppliedSciences},
        {"Engineering", BroadField::AppliedSciences},
        {"Materials Science", BroadField::AppliedSciences},
        {"Business", BroadField::SocialSciences},
        {"Economics", BroadField::SocialSciences},
        {"Geography", BroadField::SocialSciences},
        {"Political Science", BroadField::SocialSciences},
        {"Psychology", BroadField::SocialSciences},
        {"Sociology", BroadField::SocialSciences},
        {"Art", BroadField::Humanities},
        {"History", BroadField::Humanities},
        {"Philosophy", BroadField::Humanities},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& discipline_labels() {
    static const std::vector<std::string> labels = [] {
        std::vector<std::string> v;
        for (const auto& [name, _] : field_table()) v.push_back(name);
        return v;
    }();
    return labels;
}

BroadField map_discipline_group(const std::string& discipline) {
    static const std::unordered_map<std::string, BroadField> lookup = [] {
        std::unordered_map<std::string, BroadField> m;
        for (const auto& [name, f] : field_table()) m.emplace(name, f);
        return m;
    }();
    auto it = lookup.find(discipline);
    if (it == lookup.end()) {
        std::ostringstream oss;
        oss << "unknown discipline label \"" << discipline << "\"; valid labels:";
        for (const auto& name : discipline_labels()) oss << " \"" << name << "\"";
        throw DataError(oss.str());
    }
    return it->second;
}

}  // namespace sdlab
