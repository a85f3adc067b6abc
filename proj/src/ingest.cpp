#include "sdlab/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace sdlab {

using nlohmann::json;

const std::string& SchemaConfig::source_name(const std::string& canonical) const {
    auto it = field_map.find(canonical);
    return it == field_map.end() ? canonical : it->second;
}

namespace {

void append_json_escaped(std::string& out, const std::string& s) {
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
}

struct LineParser {
    const SchemaConfig& cfg;

    // Returns empty reason on success.
    std::string parse(const std::string& line, PaperRecord& rec, ParseResult& stats) const {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) return "malformed json";
        if (!j.is_object()) return "not a json object";

        const auto get = [&](const char* canonical) -> const json* {
            auto it = j.find(cfg.source_name(canonical));
            return it == j.end() || it->is_null() ? nullptr : &*it;
        };

        const json* id = get("paper_id");
        if (!id || !id->is_string() || id->get_ref<const std::string&>().empty())
            return "missing field: paper_id";
        rec.paper_id = id->get<std::string>();

        const json* year = get("year");
        if (!year || !year->is_number_integer()) return "missing field: year";
        rec.year = year->get<int>();
        if (rec.year < cfg.year_min || rec.year > cfg.year_max) {
            std::ostringstream oss;
            oss << "year " << rec.year << " outside [" << cfg.year_min << ", " << cfg.year_max << "]";
            return oss.str();
        }

        const json* authors = get("authors");
        if (!authors || !authors->is_array() || authors->empty()) return "missing field: authors";
        rec.authors.clear();
        std::unordered_set<std::string> seen_authors;
        for (const json& a : *authors) {
            AuthorRef ref;
            if (a.is_string()) {
                ref.author_id = a.get<std::string>();
            } else if (a.is_object()) {
                auto it = a.find(cfg.source_name("author_id"));
                if (it == a.end() || !it->is_string()) return "author entry missing author_id";
                ref.author_id = it->get<std::string>();
                auto inst = a.find(cfg.source_name("institution_id"));
                if (inst != a.end() && inst->is_string() && !inst->get_ref<const std::string&>().empty())
                    ref.institution_id = inst->get<std::string>();
            } else {
                return "author entry is neither string nor object";
            }
            if (ref.author_id.empty()) return "author entry missing author_id";
            if (!seen_authors.insert(ref.author_id).second)
                return "duplicate author_id: " + ref.author_id;
            rec.authors.push_back(std::move(ref));
        }

        rec.title.clear();
        if (const json* title = get("title"); title && title->is_string())
            rec.title = title->get<std::string>();

        rec.discipline.clear();
        if (const json* disc = get("discipline"); disc && disc->is_string())
            rec.discipline = disc->get<std::string>();

        rec.references.clear();
        if (const json* refs = get("references"); refs) {
            if (!refs->is_array()) return "references is not an array";
            std::unordered_set<std::string> seen_refs;
            for (const json& r : *refs) {
                if (!r.is_string()) return "reference entry is not a string";
                std::string rid = r.get<std::string>();
                if (rid == rec.paper_id) {
                    ++stats.self_references_removed;
                    continue;
                }
                if (!seen_refs.insert(rid).second) {
                    ++stats.duplicate_references_removed;
                    continue;
                }
                rec.references.push_back(std::move(rid));
            }
        }

        rec.article_type = ArticleType::ResearchArticle;
        if (const json* type = get("article_type"); type && type->is_string()) {
            bool known = false;
            rec.article_type = article_type_from_string(type->get<std::string>(), &known);
            if (!known) ++stats.article_type_defaulted;  // unknown label mapped to `other`
        } else {
            ++stats.article_type_defaulted;
        }

        rec.nsf_funded = false;
        if (const json* nsf = get("nsf_funded"); nsf && nsf->is_boolean())
            rec.nsf_funded = nsf->get<bool>();

        return {};
    }
};

}  // namespace

ParseResult parse_corpus(std::istream& input, const SchemaConfig& config) {
    ParseResult result;
    LineParser parser{config};
    std::string line;
    std::size_t line_no = 0;
    PaperRecord rec;
    while (std::getline(input, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::string reason = parser.parse(line, rec, result);
        if (reason.empty()) {
            result.corpus.papers.push_back(std::move(rec));
            rec = PaperRecord{};
        } else {
            result.rejects.push_back({line_no, std::move(reason)});
        }
    }
    result.lines_total = line_no;
    return result;
}

ParseResult parse_corpus_file(const std::string& path, const SchemaConfig& config) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open corpus file: " + path);
    return parse_corpus(in, config);
}

std::string serialize_record(const PaperRecord& record) {
    std::string out;
    out.reserve(128 + record.title.size());
    out += "{\"paper_id\":\"";
    append_json_escaped(out, record.paper_id);
    out += "\",\"title\":\"";
    append_json_escaped(out, record.title);
    out += "\",\"year\":";
    out += std::to_string(record.year);
    out += ",\"discipline\":\"";
    append_json_escaped(out, record.discipline);
    out += "\",\"authors\":[";
    for (std::size_t i = 0; i < record.authors.size(); ++i) {
        if (i) out += ',';
        out += "{\"author_id\":\"";
        append_json_escaped(out, record.authors[i].author_id);
        out += '"';
        if (record.authors[i].institution_id) {
            out += ",\"institution_id\":\"";
            append_json_escaped(out, *record.authors[i].institution_id);
            out += '"';
        }
        out += '}';
    }
    out += "],\"references\":[";
    for (std::size_t i = 0; i < record.references.size(); ++i) {
        if (i) out += ',';
        out += '"';
        append_json_escaped(out, record.references[i]);
        out += '"';
    }
    out += "],\"article_type\":\"";
    out += to_string(record.article_type);
    out += "\",\"nsf_funded\":";
    out += record.nsf_funded ? "true" : "false";
    out += '}';
    return out;
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
    for (const PaperRecord& p : corpus.papers) {
        out << serialize_record(p) << '\n';
    }
}

void write_rejects_tsv(const std::vector<Reject>& rejects, std::ostream& out) {
    out << "line\treason\n";
    for (const Reject& r : rejects) out << r.line << '\t' << r.reason << '\n';
}

Corpus filter_research_articles(const Corpus& corpus) {
    Corpus out;
    out.papers.reserve(corpus.papers.size());
    for (const PaperRecord& p : corpus.papers) {
        if (p.article_type == ArticleType::ResearchArticle) out.papers.push_back(p);
    }
    return out;
}

int AuthorProfile::pubs_through(int year) const {
    int count = 0;
    for (const auto& [y, c] : cumulative_pubs) {
        if (y > year) break;
        count = c;
    }
    return count;
}

int AuthorProfile::pubs_in_window(int lo, int hi) const {
    if (hi < lo) return 0;
    return pubs_through(hi) - pubs_through(lo - 1);
}

HIndexTable HIndexTable::from_tsv(std::istream& in) {
    HIndexTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError("h-index table line " + std::to_string(line_no) + ": expected two tab-separated fields");
        std::string id = line.substr(0, tab);
        int h = 0;
        try {
            h = std::stoi(line.substr(tab + 1));
        } catch (const std::exception&) {
            throw DataError("h-index table line " + std::to_string(line_no) + ": bad h-index value");
        }
        if (h < 0) throw DataError("h-index table line " + std::to_string(line_no) + ": negative h-index");
        auto [it, inserted] = table.table_.emplace(id, h);
        if (!inserted && it->second != h)
            throw DataError("conflicting h-index rows for institution \"" + id + "\"");
    }
    return table;
}

HIndexTable HIndexTable::from_tsv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open h-index table: " + path);
    return from_tsv(in);
}

int HIndexTable::lookup(const std::string& institution_id) const {
    auto it = table_.find(institution_id);
    return it == table_.end() ? 0 : it->second;
}

bool HIndexTable::contains(const std::string& institution_id) const {
    return table_.find(institution_id) != table_.end();
}

AuthorProfileMap build_author_profiles(const Corpus& corpus, const HIndexTable* h_index) {
    // Gather publication years and the latest-listed institution per author.
    struct Accum {
        std::vector<int> years;
        std::string institution;
        int institution_year = -1;
    };
    std::unordered_map<std::string, Accum> accum;
    accum.reserve(corpus.papers.size() * 2);
    for (const PaperRecord& p : corpus.papers) {
        for (const AuthorRef& a : p.authors) {
            Accum& acc = accum[a.author_id];
            acc.years.push_back(p.year);
            if (a.institution_id && p.year > acc.institution_year) {
                acc.institution = *a.institution_id;
                acc.institution_year = p.year;
            }
        }
    }

    AuthorProfileMap profiles;
    profiles.reserve(accum.size());
    for (auto& [id, acc] : accum) {
        AuthorProfile prof;
        prof.author_id = id;
        std::sort(acc.years.begin(), acc.years.end());
        prof.first_pub_year = acc.years.front();
        int running = 0;
        for (std::size_t i = 0; i < acc.years.size(); ++i) {
            ++running;
            if (i + 1 == acc.years.size() || acc.years[i + 1] != acc.years[i])
                prof.cumulative_pubs.emplace_back(acc.years[i], running);
        }
        if (h_index && acc.institution_year >= 0)
            prof.institution_h_index = h_index->lookup(acc.institution);
        profiles.emplace(id, std::move(prof));
    }
    return profiles;
}

Corpus filter_traceable_history(const Corpus& corpus, const AuthorProfileMap& profiles,
                                int window_years) {
    if (window_years < 2 || window_years > 7)
        throw ConfigError("window_years must be in [2, 7], got " + std::to_string(window_years));
    Corpus out;
    for (const PaperRecord& p : corpus.papers) {
        bool all_traceable = true;
        for (const AuthorRef& a : p.authors) {
            auto it = profiles.find(a.author_id);
            if (it == profiles.end() ||
                it->second.pubs_in_window(p.year - window_years, p.year - 1) < 1) {
                all_traceable = false;
                break;
            }
        }
        if (all_traceable) out.papers.push_back(p);
    }
    return out;
}

}  // namespace sdlab
