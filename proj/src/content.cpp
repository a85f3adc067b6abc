#include "sdlab/content.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>

#include "sdlab/types.hpp"

namespace sdlab {

namespace {

// Decodes one UTF-8 codepoint starting at `i`; advances `i`. Invalid bytes
// are consumed one at a time and returned as-is.
std::uint32_t next_codepoint(const std::string& s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int extra = 0;
    std::uint32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        ++i;
        return b0;
    }
    if (i + static_cast<std::size_t>(extra) >= s.size()) {
        ++i;
        return b0;
    }
    for (int k = 1; k <= extra; ++k) {
        const unsigned char bk = byte(i + k);
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return b0;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += extra + 1;
    return cp;
}

bool is_unicode_space(std::uint32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_edge_punct(const std::string& token, std::size_t pos) {
    const unsigned char c = static_cast<unsigned char>(token[pos]);
    return c < 0x80 && std::ispunct(c);
}

std::string strip_edges(const std::string& token) {
    std::size_t begin = 0, end = token.size();
    while (begin < end && is_edge_punct(token, begin)) ++begin;
    while (end > begin && is_edge_punct(token, end - 1)) --end;
    return token.substr(begin, end - begin);
}

}  // namespace

std::vector<std::string> tokenize_title(const std::string& title) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    const auto flush = [&] {
        if (!current.empty()) {
            std::string stripped = strip_edges(current);
            if (!stripped.empty()) tokens.push_back(std::move(stripped));
            current.clear();
        }
    };
    while (i < title.size()) {
        const std::size_t start = i;
        const std::uint32_t cp = next_codepoint(title, i);
        if (is_unicode_space(cp)) {
            flush();
        } else {
            current.append(title, start, i - start);
        }
    }
    flush();
    return tokens;
}

int title_word_count(const std::string& title) {
    return static_cast<int>(tokenize_title(title).size());
}

int count_syllables_in_word(const std::string& word) {
    const auto is_vowel = [](char c) {
        switch (std::tolower(static_cast<unsigned char>(c))) {
            case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
                return true;
            default:
                return false;
        }
    };
    int runs = 0;
    bool in_run = false;
    for (char c : word) {
        if (is_vowel(c)) {
            if (!in_run) ++runs;
            in_run = true;
        } else {
            in_run = false;
        }
    }
    if (!word.empty() && std::tolower(static_cast<unsigned char>(word.back())) == 'e') --runs;
    return std::max(runs, 1);
}

std::optional<double> flesch_reading_ease(const std::string& title) {
    const auto tokens = tokenize_title(title);
    if (tokens.empty()) return std::nullopt;

    int sentence_runs = 0;
    bool in_terminal_run = false;
    for (char c : title) {
        const bool terminal = c == '.' || c == '!' || c == '?';
        if (terminal && !in_terminal_run) ++sentence_runs;
        in_terminal_run = terminal;
    }
    const double sentences = std::max(sentence_runs, 1);

    double syllables = 0.0;
    for (const std::string& token : tokens) syllables += count_syllables_in_word(token);

    const double words = static_cast<double>(tokens.size());
    return 206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words);
}

PromoLexicon PromoLexicon::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open promotional lexicon: " + path);
    PromoLexicon lex;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::transform(line.begin(), line.end(), line.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        lex.words_.insert(line);
    }
    return lex;
}

PromoLexicon PromoLexicon::from_words(std::vector<std::string> words) {
    PromoLexicon lex;
    for (std::string& w : words) {
        std::transform(w.begin(), w.end(), w.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        lex.words_.insert(std::move(w));
    }
    return lex;
}

bool PromoLexicon::contains(const std::string& lowercase_token) const {
    return words_.find(lowercase_token) != words_.end();
}

std::optional<double> promotional_fraction(const std::string& title, const PromoLexicon& lexicon) {
    const auto tokens = tokenize_title(title);
    if (tokens.empty()) return std::nullopt;
    std::size_t matches = 0;
    for (const std::string& token : tokens) {
        std::string lower = token;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (lexicon.contains(lower)) ++matches;
    }
    return 100.0 * static_cast<double>(matches) / static_cast<double>(tokens.size());
}

}  // namespace sdlab
