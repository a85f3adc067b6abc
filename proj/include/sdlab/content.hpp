#ifndef SDLAB_CONTENT_HPP
#define SDLAB_CONTENT_HPP

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace sdlab {

/// Version tag of the syllable heuristic used by flesch_reading_ease; bump
/// when the heuristic changes so downstream results stay attributable.
inline constexpr int kSyllableHeuristicVersion = 1;

/// Splits on Unicode whitespace and strips punctuation from token edges.
/// Hyphenated compounds stay one token. Tokens empty after stripping vanish.
std::vector<std::string> tokenize_title(const std::string& title);

int title_word_count(const std::string& title);

/// Vowel-run heuristic: count maximal [aeiouy] runs (ASCII, case-folded),
/// subtract a terminal 'e', floor at 1.
int count_syllables_in_word(const std::string& word);

/// 206.835 - 1.015 * words/sentences - 84.6 * syllables/words, with
/// sentences = max(1, number of terminal-punctuation runs). Missing for
/// titles without words.
std::optional<double> flesch_reading_ease(const std::string& title);

class PromoLexicon {
public:
    static PromoLexicon from_file(const std::string& path);
    static PromoLexicon from_words(std::vector<std::string> words);

    bool contains(const std::string& lowercase_token) const;
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

/// Case-insensitive exact-token matches / total tokens * 100.
/// Missing for titles without tokens.
std::optional<double> promotional_fraction(const std::string& title, const PromoLexicon& lexicon);

}  // namespace sdlab

#endif
