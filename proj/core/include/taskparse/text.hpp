#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace taskparse {

// Lowercases ASCII letters, collapses runs of whitespace to single spaces,
// and trims the ends.  This is the canonical form used for catalog surface
// keys and utterance comparison.
std::string normalize_surface(std::string_view text);

// Normalization used by the fuzzy matcher: lowercase, apostrophes removed,
// every other non-alphanumeric character treated as a space, whitespace
// collapsed.  "Large-size" and "large size" map to the same key.
std::string match_key(std::string_view text);

// A word occurrence inside an utterance.  `begin`/`end` are byte offsets into
// the original string; `key` is the match_key form of the word.
struct WordSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string key;
};

// Splits an utterance into words.  A word is a maximal run of alphanumeric
// characters and apostrophes, so "large-size" yields two words.
std::vector<WordSpan> word_spans(std::string_view text);

// Classic Levenshtein distance over bytes.
std::size_t edit_distance(std::string_view a, std::string_view b);

// 1 - edit_distance / max(len).  Two empty strings score 1.
double edit_similarity(std::string_view a, std::string_view b);

// Spells a non-negative integer in words: 0 -> "zero", 21 -> "twenty one",
// 100 -> "one hundred".  Values above 100 are spelled digit by digit
// ("101" -> "one zero one").
std::string spell_number(unsigned value);

// True when `text` is a non-empty run of ASCII digits.
bool is_integer_literal(std::string_view text);

// Cleans one raw utterance into zero or more normalized pieces:
//   * split on '.', '?', and '!' (sentence boundaries),
//   * drop commas, semicolons, colons, and non-ASCII bytes without splitting,
//   * rewrite digit runs into spelled-out words,
//   * lowercase and collapse whitespace.
// Pieces that end up empty are dropped.
std::vector<std::string> normalize_utterance(std::string_view text);

// Same cleaning minus the sentence split; raises ParseError when the text
// contains a sentence boundary.  Used for template output, which must stay a
// single utterance.
std::string normalize_single_utterance(std::string_view text);

}  // namespace taskparse
