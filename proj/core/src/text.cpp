#include "taskparse/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "taskparse/errors.hpp"

namespace taskparse {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

char to_lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string collapse(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string normalize_surface(std::string_view text) {
    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), to_lower);
    return collapse(lowered);
}

std::string match_key(std::string_view text) {
    std::string mapped;
    mapped.reserve(text.size());
    for (char c : text) {
        if (c == '\'') continue;
        if (is_alnum(c)) {
            mapped.push_back(to_lower(c));
        } else {
            mapped.push_back(' ');
        }
    }
    return collapse(mapped);
}

std::vector<WordSpan> word_spans(std::string_view text) {
    std::vector<WordSpan> words;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_alnum(text[i]) && text[i] != '\'') {
            ++i;
            continue;
        }
        std::size_t begin = i;
        std::string key;
        while (i < text.size() && (is_alnum(text[i]) || text[i] == '\'')) {
            if (text[i] != '\'') key.push_back(to_lower(text[i]));
            ++i;
        }
        if (!key.empty()) {
            words.push_back(WordSpan{begin, i, std::move(key)});
        }
    }
    return words;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(a.size() + 1);
    std::vector<std::size_t> cur(a.size() + 1);
    for (std::size_t i = 0; i <= a.size(); ++i) prev[i] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
        cur[0] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            std::size_t sub = prev[i - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[i] = std::min({prev[i] + 1, cur[i - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[a.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
    std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

std::string spell_number(unsigned value) {
    static constexpr std::array<const char*, 20> kUnits = {
        "zero", "one",  "two",  "three", "four",  "five",  "six",
        "seven", "eight", "nine", "ten",  "eleven", "twelve", "thirteen",
        "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
    static constexpr std::array<const char*, 10> kTens = {
        "", "", "twenty", "thirty", "forty", "fifty",
        "sixty", "seventy", "eighty", "ninety"};

    if (value < 20) return kUnits[value];
    if (value < 100) {
        std::string out = kTens[value / 10];
        if (value % 10 != 0) {
            out += ' ';
            out += kUnits[value % 10];
        }
        return out;
    }
    if (value == 100) return "one hundred";
    // Larger values fall back to digit-by-digit spelling.
    std::string digits = std::to_string(value);
    std::string out;
    for (char d : digits) {
        if (!out.empty()) out += ' ';
        out += kUnits[static_cast<unsigned>(d - '0')];
    }
    return out;
}

bool is_integer_literal(std::string_view text) {
    if (text.empty()) return false;
    return std::all_of(text.begin(), text.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
    });
}

namespace {

// Shared by both normalization entry points: everything except the
// sentence split.
std::string clean_piece(std::string_view piece) {
    std::string kept;
    kept.reserve(piece.size());
    for (char c : piece) {
        unsigned char uc = static_cast<unsigned char>(c);
        if (uc > 0x7f) continue;  // drop non-ASCII bytes, no split
        if (c == ',' || c == ';' || c == ':') continue;
        kept.push_back(to_lower(c));
    }

    // Rewrite each maximal digit run into words.
    std::string spelled;
    spelled.reserve(kept.size());
    std::size_t i = 0;
    while (i < kept.size()) {
        if (std::isdigit(static_cast<unsigned char>(kept[i])) == 0) {
            spelled.push_back(kept[i]);
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < kept.size() && std::isdigit(static_cast<unsigned char>(kept[i])) != 0) {
            ++i;
        }
        std::string run(kept.substr(begin, i - begin));
        unsigned value = 0;
        bool fits = run.size() <= 9;
        if (fits) value = static_cast<unsigned>(std::stoul(run));
        if (!spelled.empty() && spelled.back() != ' ') spelled.push_back(' ');
        spelled += fits ? spell_number(value) : run;
        if (i < kept.size() && kept[i] != ' ') spelled.push_back(' ');
    }
    return collapse(spelled);
}

}  // namespace

std::vector<std::string> normalize_utterance(std::string_view text) {
    std::vector<std::string> pieces;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        bool boundary = i == text.size() || text[i] == '.' || text[i] == '?' || text[i] == '!';
        if (!boundary) continue;
        std::string piece = clean_piece(text.substr(start, i - start));
        if (!piece.empty()) pieces.push_back(std::move(piece));
        start = i + 1;
    }
    return pieces;
}

std::string normalize_single_utterance(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '.' || text[i] == '?' || text[i] == '!') {
            throw ParseError("sentence boundary in single-utterance text", i);
        }
    }
    return clean_piece(text);
}

}  // namespace taskparse
