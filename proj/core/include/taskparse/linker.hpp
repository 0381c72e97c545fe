#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taskparse/parse_tree.hpp"
#include "taskparse/schema.hpp"

namespace taskparse {

struct LinkerConfig {
    // Minimum best-window similarity for a catalog surface to count as
    // present in the utterance.  1.0 keeps exact matches only.
    double threshold = 0.85;
    // Drop matched quantity-one values (articles like "a" fire constantly);
    // the evaluator's post-processing restores the default count.
    bool suppress_unit_number = true;
    // Link exactly the values of a provided gold parse instead of fuzzy
    // matching.  Used to measure the upper bound the matcher leaves behind.
    bool oracle = false;

    void validate() const;  // throws Error on out-of-range settings
};

// One catalog surface found in the utterance.
struct LinkedValue {
    std::string surface;     // catalog surface (or lexicon phrase) as authored
    std::string entity;
    double score = 1.0;
    std::size_t begin = 0;   // byte span of the matched window
    std::size_t end = 0;
    bool from_lexicon = false;  // wrapper-slot trigger phrase, not a catalog entry
};

struct LinkedSlot {
    std::string slot;
    std::vector<LinkedValue> values;  // ordered by span start
};

struct LinkedIntent {
    std::string intent;
    std::optional<std::string> matched_keyword;
    std::size_t anchor = 0;  // span start of the keyword or earliest value
    std::vector<LinkedSlot> slots;
};

// The schema fragment judged relevant to one utterance.
struct LinkedSchema {
    std::vector<LinkedIntent> intents;  // ordered by anchor position

    bool empty() const { return intents.empty(); }
};

// Scores every catalog surface and wrapper phrase against the utterance by
// best-window normalized edit similarity, dedupes per entity keeping the
// higher score, and groups survivors under every intent that can parent
// them.  Wholly deterministic.
LinkedSchema fuzzy_match(std::string_view utterance,
                         const SchemaBundle& bundle,
                         const LinkerConfig& config = {});

// Builds the fragment containing exactly the gold parse's intents, slots,
// and values, with each entity rendered by its first catalog surface.
// Throws when the gold parse does not fit the bundle.
LinkedSchema oracle_link(std::string_view utterance,
                         const ParseForest& gold,
                         const SchemaBundle& bundle);

// Renders "utterance [I] INTENT : keyword [S] SLOT [V] value ..." for a
// downstream model prompt.
std::string serialize_input(std::string_view utterance, const LinkedSchema& linked);

// Gold (slot, entity) pairs the fragment is missing.  Quantity-one NUMBER
// values are never reported; suppression plus post-processing covers them.
std::vector<std::pair<std::string, std::string>> coverage_report(
    const LinkedSchema& linked, const ParseForest& gold_resolved);

// Heuristic parser over the linked fragment: keyword- and unique-slot
// intents become roots, every value attaches to the nearest root that can
// hold it, and missing counts default to 1.  Throws when nothing links.
ParseForest baseline_parse(std::string_view utterance,
                           const LinkedSchema& linked,
                           const SchemaBundle& bundle);

}  // namespace taskparse
