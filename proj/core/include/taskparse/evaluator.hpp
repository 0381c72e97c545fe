#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "taskparse/dataset.hpp"
#include "taskparse/linker.hpp"
#include "taskparse/parse_tree.hpp"
#include "taskparse/schema.hpp"

namespace taskparse {

// Inserts the default count (NUMBER 1) into every intent that lacks a
// NUMBER child, mirroring the unit suppression on the input side.
// Idempotent; nested slots are untouched.
ParseForest postprocess(const ParseForest& prediction);

struct EvalReport {
    std::size_t n_examples = 0;
    std::size_t n_correct = 0;
    std::size_t n_invalid_parses = 0;   // predictions that failed to parse/resolve
    std::size_t n_missing_schema = 0;   // examples whose linked schema missed gold values
    double exact_match = 0.0;
    std::vector<bool> correct;          // per example
};

// Unordered exact match of predictions against golds.  Predictions are
// parsed, post-processed, and entity-resolved; golds are parsed and
// resolved only.  A prediction that fails any of those stages scores 0 and
// counts in n_invalid_parses.  Gold parses must fit the bundle.
EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& golds,
                    const SchemaBundle& bundle);

// Same, but also fuzzy-links each utterance and counts examples whose
// linked fragment is missing gold values (n_missing_schema).
EvalReport evaluate(const std::vector<std::string>& predictions,
                    const Dataset& gold_dataset,
                    const SchemaBundle& bundle,
                    const LinkerConfig& linker_config);

// Keeps the examples whose gold parse uses at least one intent name absent
// from every training bundle.  Indices refer to the input dataset.
std::vector<std::size_t> subset_unseen_intents(
    const Dataset& dataset,
    const std::vector<const SchemaBundle*>& training_bundles);

}  // namespace taskparse
