#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "taskparse/errors.hpp"
#include "taskparse/schema.hpp"

namespace taskparse {

enum class NodeKind { kIntent, kSlot, kValue };

// A node in a decoupled order tree.  Intents sit at the top level, slots
// below them, and each slot holds either one value leaf or nested slots.
struct ParseNode {
    NodeKind kind = NodeKind::kValue;
    std::string label;  // intent or slot name; for kValue, the leaf text
    std::vector<ParseNode> children;

    bool is_leaf() const { return kind == NodeKind::kValue; }
};

// A full order: one or more intent trees.  An explicit (ORDER ...) root in
// linearized text is accepted and stripped on input, never emitted.
struct ParseForest {
    std::vector<ParseNode> intents;

    bool empty() const { return intents.empty(); }
};

// Reads a linearized parenthesized parse.  Parentheses may be glued to
// labels; consecutive bare words form a single multi-word value leaf.
// Throws ParseError (with offset) on unbalanced parentheses, empty nodes,
// childless slots, or a leaf next to a nested node.
ParseForest parse_linear(std::string_view text);

// Canonical linearization: "(LABEL child ... )" with a space before every
// closing parenthesis, intents joined by single spaces.
std::string linearize(const ParseForest& forest);
std::string linearize(const ParseNode& node);

// Splits linearized text into tokens, separating parentheses from labels.
std::vector<std::string> tokenize_linear(std::string_view text);

// Maps every value leaf to its entity via the bundle's catalogs.  Leaves
// that already name an entity pass through, as do integer literals under
// slots whose catalog holds integer entities.  Throws Error naming the slot
// and surface when a leaf cannot be resolved.  Idempotent.
ParseForest resolve_entities(const ParseForest& forest, const SchemaBundle& bundle);

// Tree equality that ignores sibling order at every level.
bool unordered_equal(const ParseForest& a, const ParseForest& b);
bool unordered_equal(const ParseNode& a, const ParseNode& b);

struct TreeStats {
    std::size_t n_intents = 0;
    std::size_t n_slots = 0;  // every labeled non-intent node, wrappers included
    std::size_t depth = 0;    // counts an implicit ORDER root, excludes leaves
};

TreeStats compute_stats(const ParseForest& forest);

enum class ViolationKind {
    kUnknownIntent,
    kUnknownSlot,
    kIncompatibleSlot,   // slot illegal under its parent intent or slot
    kUnresolvableValue,  // leaf outside the slot's catalog
    kMalformedNode,
};

struct Violation {
    ViolationKind kind = ViolationKind::kMalformedNode;
    std::string path;  // e.g. "/PIZZAORDER[0]/TOPPING[2]"
    std::string detail;
};

// Structural and catalog check of a forest against a bundle.  Returns every
// violation found; an empty result means the forest is a legal order.
std::vector<Violation> validate_against_schema(const ParseForest& forest,
                                               const SchemaBundle& bundle);

const char* to_string(ViolationKind kind);

}  // namespace taskparse
