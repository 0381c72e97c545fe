#include "taskparse/parse_tree.hpp"

#include <algorithm>
#include <sstream>

#include "taskparse/text.hpp"

namespace taskparse {

namespace {

struct RawToken {
    std::string text;
    std::size_t pos = 0;
};

std::vector<RawToken> lex(std::string_view text) {
    std::vector<RawToken> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '(' || c == ')') {
            tokens.push_back({std::string(1, c), i});
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < text.size() && text[i] != '(' && text[i] != ')' &&
               text[i] != ' ' && text[i] != '\t' && text[i] != '\n' &&
               text[i] != '\r') {
            ++i;
        }
        tokens.push_back({std::string(text.substr(begin, i - begin)), begin});
    }
    return tokens;
}

struct RawNode {
    std::string label;
    std::vector<std::string> words;
    std::vector<RawNode> children;
    std::size_t pos = 0;
};

class Reader {
public:
    explicit Reader(std::vector<RawToken> tokens) : tokens_(std::move(tokens)) {}

    std::vector<RawNode> read_forest() {
        std::vector<RawNode> roots;
        while (index_ < tokens_.size()) {
            if (tokens_[index_].text != "(") {
                throw ParseError("expected '(' at top level, found \"" +
                                     tokens_[index_].text + "\"",
                                 tokens_[index_].pos);
            }
            roots.push_back(read_node());
        }
        if (roots.empty()) throw ParseError("empty parse", 0);
        return roots;
    }

private:
    RawNode read_node() {
        RawNode node;
        node.pos = tokens_[index_].pos;
        ++index_;  // consume '('
        if (index_ >= tokens_.size()) {
            throw ParseError("unbalanced parse: '(' never closed", node.pos);
        }
        if (tokens_[index_].text == "(" || tokens_[index_].text == ")") {
            throw ParseError("node without a label", tokens_[index_].pos);
        }
        node.label = tokens_[index_].text;
        ++index_;
        while (true) {
            if (index_ >= tokens_.size()) {
                throw ParseError("unbalanced parse: '(' never closed", node.pos);
            }
            const RawToken& tok = tokens_[index_];
            if (tok.text == ")") {
                ++index_;
                return node;
            }
            if (tok.text == "(") {
                node.children.push_back(read_node());
            } else {
                node.words.push_back(tok.text);
                ++index_;
            }
        }
    }

    std::vector<RawToken> tokens_;
    std::size_t index_ = 0;
};

ParseNode to_slot_node(const RawNode& raw) {
    if (!raw.words.empty() && !raw.children.empty()) {
        throw ParseError("slot " + raw.label + " mixes a value with nested slots",
                         raw.pos);
    }
    ParseNode node;
    node.kind = NodeKind::kSlot;
    node.label = raw.label;
    if (!raw.words.empty()) {
        ParseNode leaf;
        leaf.kind = NodeKind::kValue;
        std::string text;
        for (const auto& w : raw.words) {
            if (!text.empty()) text += ' ';
            text += w;
        }
        leaf.label = std::move(text);
        node.children.push_back(std::move(leaf));
        return node;
    }
    if (raw.children.empty()) {
        throw ParseError("slot " + raw.label + " has no value", raw.pos);
    }
    for (const auto& child : raw.children) {
        node.children.push_back(to_slot_node(child));
    }
    return node;
}

ParseNode to_intent_node(const RawNode& raw) {
    if (!raw.words.empty()) {
        throw ParseError("intent " + raw.label + " holds a bare value", raw.pos);
    }
    ParseNode node;
    node.kind = NodeKind::kIntent;
    node.label = raw.label;
    for (const auto& child : raw.children) {
        node.children.push_back(to_slot_node(child));
    }
    return node;
}

}  // namespace

std::vector<std::string> tokenize_linear(std::string_view text) {
    std::vector<std::string> out;
    for (auto& tok : lex(text)) out.push_back(std::move(tok.text));
    return out;
}

ParseForest parse_linear(std::string_view text) {
    Reader reader(lex(text));
    std::vector<RawNode> roots = reader.read_forest();

    // An explicit ORDER wrapper is accepted on input and stripped.
    if (roots.size() == 1 && roots[0].label == kOrderRoot) {
        if (!roots[0].words.empty()) {
            throw ParseError("value directly under " + std::string(kOrderRoot),
                             roots[0].pos);
        }
        roots = std::move(roots[0].children);
        if (roots.empty()) throw ParseError("empty parse", 0);
    }

    ParseForest forest;
    for (const auto& raw : roots) {
        forest.intents.push_back(to_intent_node(raw));
    }
    return forest;
}

namespace {

void linearize_node(const ParseNode& node, std::string& out) {
    if (node.kind == NodeKind::kValue) {
        out += node.label;
        return;
    }
    out += '(';
    out += node.label;
    for (const auto& child : node.children) {
        out += ' ';
        linearize_node(child, out);
    }
    out += " )";
}

}  // namespace

std::string linearize(const ParseNode& node) {
    std::string out;
    linearize_node(node, out);
    return out;
}

std::string linearize(const ParseForest& forest) {
    std::string out;
    for (const auto& intent : forest.intents) {
        if (!out.empty()) out += ' ';
        linearize_node(intent, out);
    }
    return out;
}

namespace {

bool entity_in_catalog(const SchemaBundle& bundle, const std::string& slot,
                       const std::string& text) {
    auto it = bundle.catalogs.find(slot);
    if (it == bundle.catalogs.end()) return false;
    for (const auto& entry : it->second) {
        if (entry.entity == text) return true;
    }
    return false;
}

ParseNode resolve_node(const ParseNode& node, const SchemaBundle& bundle) {
    ParseNode out;
    out.kind = node.kind;
    out.label = node.label;

    if (node.kind == NodeKind::kSlot && node.children.size() == 1 &&
        node.children[0].is_leaf()) {
        const std::string& text = node.children[0].label;
        if (!bundle.is_known_slot(node.label)) {
            throw Error("unknown slot " + node.label + " in bundle " + bundle.name);
        }
        ParseNode leaf;
        leaf.kind = NodeKind::kValue;
        if (is_integer_literal(text) && bundle.is_numeric_slot(node.label)) {
            leaf.label = text;
        } else if (entity_in_catalog(bundle, node.label, text)) {
            leaf.label = text;
        } else {
            auto entity = lookup_entity(bundle, node.label, text);
            if (!entity) {
                throw Error("cannot resolve \"" + text + "\" under slot " +
                            node.label);
            }
            leaf.label = *entity;
        }
        out.children.push_back(std::move(leaf));
        return out;
    }

    for (const auto& child : node.children) {
        out.children.push_back(resolve_node(child, bundle));
    }
    return out;
}

}  // namespace

ParseForest resolve_entities(const ParseForest& forest, const SchemaBundle& bundle) {
    ParseForest out;
    for (const auto& intent : forest.intents) {
        out.intents.push_back(resolve_node(intent, bundle));
    }
    return out;
}

bool unordered_equal(const ParseNode& a, const ParseNode& b) {
    if (a.kind != b.kind || a.label != b.label) return false;
    if (a.children.size() != b.children.size()) return false;
    std::vector<bool> used(b.children.size(), false);
    for (const auto& ca : a.children) {
        bool matched = false;
        for (std::size_t i = 0; i < b.children.size(); ++i) {
            if (used[i]) continue;
            if (unordered_equal(ca, b.children[i])) {
                used[i] = true;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

bool unordered_equal(const ParseForest& a, const ParseForest& b) {
    if (a.intents.size() != b.intents.size()) return false;
    std::vector<bool> used(b.intents.size(), false);
    for (const auto& ia : a.intents) {
        bool matched = false;
        for (std::size_t i = 0; i < b.intents.size(); ++i) {
            if (used[i]) continue;
            if (unordered_equal(ia, b.intents[i])) {
                used[i] = true;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

namespace {

// Depth of a labeled node counting itself, ignoring value leaves.
std::size_t node_depth(const ParseNode& node) {
    std::size_t deepest = 0;
    for (const auto& child : node.children) {
        if (child.is_leaf()) continue;
        deepest = std::max(deepest, node_depth(child));
    }
    return 1 + deepest;
}

void count_slots(const ParseNode& node, std::size_t& slots) {
    if (node.kind == NodeKind::kSlot) ++slots;
    for (const auto& child : node.children) count_slots(child, slots);
}

}  // namespace

TreeStats compute_stats(const ParseForest& forest) {
    TreeStats stats;
    stats.n_intents = forest.intents.size();
    std::size_t deepest = 0;
    for (const auto& intent : forest.intents) {
        count_slots(intent, stats.n_slots);
        deepest = std::max(deepest, node_depth(intent));
    }
    // The implicit ORDER root adds one level above the intents.
    stats.depth = forest.intents.empty() ? 0 : deepest + 1;
    return stats;
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::kUnknownIntent: return "unknown_intent";
        case ViolationKind::kUnknownSlot: return "unknown_slot";
        case ViolationKind::kIncompatibleSlot: return "incompatible_slot";
        case ViolationKind::kUnresolvableValue: return "unresolvable_value";
        case ViolationKind::kMalformedNode: return "malformed_node";
    }
    return "unknown";
}

namespace {

struct Validator {
    const SchemaBundle& bundle;
    std::vector<Violation>& out;

    void add(ViolationKind kind, const std::string& path, std::string detail) {
        out.push_back({kind, path, std::move(detail)});
    }

    bool leaf_resolves(const std::string& slot, const std::string& text) const {
        if (is_integer_literal(text) && bundle.is_numeric_slot(slot)) return true;
        if (entity_in_catalog(bundle, slot, text)) return true;
        if (!bundle.is_known_slot(slot)) return false;
        return lookup_entity(bundle, slot, text).has_value();
    }

    void check_slot(const ParseNode& node, const std::string& path,
                    const IntentDef* intent, const ParseNode* parent_slot,
                    std::size_t sibling_index) {
        if (node.kind == NodeKind::kValue) {
            add(ViolationKind::kMalformedNode, path, "value outside a slot");
            return;
        }
        if (node.kind == NodeKind::kIntent) {
            add(ViolationKind::kMalformedNode, path, "nested intent node");
            return;
        }

        bool known = bundle.is_known_slot(node.label);
        if (!known) {
            add(ViolationKind::kUnknownSlot, path, "slot not in bundle");
        } else if (parent_slot == nullptr) {
            if (intent != nullptr && intent->find_slot(node.label) == nullptr &&
                !bundle.is_generic_slot(node.label)) {
                add(ViolationKind::kIncompatibleSlot, path,
                    "slot not declared by intent " + intent->name);
            }
        } else {
            if (!bundle.is_nestable_slot(parent_slot->label)) {
                add(ViolationKind::kIncompatibleSlot, path,
                    "nested under non-wrapper slot " + parent_slot->label);
            } else if (parent_slot->label == kComplexSlot && sibling_index == 0 &&
                       node.label != kQuantitySlot) {
                add(ViolationKind::kIncompatibleSlot, path,
                    std::string(kComplexSlot) + " must open with " + kQuantitySlot);
            }
        }

        if (node.children.empty()) {
            add(ViolationKind::kMalformedNode, path, "slot has no value");
            return;
        }
        bool has_leaf = false;
        bool has_node = false;
        for (const auto& child : node.children) {
            (child.is_leaf() ? has_leaf : has_node) = true;
        }
        if (has_leaf && (has_node || node.children.size() > 1)) {
            add(ViolationKind::kMalformedNode, path, "value mixed with nested slots");
            return;
        }

        if (has_leaf) {
            const std::string& text = node.children[0].label;
            if (known && !leaf_resolves(node.label, text)) {
                add(ViolationKind::kUnresolvableValue, path,
                    "\"" + text + "\" not in catalog of " + node.label);
            }
            return;
        }
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            check_slot(node.children[i],
                       path + "/" + node.children[i].label + "[" + std::to_string(i) + "]",
                       intent, &node, i);
        }
    }

    void check_intent(const ParseNode& node, const std::string& path) {
        if (node.kind != NodeKind::kIntent) {
            add(ViolationKind::kMalformedNode, path, "top-level node is not an intent");
            return;
        }
        const IntentDef* intent = bundle.find_intent(node.label);
        if (intent == nullptr) {
            add(ViolationKind::kUnknownIntent, path, "intent not in bundle");
        }
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            check_slot(node.children[i],
                       path + "/" + node.children[i].label + "[" + std::to_string(i) + "]",
                       intent, nullptr, i);
        }
    }
};

}  // namespace

std::vector<Violation> validate_against_schema(const ParseForest& forest,
                                               const SchemaBundle& bundle) {
    std::vector<Violation> violations;
    Validator validator{bundle, violations};
    for (std::size_t i = 0; i < forest.intents.size(); ++i) {
        const auto& intent = forest.intents[i];
        validator.check_intent(intent,
                               "/" + intent.label + "[" + std::to_string(i) + "]");
    }
    return violations;
}

}  // namespace taskparse
