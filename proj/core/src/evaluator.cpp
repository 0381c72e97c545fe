#include "taskparse/evaluator.hpp"

#include <set>

namespace taskparse {

namespace {

bool has_direct_number(const ParseNode& intent) {
    for (const auto& child : intent.children) {
        if (child.kind == NodeKind::kSlot && child.label == kNumberSlot) {
            return true;
        }
    }
    return false;
}

}  // namespace

ParseForest postprocess(const ParseForest& prediction) {
    ParseForest out = prediction;
    for (auto& intent : out.intents) {
        if (intent.kind != NodeKind::kIntent || has_direct_number(intent)) continue;
        ParseNode slot;
        slot.kind = NodeKind::kSlot;
        slot.label = kNumberSlot;
        ParseNode leaf;
        leaf.kind = NodeKind::kValue;
        leaf.label = "1";
        slot.children.push_back(std::move(leaf));
        intent.children.insert(intent.children.begin(), std::move(slot));
    }
    return out;
}

EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& golds,
                    const SchemaBundle& bundle) {
    if (predictions.size() != golds.size()) {
        throw Error("prediction count " + std::to_string(predictions.size()) +
                    " does not match gold count " + std::to_string(golds.size()));
    }
    if (golds.empty()) throw Error("no examples to evaluate");

    EvalReport report;
    report.n_examples = golds.size();
    report.correct.resize(golds.size(), false);

    for (std::size_t i = 0; i < golds.size(); ++i) {
        ParseForest gold;
        try {
            gold = resolve_entities(parse_linear(golds[i]), bundle);
        } catch (const Error& e) {
            throw Error("gold parse " + std::to_string(i + 1) + " is invalid: " +
                        e.what());
        }

        bool ok = false;
        try {
            ParseForest pred = parse_linear(predictions[i]);
            pred = postprocess(pred);
            pred = resolve_entities(pred, bundle);
            ok = unordered_equal(pred, gold);
        } catch (const Error&) {
            ++report.n_invalid_parses;
        }
        report.correct[i] = ok;
        if (ok) ++report.n_correct;
    }
    report.exact_match =
        static_cast<double>(report.n_correct) / static_cast<double>(report.n_examples);
    return report;
}

EvalReport evaluate(const std::vector<std::string>& predictions,
                    const Dataset& gold_dataset,
                    const SchemaBundle& bundle,
                    const LinkerConfig& linker_config) {
    std::vector<std::string> golds;
    golds.reserve(gold_dataset.examples.size());
    for (const auto& example : gold_dataset.examples) golds.push_back(example.parse);

    EvalReport report = evaluate(predictions, golds, bundle);

    for (const auto& example : gold_dataset.examples) {
        ParseForest gold = resolve_entities(parse_linear(example.parse), bundle);
        LinkedSchema linked = fuzzy_match(example.utterance, bundle, linker_config);
        if (!coverage_report(linked, gold).empty()) ++report.n_missing_schema;
    }
    return report;
}

std::vector<std::size_t> subset_unseen_intents(
    const Dataset& dataset,
    const std::vector<const SchemaBundle*>& training_bundles) {
    std::set<std::string> seen_intents;
    for (const SchemaBundle* bundle : training_bundles) {
        for (const auto& intent : bundle->intents) {
            seen_intents.insert(intent.name);
        }
    }

    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        ParseForest gold;
        try {
            gold = parse_linear(dataset.examples[i].parse);
        } catch (const ParseError& e) {
            throw Error("example " + std::to_string(i + 1) + ": " + e.what());
        }
        for (const auto& intent : gold.intents) {
            if (seen_intents.find(intent.label) == seen_intents.end()) {
                indices.push_back(i);
                break;
            }
        }
    }
    return indices;
}

}  // namespace taskparse
