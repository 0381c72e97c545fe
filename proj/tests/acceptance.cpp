// Acceptance checks for the whole toolkit.  Each check prints one line:
//   PASS - <name>        FAIL - <name>: <why>        SKIP - <name>: <why>
// The process exit code is the number of failures.
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "taskparse/constraint.hpp"
#include "taskparse/evaluator.hpp"
#include "taskparse/generator.hpp"
#include "taskparse/linker.hpp"
#include "taskparse/parse_tree.hpp"
#include "taskparse/scorer.hpp"
#include "taskparse/text.hpp"

using namespace taskparse;
using Clock = std::chrono::steady_clock;

namespace {

struct Skip {
    std::string reason;
};

struct Failure {
    std::string reason;
};

void require(bool condition, const std::string& reason) {
    if (!condition) throw Failure{reason};
}

const std::vector<std::string> kBundleNames = {"pizza", "burrito", "sub", "burger",
                                               "coffee"};

// Generated SUB data shared between the completeness and generator checks.
struct SharedState {
    std::optional<SchemaBundle> sub_bundle;
    std::optional<TemplateSet> sub_templates;
    std::optional<GenerationResult> sub_10k;

    const SchemaBundle& sub() {
        if (!sub_bundle) sub_bundle = load_repo_bundle("sub");
        return *sub_bundle;
    }
    const TemplateSet& templates() {
        if (!sub_templates) {
            sub_templates = load_templates(repo_path("templates/sub.json"), sub());
        }
        return *sub_templates;
    }
    const GenerationResult& generated_10k() {
        if (!sub_10k) {
            GenerationConfig config;
            config.target_count = 10000;
            config.seed = 7;
            sub_10k = sample_dataset(sub(), templates(), config);
        }
        return *sub_10k;
    }
};

SharedState shared;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<ParseForest> sample_forests(const ConstraintEngine& engine,
                                        std::size_t count, std::uint64_t seed) {
    std::vector<ParseForest> forests;
    std::mt19937_64 rng(seed);
    for (std::size_t attempt = 0; attempt < count * 50 && forests.size() < count;
         ++attempt) {
        auto tokens = sample_parse(engine, rng);
        if (!tokens) continue;
        forests.push_back(parse_linear(detokenize(engine, *tokens)));
    }
    require(forests.size() == count, "could not sample enough parses");
    return forests;
}

void shuffle_children(ParseNode& node, std::mt19937_64& rng) {
    std::shuffle(node.children.begin(), node.children.end(), rng);
    for (auto& child : node.children) shuffle_children(child, rng);
}

// Swaps one leaf for a different entity of the same slot so the forests can
// no longer match.
void perturb_leaf(ParseForest& forest, const SchemaBundle& bundle) {
    struct Target {
        ParseNode* leaf;
        std::string slot;
    };
    std::vector<Target> targets;
    std::function<void(ParseNode&)> collect = [&](ParseNode& node) {
        if (node.kind == NodeKind::kSlot && node.children.size() == 1 &&
            node.children[0].is_leaf()) {
            targets.push_back({&node.children[0], node.label});
            return;
        }
        for (auto& child : node.children) collect(child);
    };
    for (auto& intent : forest.intents) collect(intent);
    require(!targets.empty(), "sampled forest has no leaves");

    for (const auto& target : targets) {
        auto cat = bundle.catalogs.find(target.slot);
        if (cat == bundle.catalogs.end()) continue;
        for (const auto& entry : cat->second) {
            if (entry.entity != target.leaf->label) {
                target.leaf->label = entry.entity;
                return;
            }
        }
    }
    targets.front().leaf->label += "_x";  // no alternative entity anywhere
}

// ---- the checks ------------------------------------------------------------

void check_sampling_soundness() {
    auto start = Clock::now();
    auto violation_is_fatal = [](ViolationKind kind) {
        // The base table leaves intent/slot pairing to the optional strict
        // mode; everything else must never appear.
        return kind != ViolationKind::kIncompatibleSlot;
    };

    for (const auto& name : kBundleNames) {
        auto bundle = load_repo_bundle(name);
        ConstraintEngine engine(bundle);
        std::mt19937_64 rng(101);
        std::size_t produced = 0;
        for (std::size_t attempt = 0; attempt < 50000 && produced < 1000; ++attempt) {
            auto tokens = sample_parse(engine, rng);
            if (!tokens) continue;
            ++produced;
            ParseForest forest;
            try {
                forest = parse_linear(detokenize(engine, *tokens));
            } catch (const ParseError& e) {
                throw Failure{name + ": unbalanced sample: " + e.what()};
            }
            for (const auto& violation : validate_against_schema(forest, bundle)) {
                if (violation_is_fatal(violation.kind)) {
                    throw Failure{name + ": " + std::string(to_string(violation.kind)) +
                                  " at " + violation.path + ": " + violation.detail};
                }
            }
        }
        require(produced == 1000, name + ": only " + std::to_string(produced) +
                                      " of 1000 samples produced");

        // With both strict flags the samples must be entirely violation free.
        ConstraintEngine strict(bundle, {true, true});
        std::mt19937_64 strict_rng(102);
        std::size_t strict_produced = 0;
        for (std::size_t attempt = 0; attempt < 20000 && strict_produced < 200;
             ++attempt) {
            auto tokens = sample_parse(strict, strict_rng);
            if (!tokens) continue;
            ++strict_produced;
            auto forest = parse_linear(detokenize(strict, *tokens));
            auto violations = validate_against_schema(forest, bundle);
            require(violations.empty(),
                    name + " (strict): " + (violations.empty() ? "" : violations[0].detail));
        }
        require(strict_produced == 200, name + ": strict sampling starved");

        // The random scorer drives beam search through the same table.
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            UniformRandomScorer scorer(seed);
            auto result = constrained_beam_search(engine, scorer, 4, 128);
            for (const auto& hyp : result.hypotheses) {
                auto forest = parse_linear(detokenize(engine, hyp.tokens));
                for (const auto& violation : validate_against_schema(forest, bundle)) {
                    require(!violation_is_fatal(violation.kind),
                            name + " (beam): " + violation.detail);
                }
            }
        }
    }
    require(seconds_since(start) < 60.0, "took over a minute");
}

void check_replay_completeness() {
    auto start = Clock::now();
    const auto& generated = shared.generated_10k();
    ConstraintEngine engine(shared.sub());
    for (const auto& example : generated.dataset.examples) {
        auto result = engine.replay_text(example.parse);
        require(result.accepted, "generated parse rejected at token " +
                                     std::to_string(result.position) + ": " +
                                     example.parse);
    }
    for (const auto& name : kBundleNames) {
        auto bundle = load_repo_bundle(name);
        ConstraintEngine fixture_engine(bundle);
        for (const auto& example : load_fixtures(name).examples) {
            auto result = fixture_engine.replay_text(example.parse);
            require(result.accepted,
                    name + " fixture rejected: " + example.parse);
        }
    }
    require(seconds_since(start) < 60.0, "took over a minute");
}

void check_rejection_position() {
    auto bundle = load_repo_bundle("burger");
    ConstraintEngine engine(bundle);
    require(engine.vocabulary().id("coke").has_value(),
            "\"coke\" missing from the decoder vocabulary");
    auto result = engine.replay_text("(DRINK_ORDER (SIZE coke ) )");
    require(!result.accepted, "out-of-catalog value was accepted");
    require(result.token == "coke",
            "rejected token was \"" + result.token + "\", not \"coke\"");
    require(result.position == 4,
            "rejected at position " + std::to_string(result.position) + ", not 4");
}

void check_match_invariants() {
    // Identity on generated data.
    const auto& generated = shared.generated_10k();
    std::vector<std::string> golds;
    for (std::size_t i = 0; i < 200 && i < generated.dataset.examples.size(); ++i) {
        golds.push_back(generated.dataset.examples[i].parse);
    }
    require(!golds.empty(), "no generated examples to evaluate");
    auto report = evaluate(golds, golds, shared.sub());
    require(report.exact_match == 1.0, "identity match below 1.0");

    // Sibling order must never matter; a changed leaf always must.
    auto bundle = load_repo_bundle("burger");
    ConstraintEngine engine(bundle);
    auto forests = sample_forests(engine, 100, 202);
    std::mt19937_64 rng(303);
    for (auto& forest : forests) {
        ParseForest resolved = resolve_entities(forest, bundle);
        for (int round = 0; round < 100; ++round) {
            ParseForest shuffled = resolved;
            std::shuffle(shuffled.intents.begin(), shuffled.intents.end(), rng);
            for (auto& intent : shuffled.intents) shuffle_children(intent, rng);
            require(unordered_equal(shuffled, resolved),
                    "sibling permutation changed the match");
        }
        ParseForest perturbed = resolved;
        perturb_leaf(perturbed, bundle);
        require(!unordered_equal(perturbed, resolved),
                "a changed leaf still matched");
    }
}

void check_linker_coverage() {
    for (const auto& name : {"pizza", "burrito", "sub"}) {
        auto bundle = load_repo_bundle(name);
        auto templates = load_templates(repo_path("templates/" + std::string(name) +
                                                  ".json"),
                                        bundle);
        GenerationConfig config;
        config.target_count = 1000;
        config.seed = 31;
        auto generated = sample_dataset(bundle, templates, config);
        require(generated.dataset.examples.size() == 1000,
                std::string(name) + ": generation came up short");

        for (const auto& example : generated.dataset.examples) {
            auto gold = resolve_entities(parse_linear(example.parse), bundle);
            auto linked = fuzzy_match(example.utterance, bundle, {});
            auto missing = coverage_report(linked, gold);
            if (!missing.empty()) {
                throw Failure{std::string(name) + ": \"" + example.utterance +
                              "\" missing " + missing[0].first + "=" +
                              missing[0].second};
            }
        }
    }
}

void check_postprocess_insertion() {
    auto inserted = postprocess(parse_linear("(PIZZAORDER (TOPPING ham ) )"));
    require(linearize(inserted) == "(PIZZAORDER (NUMBER 1 ) (TOPPING ham ) )",
            "unit count not inserted as (NUMBER 1 )");

    auto bundle = load_repo_bundle("pizza");
    ConstraintEngine engine(bundle);
    for (auto& forest : sample_forests(engine, 100, 404)) {
        // Strip direct counts so insertion has work to do on every intent.
        for (auto& intent : forest.intents) {
            auto& children = intent.children;
            children.erase(std::remove_if(children.begin(), children.end(),
                                          [](const ParseNode& child) {
                                              return child.kind == NodeKind::kSlot &&
                                                     child.label == kNumberSlot;
                                          }),
                           children.end());
        }
        auto once = postprocess(forest);
        for (const auto& intent : once.intents) {
            bool has_number = false;
            for (const auto& child : intent.children) {
                if (child.kind == NodeKind::kSlot && child.label == kNumberSlot) {
                    has_number = true;
                }
            }
            require(has_number, "an intent still lacks NUMBER after postprocess");
        }
        require(linearize(postprocess(once)) == linearize(once),
                "postprocess is not idempotent");
    }
}

void check_generator_determinism() {
    auto start = Clock::now();
    const auto& generated = shared.generated_10k();

    if (generated.exhausted) {
        require(!generated.diagnostic.empty(), "exhausted without a diagnostic");
    } else {
        require(generated.dataset.examples.size() == 10000,
                "produced " + std::to_string(generated.dataset.examples.size()) +
                    " of 10000");
    }
    std::set<std::string> unique;
    for (const auto& example : generated.dataset.examples) {
        require(unique.insert(example.utterance + "\t" + example.parse).second,
                "duplicate pair: " + example.utterance);
    }

    GenerationConfig config;
    config.target_count = 10000;
    config.seed = 7;
    auto rerun = sample_dataset(shared.sub(), shared.templates(), config);
    require(rerun.dataset.examples.size() == generated.dataset.examples.size(),
            "rerun size differs");
    for (std::size_t i = 0; i < rerun.dataset.examples.size(); ++i) {
        require(rerun.dataset.examples[i].utterance ==
                        generated.dataset.examples[i].utterance &&
                    rerun.dataset.examples[i].parse ==
                        generated.dataset.examples[i].parse,
                "rerun differs at example " + std::to_string(i + 1));
    }
    require(seconds_since(start) < 120.0, "took over two minutes");
}

void check_normalization() {
    auto lines = normalize_utterance("2 large cokes");
    require(lines.size() == 1 && lines[0] == "two large cokes",
            "normalized to \"" + (lines.empty() ? "" : lines[0]) + "\"");
}

void check_reference_stats() {
    const char* path = std::getenv("TASKPARSE_PIZZA_SYNTHETIC");
    if (path == nullptr || *path == '\0') {
        throw Skip{"set TASKPARSE_PIZZA_SYNTHETIC to the converted synthetic split"};
    }
    auto dataset = load_dataset(path);
    require(!dataset.examples.empty(), "dataset is empty");

    double intents = 0.0, slots = 0.0, depth = 0.0;
    for (const auto& example : dataset.examples) {
        auto stats = compute_stats(parse_linear(example.parse));
        intents += static_cast<double>(stats.n_intents);
        slots += static_cast<double>(stats.n_slots);
        depth += static_cast<double>(stats.depth);
    }
    auto n = static_cast<double>(dataset.examples.size());
    intents /= n;
    slots /= n;
    depth /= n;

    std::ostringstream got;
    got.precision(3);
    got << intents << " intents, " << slots << " slots, " << depth << " depth";
    require(std::abs(intents - 1.77) <= 0.01 && std::abs(slots - 5.77) <= 0.01 &&
                std::abs(depth - 3.44) <= 0.01,
            "expected 1.77/5.77/3.44 +-0.01, measured " + got.str());
}

void check_unseen_subset() {
    const char* path = std::getenv("TASKPARSE_BURGER_TEST");
    if (path == nullptr || *path == '\0') {
        throw Skip{"set TASKPARSE_BURGER_TEST to the converted burger test split"};
    }
    auto dataset = load_dataset(path);
    auto pizza = load_repo_bundle("pizza");
    auto burrito = load_repo_bundle("burrito");
    auto indices = subset_unseen_intents(dataset, {&pizza, &burrito, &shared.sub()});
    require(indices.size() == 108,
            "subset holds " + std::to_string(indices.size()) + " examples, not 108");
}

void check_pipelines() {
    const auto& bundle = shared.sub();
    ConstraintEngine engine(bundle);

    // Gold-replay decoding must reconstruct whatever the generator emits.
    GenerationConfig gold_config;
    gold_config.target_count = 50;
    gold_config.seed = 11;
    auto gold_data = sample_dataset(bundle, shared.templates(), gold_config);
    require(gold_data.dataset.examples.size() == 50, "gold set came up short");
    std::vector<std::string> golds, preds;
    for (const auto& example : gold_data.dataset.examples) {
        golds.push_back(example.parse);
        GoldReplayScorer scorer(engine, example.parse);
        auto result = constrained_beam_search(engine, scorer, 6, 256);
        require(!result.hypotheses.empty(), "beam search finished nothing");
        preds.push_back(detokenize(engine, result.hypotheses.front().tokens));
    }
    auto replay_report = evaluate(preds, golds, bundle);
    require(replay_report.exact_match == 1.0, "gold-replay pipeline below 1.0");

    // The heuristic baseline must nail the single-intent template subset.
    GenerationConfig simple_config;
    simple_config.target_count = 200;
    simple_config.seed = 13;
    simple_config.simple_only = true;
    auto simple_data = sample_dataset(bundle, shared.templates(), simple_config);
    require(simple_data.dataset.examples.size() == 200, "simple set came up short");
    std::vector<std::string> simple_golds, simple_preds;
    for (const auto& example : simple_data.dataset.examples) {
        simple_golds.push_back(example.parse);
        auto linked = fuzzy_match(example.utterance, bundle, {});
        simple_preds.push_back(linearize(baseline_parse(example.utterance, linked,
                                                        bundle)));
    }
    auto baseline_report = evaluate(simple_preds, simple_golds, bundle);
    if (baseline_report.exact_match != 1.0) {
        for (std::size_t i = 0; i < simple_golds.size(); ++i) {
            if (!baseline_report.correct[i]) {
                throw Failure{"baseline missed \"" +
                              simple_data.dataset.examples[i].utterance +
                              "\": predicted " + simple_preds[i] + ", wanted " +
                              simple_golds[i]};
            }
        }
    }
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<void()> body;
    };
    const std::vector<Entry> checks = {
        {"constrained samples stay inside the schema", check_sampling_soundness},
        {"replay accepts generated data and reference parses",
         check_replay_completeness},
        {"out-of-catalog value rejected at its exact token", check_rejection_position},
        {"unordered match: identity, permutation, perturbation",
         check_match_invariants},
        {"fuzzy linking covers every generated gold value", check_linker_coverage},
        {"postprocess inserts the unit count idempotently",
         check_postprocess_insertion},
        {"generation is unique, complete, and reproducible",
         check_generator_determinism},
        {"utterance normalization spells out digits", check_normalization},
        {"reference stats match on the converted synthetic split",
         check_reference_stats},
        {"unseen-intent subset has the expected size", check_unseen_subset},
        {"gold-replay and baseline pipelines reach exact match", check_pipelines},
    };

    int failures = 0;
    for (const auto& check : checks) {
        try {
            check.body();
            std::cout << "PASS - " << check.name << "\n";
        } catch (const Skip& skip) {
            std::cout << "SKIP - " << check.name << ": " << skip.reason << "\n";
        } catch (const Failure& failure) {
            std::cout << "FAIL - " << check.name << ": " << failure.reason << "\n";
            ++failures;
        } catch (const std::exception& e) {
            std::cout << "FAIL - " << check.name << ": " << e.what() << "\n";
            ++failures;
        }
    }
    return failures;
}
