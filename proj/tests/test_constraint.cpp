#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "taskparse/constraint.hpp"
#include "taskparse/parse_tree.hpp"

using namespace taskparse;

TEST_CASE("vocabulary pins special tokens to the low ids") {
    auto bundle = load_repo_bundle("pizza");
    ConstraintEngine engine(bundle);
    const auto& vocab = engine.vocabulary();

    CHECK(vocab.text(vocab.bos()) == "<s>");
    CHECK(vocab.text(vocab.eos()) == "</s>");
    CHECK(vocab.text(vocab.open()) == "(");
    CHECK(vocab.text(vocab.close()) == ")");
    CHECK(vocab.id("(") == TokenId{2});
    CHECK(vocab.id(")") == TokenId{3});
    CHECK_FALSE(vocab.id("no such token").has_value());

    // Everything after the specials is sorted and unique.
    const auto& tokens = vocab.tokens();
    REQUIRE(tokens.size() > 4);
    CHECK(std::is_sorted(tokens.begin() + 4, tokens.end()));
    CHECK(std::adjacent_find(tokens.begin() + 4, tokens.end()) == tokens.end());
    CHECK(vocab.id("PIZZAORDER").has_value());
    CHECK(vocab.id("ham").has_value());
    CHECK(vocab.id("dr_pepper").has_value());
}

TEST_CASE("a known token in the wrong slot is rejected at its index") {
    auto bundle = load_repo_bundle("burger");
    ConstraintEngine engine(bundle);
    // "coke" is in the vocabulary via DRINK_TYPE, but not a SIZE value.
    REQUIRE(engine.vocabulary().id("coke").has_value());

    auto result = engine.replay_text("(DRINK_ORDER (SIZE coke ) )");
    CHECK_FALSE(result.accepted);
    CHECK(result.position == 4);
    CHECK(result.token == "coke");
    CHECK_FALSE(result.expected.empty());
}

TEST_CASE("every bundled reference parse replays cleanly") {
    for (const char* name : {"pizza", "burrito", "sub", "burger", "coffee"}) {
        CAPTURE(name);
        auto bundle = load_repo_bundle(name);
        ConstraintEngine engine(bundle);
        for (const auto& example : load_fixtures(name).examples) {
            CAPTURE(example.parse);
            auto result = engine.replay_text(example.parse);
            CHECK(result.accepted);
        }
    }
}

TEST_CASE("allowed_next agrees with step over random walks") {
    auto bundle = load_repo_bundle("burrito");
    ConstraintEngine engine(bundle);
    const auto vocab_size = engine.vocabulary().size();
    std::mt19937_64 rng(42);

    for (int walk = 0; walk < 5; ++walk) {
        auto state = engine.initial_state();
        for (int depth = 0; depth < 40 && !state.finished(); ++depth) {
            auto allowed = engine.allowed_next(state);
            CHECK(std::is_sorted(allowed.begin(), allowed.end()));
            CHECK(std::adjacent_find(allowed.begin(), allowed.end()) == allowed.end());

            std::set<TokenId> allowed_set(allowed.begin(), allowed.end());
            for (TokenId token = 0; token < vocab_size; ++token) {
                DecoderState probe = state;
                bool ok = engine.step(probe, token);
                CHECK(ok == (allowed_set.count(token) > 0));
            }
            if (allowed.empty()) break;
            std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
            REQUIRE(engine.step(state, allowed[pick(rng)]));
        }
    }
}

TEST_CASE("a quantified wrapper must open with QUANTITY") {
    auto bundle = load_repo_bundle("pizza");
    ConstraintEngine engine(bundle);
    auto result = engine.replay_text("(PIZZAORDER (COMPLEX (TOPPING ham ) ) )");
    CHECK_FALSE(result.accepted);
    CHECK(result.position == 5);
    CHECK(result.token == "TOPPING");

    CHECK(engine.replay_text(
                    "(PIZZAORDER (COMPLEX (QUANTITY extra ) (TOPPING ham ) ) )")
              .accepted);
}

TEST_CASE("strict slot compatibility narrows the label table") {
    auto bundle = load_repo_bundle("pizza");
    std::string text = "(DRINKORDER (TOPPING ham ) )";

    ConstraintEngine loose(bundle);
    CHECK(loose.replay_text(text).accepted);

    StrictnessConfig strictness;
    strictness.enforce_intent_slot_compatibility = true;
    ConstraintEngine strict(bundle, strictness);
    auto result = strict.replay_text(text);
    CHECK_FALSE(result.accepted);
    CHECK(result.position == 3);
    CHECK(result.token == "TOPPING");
    // Wrappers stay available everywhere under the strict table.
    CHECK(strict.replay_text("(PIZZAORDER (NOT (TOPPING ham ) ) )").accepted);
}

TEST_CASE("strict negation admits only negatable slots under NOT") {
    auto bundle = load_repo_bundle("pizza");
    std::string text = "(PIZZAORDER (NOT (SIZE large ) ) )";

    ConstraintEngine loose(bundle);
    CHECK(loose.replay_text(text).accepted);

    StrictnessConfig strictness;
    strictness.enforce_negatable_under_not = true;
    ConstraintEngine strict(bundle, strictness);
    auto result = strict.replay_text(text);
    CHECK_FALSE(result.accepted);
    CHECK(result.position == 5);
    CHECK(result.token == "SIZE");
    CHECK(strict.replay_text("(PIZZAORDER (NOT (TOPPING olives ) ) )").accepted);
}

TEST_CASE("replay treats BOS and EOS as optional delimiters") {
    auto bundle = load_repo_bundle("pizza");
    ConstraintEngine engine(bundle);
    std::vector<std::string> tokens = {"<s>", "(", "PIZZAORDER", "(", "TOPPING",
                                       "ham", ")",  ")",          "</s>"};
    CHECK(engine.replay(tokens).accepted);

    // BOS anywhere else is a rejection.
    std::vector<std::string> bad = {"(", "<s>"};
    auto result = engine.replay(bad);
    CHECK_FALSE(result.accepted);
    CHECK(result.position == 1);
    CHECK(result.token == "<s>");
}

TEST_CASE("unknown tokens are rejected where they appear") {
    auto bundle = load_repo_bundle("pizza");
    ConstraintEngine engine(bundle);
    std::vector<std::string> tokens = {"(", "WAT"};
    auto result = engine.replay(tokens);
    CHECK_FALSE(result.accepted);
    CHECK(result.position == 1);
    CHECK(result.token == "WAT");
    CHECK_FALSE(result.expected.empty());
}

TEST_CASE("truncated input reports the end of sequence") {
    auto bundle = load_repo_bundle("pizza");
    ConstraintEngine engine(bundle);
    auto result = engine.replay_text("(PIZZAORDER (TOPPING ham )");
    CHECK_FALSE(result.accepted);
    CHECK(result.position == 6);
    CHECK(result.token == "<end of sequence>");
}

TEST_CASE("EOS is offered only once an intent has closed") {
    auto bundle = load_repo_bundle("pizza");
    ConstraintEngine engine(bundle);

    auto state = engine.initial_state();
    CHECK_FALSE(engine.is_accepting(state));
    {
        DecoderState probe = state;
        CHECK_FALSE(engine.step(probe, engine.vocabulary().eos()));
    }

    for (const char* token : {"(", "PIZZAORDER", "(", "TOPPING", "ham", ")", ")"}) {
        auto id = engine.vocabulary().id(token);
        REQUIRE(id.has_value());
        REQUIRE(engine.step(state, *id));
    }
    CHECK(engine.is_accepting(state));

    auto allowed = engine.allowed_next(state);
    CHECK(std::count(allowed.begin(), allowed.end(), engine.vocabulary().eos()) == 1);
    REQUIRE(engine.step(state, engine.vocabulary().eos()));
    CHECK(state.finished());
    CHECK(engine.allowed_next(state).empty());
    CHECK_FALSE(engine.is_accepting(state));
}

TEST_CASE("building against an undersupplied bundle surfaces a warning") {
    auto bundle = load_bundle(repo_path("tests/data/invalid/burger_missing_size.json"));
    ConstraintEngine engine(bundle);
    const auto& diags = engine.build_diagnostics();
    REQUIRE_FALSE(diags.empty());
    bool saw_size = false;
    for (const auto& diag : diags) {
        if (diag.subject == "SIZE") saw_size = true;
        CHECK(diag.severity == Severity::kWarning);
    }
    CHECK(saw_size);
}
