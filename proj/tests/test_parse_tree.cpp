#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "taskparse/parse_tree.hpp"

using namespace taskparse;

TEST_CASE("tokenize_linear splits glued parentheses") {
    CHECK(tokenize_linear("(A (B c ) )") ==
          std::vector<std::string>{"(", "A", "(", "B", "c", ")", ")"});
    CHECK(tokenize_linear("((B x))") ==
          std::vector<std::string>{"(", "(", "B", "x", ")", ")"});
    CHECK(tokenize_linear("") == std::vector<std::string>{});
}

TEST_CASE("fixture parses round-trip through parse_linear and linearize") {
    for (const char* task : {"pizza", "burrito", "sub", "burger", "coffee"}) {
        for (const auto& ex : load_fixtures(task).examples) {
            CAPTURE(ex.parse);
            CHECK(linearize(parse_linear(ex.parse)) == ex.parse);
        }
    }
}

TEST_CASE("explicit ORDER root is accepted and stripped") {
    auto forest = parse_linear("(ORDER (PIZZAORDER (NUMBER 1 ) ) )");
    CHECK(linearize(forest) == "(PIZZAORDER (NUMBER 1 ) )");
    CHECK(forest.intents.size() == 1);
}

TEST_CASE("consecutive words form one multi-word leaf") {
    auto forest = parse_linear("(PIZZAORDER (QUANTITY a lot of ) )");
    REQUIRE(forest.intents.size() == 1);
    const auto& quantity = forest.intents[0].children[0];
    REQUIRE(quantity.children.size() == 1);
    CHECK(quantity.children[0].label == "a lot of");
    CHECK(quantity.children[0].is_leaf());
}

TEST_CASE("malformed parses raise ParseError with an offset") {
    auto check_throws = [](const char* text) {
        CAPTURE(text);
        CHECK_THROWS_AS((void)parse_linear(text), ParseError);
    };
    check_throws("");
    check_throws("   ");
    check_throws("(PIZZAORDER");
    check_throws(")");
    check_throws("( )");
    check_throws("ham");
    check_throws("(PIZZAORDER ham )");
    check_throws("(PIZZAORDER (TOPPING ) )");
    check_throws("(PIZZAORDER (TOPPING ham (NUMBER 1 ) ) )");

    try {
        (void)parse_linear("(PIZZAORDER (TOPPING ) )");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() <= std::string("(PIZZAORDER (TOPPING ) )").size());
        CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
}

TEST_CASE("resolve_entities maps surfaces and passes integers through") {
    auto bundle = load_repo_bundle("pizza");
    auto resolved = resolve_entities(
        parse_linear("(PIZZAORDER (NUMBER two ) (TOPPING green peppers ) )"), bundle);
    CHECK(linearize(resolved) == "(PIZZAORDER (NUMBER 2 ) (TOPPING peppers ) )");

    // Idempotent: resolving the resolved tree changes nothing.
    CHECK(linearize(resolve_entities(resolved, bundle)) == linearize(resolved));

    // Integer literals survive under numeric slots even off-catalog.
    auto numeric = resolve_entities(parse_linear("(PIZZAORDER (NUMBER 7 ) )"), bundle);
    CHECK(linearize(numeric) == "(PIZZAORDER (NUMBER 7 ) )");

    CHECK_THROWS_WITH_AS(
        (void)resolve_entities(parse_linear("(PIZZAORDER (TOPPING gravel ) )"), bundle),
        doctest::Contains("gravel"), Error);
}

TEST_CASE("unordered_equal ignores sibling order at every level") {
    auto a = parse_linear(
        "(PIZZAORDER (NOT (TOPPING olives ) ) (NUMBER 1 ) (TOPPING ham ) (TOPPING pesto ) )");
    auto b = parse_linear(
        "(PIZZAORDER (TOPPING pesto ) (TOPPING ham ) (NUMBER 1 ) (NOT (TOPPING olives ) ) )");
    CHECK(unordered_equal(a, b));

    auto c = parse_linear(
        "(PIZZAORDER (NOT (TOPPING olives ) ) (NUMBER 1 ) (TOPPING ham ) (TOPPING basil ) )");
    CHECK_FALSE(unordered_equal(a, c));

    // Multiset semantics: duplicates are not collapsed.
    auto one = parse_linear("(PIZZAORDER (TOPPING ham ) )");
    auto two = parse_linear("(PIZZAORDER (TOPPING ham ) (TOPPING ham ) )");
    CHECK_FALSE(unordered_equal(one, two));

    // Forests compare across intents, order-free.
    auto f1 = parse_linear("(PIZZAORDER (NUMBER 1 ) ) (DRINKORDER (NUMBER 2 ) )");
    auto f2 = parse_linear("(DRINKORDER (NUMBER 2 ) ) (PIZZAORDER (NUMBER 1 ) )");
    CHECK(unordered_equal(f1, f2));
}

TEST_CASE("compute_stats counts intents, slots, and rooted depth") {
    auto flat = compute_stats(parse_linear("(PIZZAORDER (NUMBER 1 ) (TOPPING ham ) )"));
    CHECK(flat.n_intents == 1);
    CHECK(flat.n_slots == 2);
    CHECK(flat.depth == 3);  // implicit root -> intent -> slot

    auto nested = compute_stats(parse_linear(
        "(PIZZAORDER (NOT (TOPPING olives ) ) (NUMBER 1 ) (TOPPING ham ) (TOPPING pesto ) )"));
    CHECK(nested.n_intents == 1);
    CHECK(nested.n_slots == 5);
    CHECK(nested.depth == 4);

    auto coffee = compute_stats(parse_linear(load_fixtures("coffee").examples[1].parse));
    CHECK(coffee.n_intents == 2);
    CHECK(coffee.n_slots == 11);
    CHECK(coffee.depth == 4);
}

TEST_CASE("every fixture validates against its own bundle") {
    for (const char* task : {"pizza", "burrito", "sub", "burger", "coffee"}) {
        auto bundle = load_repo_bundle(task);
        for (const auto& ex : load_fixtures(task).examples) {
            CAPTURE(ex.parse);
            CHECK(validate_against_schema(parse_linear(ex.parse), bundle).empty());
        }
    }
}

TEST_CASE("validate_against_schema reports kinds and paths") {
    auto bundle = load_repo_bundle("pizza");
    auto kinds = [&](const char* text) {
        std::vector<ViolationKind> out;
        for (const auto& v : validate_against_schema(parse_linear(text), bundle)) {
            out.push_back(v.kind);
        }
        return out;
    };

    CHECK(kinds("(TACO_ORDER (NUMBER 1 ) )") ==
          std::vector<ViolationKind>{ViolationKind::kUnknownIntent});
    CHECK(kinds("(PIZZAORDER (RICE_FILLING x ) )") ==
          std::vector<ViolationKind>{ViolationKind::kUnknownSlot});
    CHECK(kinds("(DRINKORDER (TOPPING ham ) )") ==
          std::vector<ViolationKind>{ViolationKind::kIncompatibleSlot});
    CHECK(kinds("(PIZZAORDER (TOPPING gravel ) )") ==
          std::vector<ViolationKind>{ViolationKind::kUnresolvableValue});
    CHECK(kinds("(PIZZAORDER (COMPLEX (TOPPING ham ) ) )") ==
          std::vector<ViolationKind>{ViolationKind::kIncompatibleSlot});
    CHECK(kinds("(PIZZAORDER (TOPPING (SIZE large ) ) )") ==
          std::vector<ViolationKind>{ViolationKind::kIncompatibleSlot});

    auto violations =
        validate_against_schema(parse_linear("(PIZZAORDER (TOPPING gravel ) )"), bundle);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].path == "/PIZZAORDER[0]/TOPPING[0]");
    CHECK(violations[0].detail.find("gravel") != std::string::npos);
}
