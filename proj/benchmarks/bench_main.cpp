#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "taskparse/constraint.hpp"
#include "taskparse/generator.hpp"
#include "taskparse/linker.hpp"
#include "taskparse/parse_tree.hpp"
#include "taskparse/scorer.hpp"
#include "taskparse/text.hpp"

using namespace taskparse;

namespace {

std::string repo_path(const std::string& rel) {
    return std::string(TASKPARSE_REPO_DIR) + "/" + rel;
}

const SchemaBundle& pizza_bundle() {
    static SchemaBundle bundle = load_bundle(repo_path("bundles/pizza.json"));
    return bundle;
}

const SchemaBundle& sub_bundle() {
    static SchemaBundle bundle = load_bundle(repo_path("bundles/sub.json"));
    return bundle;
}

const ConstraintEngine& pizza_engine() {
    static ConstraintEngine engine(pizza_bundle());
    return engine;
}

constexpr const char* kUtterance =
    "i'll have two large thin crust pizzas with ham and green peppers "
    "and a two liter bottle of sprite";
constexpr const char* kParse =
    "(PIZZAORDER (NUMBER 2 ) (SIZE large ) (STYLE thin_crust ) (TOPPING ham ) "
    "(TOPPING peppers ) ) (DRINKORDER (NUMBER 1 ) (VOLUME two_liter ) "
    "(CONTAINERTYPE bottle ) (DRINKTYPE sprite ) )";

}  // namespace

static void BM_LoadBundle(benchmark::State& state) {
    const std::string path = repo_path("bundles/pizza.json");
    for (auto _ : state) {
        benchmark::DoNotOptimize(load_bundle(path));
    }
}
BENCHMARK(BM_LoadBundle);

static void BM_NormalizeUtterance(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(normalize_utterance("I'd like 2 Large Cokes, please!"));
    }
}
BENCHMARK(BM_NormalizeUtterance);

static void BM_FuzzyMatch(benchmark::State& state) {
    const auto& bundle = pizza_bundle();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fuzzy_match(kUtterance, bundle, {}));
    }
}
BENCHMARK(BM_FuzzyMatch);

static void BM_BaselineParse(benchmark::State& state) {
    const auto& bundle = pizza_bundle();
    LinkedSchema linked = fuzzy_match(kUtterance, bundle, {});
    for (auto _ : state) {
        benchmark::DoNotOptimize(baseline_parse(kUtterance, linked, bundle));
    }
}
BENCHMARK(BM_BaselineParse);

static void BM_BuildEngine(benchmark::State& state) {
    const auto& bundle = pizza_bundle();
    for (auto _ : state) {
        ConstraintEngine engine(bundle);
        benchmark::DoNotOptimize(engine.vocabulary().size());
    }
}
BENCHMARK(BM_BuildEngine);

static void BM_ReplayText(benchmark::State& state) {
    const auto& engine = pizza_engine();
    for (auto _ : state) {
        benchmark::DoNotOptimize(engine.replay_text(kParse));
    }
}
BENCHMARK(BM_ReplayText);

static void BM_SampleParse(benchmark::State& state) {
    const auto& engine = pizza_engine();
    std::mt19937_64 rng(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_parse(engine, rng));
    }
}
BENCHMARK(BM_SampleParse);

static void BM_GoldReplayBeam(benchmark::State& state) {
    const auto& engine = pizza_engine();
    for (auto _ : state) {
        GoldReplayScorer scorer(engine, kParse);
        benchmark::DoNotOptimize(constrained_beam_search(engine, scorer, 6, 256));
    }
}
BENCHMARK(BM_GoldReplayBeam);

static void BM_GenerateHundred(benchmark::State& state) {
    const auto& bundle = sub_bundle();
    static TemplateSet templates =
        load_templates(repo_path("templates/sub.json"), bundle);
    GenerationConfig config;
    config.target_count = 100;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_dataset(bundle, templates, config));
    }
}
BENCHMARK(BM_GenerateHundred);

BENCHMARK_MAIN();
