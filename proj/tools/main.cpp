// Command line front end for the taskparse library.
//
// Subcommands cover the full workflow: validate a schema bundle, generate
// synthetic training data from templates, link utterances against catalogs,
// replay or sample constrained decodes, run the parsing pipeline with a
// pluggable scorer, and score predictions against gold parses.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "taskparse/constraint.hpp"
#include "taskparse/dataset.hpp"
#include "taskparse/errors.hpp"
#include "taskparse/evaluator.hpp"
#include "taskparse/generator.hpp"
#include "taskparse/linker.hpp"
#include "taskparse/parse_tree.hpp"
#include "taskparse/schema.hpp"
#include "taskparse/scorer.hpp"
#include "taskparse/text.hpp"
#include "taskparse/version.hpp"

namespace tp = taskparse;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

// Collapses a raw utterance to one normalized line.  Sentence pieces are
// rejoined with spaces so input and output files stay line-aligned.
std::string normalize_joined(const std::string& raw) {
    return join(tp::normalize_utterance(raw), " ");
}

// Reads either a headered utterance/parse dataset or a plain file with one
// utterance per line.
tp::Dataset read_examples(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw tp::Error("cannot open " + path);
    std::string first;
    std::getline(probe, first);
    probe.close();
    if (first.rfind("# values:", 0) == 0) return tp::load_dataset(path);

    tp::Dataset ds;
    for (const auto& line : tp::load_lines(path)) {
        if (line.empty()) continue;
        ds.examples.push_back({line, ""});
    }
    return ds;
}

// Reads a prediction file, tolerating a dataset-style header line.
std::vector<std::string> read_predictions(const std::string& path) {
    auto lines = tp::load_lines(path);
    if (!lines.empty() && lines.front().rfind("# values:", 0) == 0) {
        lines.erase(lines.begin());
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

void emit_lines(const std::vector<std::string>& lines, const std::string& out_path) {
    if (out_path.empty()) {
        for (const auto& l : lines) std::cout << l << '\n';
    } else {
        tp::save_lines(lines, out_path);
    }
}

ordered_json manifest_base(const char* command, const tp::SchemaBundle& bundle) {
    ordered_json m;
    m["tool"] = "taskparse";
    m["version"] = tp::kVersion;
    m["command"] = command;
    m["bundle"] = bundle.name;
    return m;
}

// The manifest sits next to the output it describes and contains no
// timestamps, so reruns with the same inputs are byte-identical.
void write_manifest(const std::string& out_path, const ordered_json& m) {
    std::ofstream out(out_path + ".manifest.json");
    if (!out) throw tp::Error("cannot write manifest next to " + out_path);
    out << m.dump(2) << '\n';
}

void print_diagnostics(const std::vector<tp::Diagnostic>& diags) {
    if (!diags.empty()) std::cerr << tp::format_diagnostics(diags);
}

struct StrictFlags {
    bool slots = false;
    bool negation = false;

    tp::StrictnessConfig config() const {
        return {slots, negation};
    }
};

int run_validate(const std::string& bundle_path) {
    tp::SchemaBundle bundle;
    try {
        bundle = tp::load_bundle(bundle_path);
    } catch (const tp::BundleError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    print_diagnostics(tp::validate_bundle(bundle));
    tp::ConstraintEngine engine(bundle);
    print_diagnostics(engine.build_diagnostics());

    auto st = tp::bundle_stats(bundle);
    std::cout << "OK " << bundle.name << ": " << st.n_intents << " intents, "
              << st.n_slots << " slots, " << st.n_surfaces << " surfaces, "
              << st.n_entities << " entities, " << st.n_keywords << " keywords, "
              << engine.vocabulary().size() << " decoder tokens\n";
    return 0;
}

int run_stats(const std::string& bundle_path, const std::string& data_path) {
    auto bundle = tp::load_bundle(bundle_path);
    auto st = tp::bundle_stats(bundle);

    ordered_json out;
    out["bundle"] = {{"name", bundle.name},
                     {"intents", st.n_intents},
                     {"slots", st.n_slots},
                     {"entities", st.n_entities},
                     {"surfaces", st.n_surfaces},
                     {"keywords", st.n_keywords}};
    if (!data_path.empty()) {
        auto ds = tp::load_dataset(data_path);
        if (ds.examples.empty()) throw tp::Error("dataset is empty: " + data_path);
        double intents = 0, slots = 0, depth = 0;
        for (const auto& ex : ds.examples) {
            auto ts = tp::compute_stats(tp::parse_linear(ex.parse));
            intents += static_cast<double>(ts.n_intents);
            slots += static_cast<double>(ts.n_slots);
            depth += static_cast<double>(ts.depth);
        }
        auto n = static_cast<double>(ds.examples.size());
        out["dataset"] = {{"examples", ds.examples.size()},
                          {"avg_intents", intents / n},
                          {"avg_slots", slots / n},
                          {"avg_depth", depth / n}};
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int run_link(const std::string& bundle_path, const std::string& data_path,
             const std::string& out_path, const tp::LinkerConfig& config,
             bool normalize, bool coverage) {
    config.validate();
    auto bundle = tp::load_bundle(bundle_path);
    auto ds = read_examples(data_path);

    std::vector<std::string> lines;
    lines.reserve(ds.examples.size());
    std::size_t incomplete = 0, missing_pairs = 0;
    for (std::size_t i = 0; i < ds.examples.size(); ++i) {
        const auto& ex = ds.examples[i];
        std::string utterance = normalize ? normalize_joined(ex.utterance) : ex.utterance;

        tp::LinkedSchema linked;
        if (config.oracle) {
            if (ex.parse.empty()) {
                throw tp::Error("oracle linking needs gold parses in the data file");
            }
            linked = tp::oracle_link(utterance, tp::parse_linear(ex.parse), bundle);
        } else {
            linked = tp::fuzzy_match(utterance, bundle, config);
        }
        lines.push_back(tp::serialize_input(utterance, linked));

        if (coverage && !ex.parse.empty()) {
            auto gold = tp::resolve_entities(tp::parse_linear(ex.parse), bundle);
            auto missing = tp::coverage_report(linked, gold);
            if (!missing.empty()) {
                ++incomplete;
                missing_pairs += missing.size();
                std::cerr << "line " << (i + 1) << ": missing";
                for (const auto& [slot, entity] : missing) {
                    std::cerr << ' ' << slot << '=' << entity;
                }
                std::cerr << '\n';
            }
        }
    }

    emit_lines(lines, out_path);
    if (coverage) {
        std::cerr << "coverage: " << (ds.examples.size() - incomplete) << '/'
                  << ds.examples.size() << " examples fully covered\n";
    }
    if (!out_path.empty()) {
        auto m = manifest_base("link", bundle);
        m["data"] = data_path;
        m["threshold"] = config.threshold;
        m["suppress_unit_number"] = config.suppress_unit_number;
        m["oracle"] = config.oracle;
        m["examples"] = ds.examples.size();
        if (coverage) {
            m["incomplete_examples"] = incomplete;
            m["missing_pairs"] = missing_pairs;
        }
        write_manifest(out_path, m);
    }
    return 0;
}

int run_generate(const std::string& bundle_path, const std::string& templates_path,
                 const std::string& out_path, const tp::GenerationConfig& config) {
    auto bundle = tp::load_bundle(bundle_path);
    auto templates = tp::load_templates(templates_path, bundle);
    auto result = tp::sample_dataset(bundle, templates, config);

    tp::save_dataset(result.dataset, out_path);
    if (result.exhausted) {
        std::cerr << "warning: " << result.diagnostic << '\n';
    }
    std::cerr << "generated " << result.dataset.examples.size() << " examples in "
              << result.attempts << " attempts\n";

    auto m = manifest_base("generate", bundle);
    m["templates"] = templates_path;
    m["template_count"] = templates.templates.size();
    m["seed"] = config.seed;
    m["target_count"] = config.target_count;
    m["simple_only"] = config.simple_only;
    m["examples"] = result.dataset.examples.size();
    m["attempts"] = result.attempts;
    m["exhausted"] = result.exhausted;
    write_manifest(out_path, m);
    return 0;
}

int run_replay(const std::string& bundle_path, const std::vector<std::string>& texts,
               const std::string& data_path, const StrictFlags& strict) {
    auto bundle = tp::load_bundle(bundle_path);
    tp::ConstraintEngine engine(bundle, strict.config());

    std::vector<std::string> parses = texts;
    if (!data_path.empty()) {
        std::ifstream probe(data_path);
        if (!probe) throw tp::Error("cannot open " + data_path);
        std::string first;
        std::getline(probe, first);
        probe.close();
        if (first.rfind("# values:", 0) == 0) {
            for (const auto& ex : tp::load_dataset(data_path).examples) {
                parses.push_back(ex.parse);
            }
        } else {
            for (const auto& line : tp::load_lines(data_path)) {
                if (!line.empty()) parses.push_back(line);
            }
        }
    }
    if (parses.empty()) {
        std::cerr << "nothing to replay: pass --text or --data\n";
        return 2;
    }

    bool all_ok = true;
    for (const auto& p : parses) {
        auto r = engine.replay_text(p);
        if (r.accepted) {
            std::cout << "ACCEPT\t" << p << '\n';
        } else {
            all_ok = false;
            std::cout << "REJECT\tposition " << r.position << "\ttoken \"" << r.token
                      << "\"\texpected: " << join(r.expected, " ") << '\n';
        }
    }
    return all_ok ? 0 : 1;
}

int run_sample(const std::string& bundle_path, const std::string& out_path,
               std::size_t count, std::uint64_t seed, std::size_t max_len,
               const StrictFlags& strict) {
    auto bundle = tp::load_bundle(bundle_path);
    tp::ConstraintEngine engine(bundle, strict.config());

    std::mt19937_64 rng(seed);
    std::vector<std::string> lines;
    std::size_t attempts = 0;
    const std::size_t budget = count * 100 + 100;
    while (lines.size() < count && attempts < budget) {
        ++attempts;
        if (auto tokens = tp::sample_parse(engine, rng, max_len)) {
            lines.push_back(tp::detokenize(engine, *tokens));
        }
    }
    if (lines.size() < count) {
        std::cerr << "warning: produced " << lines.size() << " of " << count
                  << " samples within the attempt budget\n";
    }

    emit_lines(lines, out_path);
    if (!out_path.empty()) {
        auto m = manifest_base("sample", bundle);
        m["seed"] = seed;
        m["count"] = lines.size();
        m["attempts"] = attempts;
        m["max_len"] = max_len;
        m["vocabulary"] = engine.vocabulary().size();
        write_manifest(out_path, m);
    }
    return 0;
}

ordered_json report_json(const tp::EvalReport& report) {
    ordered_json r;
    r["examples"] = report.n_examples;
    r["correct"] = report.n_correct;
    r["invalid_parses"] = report.n_invalid_parses;
    r["missing_schema"] = report.n_missing_schema;
    r["exact_match"] = report.exact_match;
    return r;
}

int run_eval(const std::string& bundle_path, const std::string& gold_path,
             const std::string& pred_path, const std::string& out_path,
             const tp::LinkerConfig& config,
             const std::vector<std::string>& train_bundle_paths) {
    config.validate();
    auto bundle = tp::load_bundle(bundle_path);
    auto gold = tp::load_dataset(gold_path);
    auto preds = read_predictions(pred_path);
    auto report = tp::evaluate(preds, gold, bundle, config);

    ordered_json out = report_json(report);
    if (!train_bundle_paths.empty()) {
        std::vector<tp::SchemaBundle> train;
        train.reserve(train_bundle_paths.size());
        for (const auto& p : train_bundle_paths) train.push_back(tp::load_bundle(p));
        std::vector<const tp::SchemaBundle*> ptrs;
        for (const auto& b : train) ptrs.push_back(&b);

        auto idx = tp::subset_unseen_intents(gold, ptrs);
        std::size_t correct = 0;
        for (auto i : idx) {
            if (report.correct[i]) ++correct;
        }
        out["unseen_intents"] = {
            {"examples", idx.size()},
            {"correct", correct},
            {"exact_match",
             idx.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(idx.size())}};
    }

    std::cout << out.dump(2) << '\n';
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw tp::Error("cannot write " + out_path);
        f << out.dump(2) << '\n';
        auto m = manifest_base("eval", bundle);
        m["gold"] = gold_path;
        m["pred"] = pred_path;
        m["threshold"] = config.threshold;
        m["report"] = out;
        write_manifest(out_path, m);
    }
    return 0;
}

struct PipelineOptions {
    std::string bundle_path;
    std::string data_path;
    std::string out_path;
    std::string scorer = "baseline";
    std::string scorer_cmd;
    std::size_t beam = 6;
    std::size_t max_len = 256;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool normalize = false;
    bool no_eval = false;
    tp::LinkerConfig linker;
    StrictFlags strict;
};

int run_pipeline(const PipelineOptions& opt) {
    opt.linker.validate();
    if (opt.scorer == "external" && opt.scorer_cmd.empty()) {
        std::cerr << "--scorer external needs --scorer-cmd\n";
        return 2;
    }
    auto bundle = tp::load_bundle(opt.bundle_path);
    tp::ConstraintEngine engine(bundle, opt.strict.config());
    print_diagnostics(engine.build_diagnostics());
    auto ds = read_examples(opt.data_path);
    if (ds.examples.empty()) throw tp::Error("no examples in " + opt.data_path);

    const std::size_t n = ds.examples.size();
    std::vector<std::string> preds(n);
    std::vector<std::string> errors(n);

    // The external scorer holds one child process, so it cannot be shared
    // across threads.
    std::unique_ptr<tp::PipeScorer> external;
    if (opt.scorer == "external") {
        external = std::make_unique<tp::PipeScorer>(engine, opt.scorer_cmd);
    }

    auto parse_one = [&](std::size_t i) {
        const auto& ex = ds.examples[i];
        try {
            std::string utterance =
                opt.normalize ? normalize_joined(ex.utterance) : ex.utterance;
            tp::LinkedSchema linked;
            if (opt.linker.oracle) {
                if (ex.parse.empty()) throw tp::Error("oracle linking needs gold parses");
                linked = tp::oracle_link(utterance, tp::parse_linear(ex.parse), bundle);
            } else {
                linked = tp::fuzzy_match(utterance, bundle, opt.linker);
            }

            if (opt.scorer == "baseline") {
                preds[i] = tp::linearize(tp::baseline_parse(utterance, linked, bundle));
                return;
            }

            std::unique_ptr<tp::Scorer> owned;
            tp::Scorer* scorer = nullptr;
            if (opt.scorer == "random") {
                owned = std::make_unique<tp::UniformRandomScorer>(opt.seed + i);
                scorer = owned.get();
            } else if (opt.scorer == "gold-replay") {
                if (ex.parse.empty()) throw tp::Error("gold-replay needs gold parses");
                owned = std::make_unique<tp::GoldReplayScorer>(engine, ex.parse);
                scorer = owned.get();
            } else {
                scorer = external.get();
            }

            auto result = tp::constrained_beam_search(engine, *scorer, opt.beam, opt.max_len);
            if (result.hypotheses.empty()) throw tp::Error("no hypothesis finished");
            preds[i] = tp::detokenize(engine, result.hypotheses.front().tokens);
        } catch (const tp::Error& e) {
            preds[i] = "";
            errors[i] = e.what();
        }
    };

    unsigned jobs = opt.jobs == 0 ? std::thread::hardware_concurrency() : opt.jobs;
    if (jobs == 0) jobs = 1;
    if (external) jobs = 1;
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) parse_one(i);
    } else {
        jobs = std::min<unsigned>(jobs, static_cast<unsigned>(n));
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned t = 0; t < jobs; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < n; i += jobs) parse_one(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::size_t failed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            ++failed;
            std::cerr << "example " << (i + 1) << ": " << errors[i] << '\n';
        }
    }
    emit_lines(preds, opt.out_path);

    bool have_gold = std::any_of(ds.examples.begin(), ds.examples.end(),
                                 [](const tp::Example& e) { return !e.parse.empty(); });
    ordered_json report;
    if (have_gold && !opt.no_eval) {
        report = report_json(tp::evaluate(preds, ds, bundle, opt.linker));
        std::cout << report.dump(2) << '\n';
    }

    if (!opt.out_path.empty()) {
        auto m = manifest_base("pipeline", bundle);
        m["data"] = opt.data_path;
        m["scorer"] = opt.scorer;
        m["beam"] = opt.beam;
        m["seed"] = opt.seed;
        m["threshold"] = opt.linker.threshold;
        m["oracle"] = opt.linker.oracle;
        m["strict_slots"] = opt.strict.slots;
        m["strict_negation"] = opt.strict.negation;
        m["examples"] = n;
        m["failed_examples"] = failed;
        if (!report.is_null()) m["report"] = report;
        write_manifest(opt.out_path, m);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schema-grounded parsing of spoken food orders"};
    app.set_version_flag("--version", tp::kVersion);
    app.require_subcommand(1);

    std::string bundle_path, data_path, out_path, gold_path, pred_path, templates_path;
    std::vector<std::string> texts, train_bundles;
    tp::LinkerConfig linker;
    StrictFlags strict;
    tp::GenerationConfig gen;
    PipelineOptions pipe;
    std::size_t sample_count = 10, max_len = 256;
    std::uint64_t seed = 0;
    bool keep_unit_number = false, normalize = false, coverage = false;

    auto add_bundle = [&](CLI::App* cmd, std::string& target) {
        cmd->add_option("-b,--bundle", target, "Schema bundle (JSON file or directory)")
            ->required()
            ->envname("TASKPARSE_BUNDLE")
            ->check(CLI::ExistingPath);
    };
    auto add_strict = [&](CLI::App* cmd) {
        cmd->add_flag("--strict-slots", strict.slots,
                      "Only offer slots declared by the open intent");
        cmd->add_flag("--strict-negation", strict.negation,
                      "Only offer negatable slots under NOT");
    };
    auto add_linker = [&](CLI::App* cmd) {
        cmd->add_option("-t,--threshold", linker.threshold,
                        "Fuzzy match similarity threshold")
            ->envname("TASKPARSE_THRESHOLD");
        cmd->add_flag("--keep-unit-number", keep_unit_number,
                      "Keep quantity-one NUMBER matches in the linked schema");
        cmd->add_flag("--oracle", linker.oracle,
                      "Link gold parse values instead of fuzzy matching");
    };

    auto* validate = app.add_subcommand("validate", "Check a schema bundle");
    add_bundle(validate, bundle_path);

    auto* stats = app.add_subcommand("stats", "Bundle and dataset statistics");
    add_bundle(stats, bundle_path);
    stats->add_option("-d,--data", data_path, "Utterance/parse dataset")
        ->check(CLI::ExistingFile);

    auto* link = app.add_subcommand("link", "Fuzzy-link utterances to catalog values");
    add_bundle(link, bundle_path);
    link->add_option("-d,--data", data_path, "Dataset or one utterance per line")
        ->required()
        ->check(CLI::ExistingFile);
    link->add_option("-o,--out", out_path, "Write serialized inputs here");
    link->add_flag("--normalize", normalize, "Normalize utterances first");
    link->add_flag("--coverage", coverage, "Report gold values the link step missed");
    add_linker(link);

    auto* generate = app.add_subcommand("generate", "Sample synthetic training data");
    add_bundle(generate, bundle_path);
    generate->add_option("--templates", templates_path, "Template set JSON")
        ->required()
        ->check(CLI::ExistingFile);
    generate->add_option("-o,--out", out_path, "Output dataset path")->required();
    generate->add_option("-n,--count", gen.target_count, "Unique examples to produce");
    generate->add_option("-s,--seed", gen.seed, "Sampling seed")->envname("TASKPARSE_SEED");
    generate->add_flag("--simple-only", gen.simple_only,
                       "Use only single-intent, wrapper-free templates");
    generate->add_option("--attempts-factor", gen.max_attempts_factor,
                         "Attempt budget as a multiple of --count");

    auto* constrain = app.add_subcommand("constrain", "Work with the decoding table");
    constrain->require_subcommand(1);
    auto* replay = constrain->add_subcommand("replay", "Check parses against the table");
    add_bundle(replay, bundle_path);
    replay->add_option("--text", texts, "Linearized parse (repeatable)");
    replay->add_option("-d,--data", data_path, "Dataset or one parse per line")
        ->check(CLI::ExistingFile);
    add_strict(replay);

    auto* sample = constrain->add_subcommand("sample", "Random walks over the table");
    add_bundle(sample, bundle_path);
    sample->add_option("-n,--count", sample_count, "Parses to sample");
    sample->add_option("-s,--seed", seed, "Walk seed")->envname("TASKPARSE_SEED");
    sample->add_option("--max-len", max_len, "Token budget per walk");
    sample->add_option("-o,--out", out_path, "Write samples here");
    add_strict(sample);

    auto* eval = app.add_subcommand("eval", "Score predictions against gold parses");
    add_bundle(eval, bundle_path);
    eval->add_option("-g,--gold", gold_path, "Gold dataset")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("-p,--pred", pred_path, "Predictions, one parse per line")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("-o,--out", out_path, "Write the report JSON here");
    eval->add_option("--train-bundle", train_bundles,
                     "Training bundle for the unseen-intent subset (repeatable)")
        ->check(CLI::ExistingPath);
    add_linker(eval);

    auto* pipeline = app.add_subcommand("pipeline", "Parse utterances end to end");
    add_bundle(pipeline, pipe.bundle_path);
    pipeline->add_option("-d,--data", pipe.data_path, "Dataset or one utterance per line")
        ->required()
        ->check(CLI::ExistingFile);
    pipeline->add_option("-o,--out", pipe.out_path, "Write predictions here");
    pipeline->add_option("--scorer", pipe.scorer, "baseline, random, gold-replay, external")
        ->check(CLI::IsMember({"baseline", "random", "gold-replay", "external"}));
    pipeline->add_option("--scorer-cmd", pipe.scorer_cmd,
                         "Shell command implementing the scorer protocol");
    pipeline->add_option("--beam", pipe.beam, "Beam width")->envname("TASKPARSE_BEAM");
    pipeline->add_option("--max-len", pipe.max_len, "Token budget per decode");
    pipeline->add_option("-s,--seed", pipe.seed, "Seed for the random scorer")
        ->envname("TASKPARSE_SEED");
    pipeline->add_option("-j,--jobs", pipe.jobs, "Worker threads (0 = all cores)");
    pipeline->add_flag("--normalize", pipe.normalize, "Normalize utterances first");
    pipeline->add_flag("--no-eval", pipe.no_eval, "Skip scoring even when gold is present");
    pipeline->add_option("-t,--threshold", pipe.linker.threshold,
                         "Fuzzy match similarity threshold")
        ->envname("TASKPARSE_THRESHOLD");
    pipeline->add_flag("--keep-unit-number", keep_unit_number,
                       "Keep quantity-one NUMBER matches in the linked schema");
    pipeline->add_flag("--oracle", pipe.linker.oracle,
                       "Link gold parse values instead of fuzzy matching");
    pipeline->add_flag("--strict-slots", pipe.strict.slots,
                       "Only offer slots declared by the open intent");
    pipeline->add_flag("--strict-negation", pipe.strict.negation,
                       "Only offer negatable slots under NOT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    linker.suppress_unit_number = !keep_unit_number;
    pipe.linker.suppress_unit_number = !keep_unit_number;

    try {
        if (app.got_subcommand(validate)) return run_validate(bundle_path);
        if (app.got_subcommand(stats)) return run_stats(bundle_path, data_path);
        if (app.got_subcommand(link)) {
            return run_link(bundle_path, data_path, out_path, linker, normalize, coverage);
        }
        if (app.got_subcommand(generate)) {
            return run_generate(bundle_path, templates_path, out_path, gen);
        }
        if (constrain->got_subcommand(replay)) {
            return run_replay(bundle_path, texts, data_path, strict);
        }
        if (constrain->got_subcommand(sample)) {
            return run_sample(bundle_path, out_path, sample_count, seed, max_len, strict);
        }
        if (app.got_subcommand(eval)) {
            return run_eval(bundle_path, gold_path, pred_path, out_path, linker, train_bundles);
        }
        if (app.got_subcommand(pipeline)) return run_pipeline(pipe);
    } catch (const tp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
