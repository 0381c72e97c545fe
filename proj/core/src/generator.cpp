#include "taskparse/generator.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>

#include "json.hpp"
#include "taskparse/text.hpp"

namespace taskparse {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kPreludePlaceholder = "prelude";
constexpr const char* kNumberBase = "number";
constexpr const char* kEntityNamePlaceholder = "entity_name";
constexpr const char* kIntentPlaceholder = "intent";

// "{topping1}" appearing in a pattern, with its byte range.
struct PlaceholderRef {
    std::string name;
    std::size_t begin = 0;
    std::size_t end = 0;  // one past '}'
};

std::vector<PlaceholderRef> find_placeholders(const std::string& pattern) {
    std::vector<PlaceholderRef> refs;
    std::size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] != '{') {
            ++i;
            continue;
        }
        std::size_t begin = i++;
        std::string name;
        while (i < pattern.size() && pattern[i] != '}') {
            char c = pattern[i];
            bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
            if (!ok) {
                throw Error("bad placeholder character '" + std::string(1, c) +
                            "' in pattern: " + pattern);
            }
            name.push_back(c);
            ++i;
        }
        if (i == pattern.size()) {
            throw Error("unterminated placeholder in pattern: " + pattern);
        }
        ++i;  // consume '}'
        if (name.empty()) {
            throw Error("empty placeholder in pattern: " + pattern);
        }
        refs.push_back({std::move(name), begin, i});
    }
    return refs;
}

std::string strip_trailing_digits(const std::string& name) {
    std::size_t end = name.size();
    while (end > 0 && std::isdigit(static_cast<unsigned char>(name[end - 1]))) {
        --end;
    }
    return name.substr(0, end);
}

std::string to_upper(const std::string& text) {
    std::string out = text;
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::toupper(c));
    });
    return out;
}

enum class PlaceholderKind { kCatalog, kNumber, kPrelude, kEntityName, kIntent };

PlaceholderKind classify(const std::string& name) {
    if (name == kPreludePlaceholder) return PlaceholderKind::kPrelude;
    if (name == kEntityNamePlaceholder) return PlaceholderKind::kEntityName;
    if (name == kIntentPlaceholder) return PlaceholderKind::kIntent;
    if (strip_trailing_digits(name) == kNumberBase) return PlaceholderKind::kNumber;
    return PlaceholderKind::kCatalog;
}

// The slot a catalog placeholder refers to: strip the disambiguating digits
// and uppercase ("topping2" -> "TOPPING").
std::string placeholder_slot(const std::string& name) {
    return to_upper(strip_trailing_digits(name));
}

bool entry_in_catalog(const SchemaBundle& bundle, const std::string& slot,
                      const CatalogEntry& entry) {
    auto it = bundle.catalogs.find(slot);
    if (it == bundle.catalogs.end()) return false;
    for (const auto& candidate : it->second) {
        if (candidate.surface == entry.surface && candidate.entity == entry.entity) {
            return true;
        }
    }
    return false;
}

std::string substitute(const std::string& pattern,
                       const std::vector<PlaceholderRef>& refs,
                       const std::map<std::string, Binding>& bindings,
                       const SchemaBundle& bundle,
                       bool parse_side) {
    std::string out;
    std::size_t cursor = 0;
    for (const auto& ref : refs) {
        out.append(pattern, cursor, ref.begin - cursor);
        cursor = ref.end;

        PlaceholderKind kind = classify(ref.name);
        if (kind == PlaceholderKind::kIntent) {
            if (!parse_side) {
                throw Error("{intent} is only valid in a parse pattern");
            }
            auto it = bindings.find(kEntityNamePlaceholder);
            if (it == bindings.end()) {
                throw Error("{intent} needs an {entity_name} binding");
            }
            out += it->second.intent;
            continue;
        }

        auto it = bindings.find(ref.name);
        if (it == bindings.end()) {
            throw Error("unbound placeholder {" + ref.name + "}");
        }
        const Binding& binding = it->second;
        switch (kind) {
            case PlaceholderKind::kPrelude:
                if (parse_side) {
                    throw Error("{prelude} is only valid in a surface pattern");
                }
                out += binding.text;
                break;
            case PlaceholderKind::kEntityName:
                if (parse_side) {
                    throw Error("{entity_name} is only valid in a surface pattern; "
                                "use {intent} in the parse");
                }
                out += binding.text;
                break;
            case PlaceholderKind::kNumber:
                if (!entry_in_catalog(bundle, kNumberSlot, binding.entry)) {
                    throw Error("number binding \"" + binding.entry.surface +
                                "\" not in the " + kNumberSlot + " catalog");
                }
                out += parse_side ? binding.entry.entity : binding.entry.surface;
                break;
            case PlaceholderKind::kCatalog: {
                std::string slot = placeholder_slot(ref.name);
                if (!entry_in_catalog(bundle, slot, binding.entry)) {
                    throw Error("binding \"" + binding.entry.surface +
                                "\" not in the catalog of " + slot);
                }
                out += binding.entry.surface;
                break;
            }
            case PlaceholderKind::kIntent:
                break;  // handled above
        }
    }
    out.append(pattern, cursor, pattern.size() - cursor);
    return out;
}

// NUMBER entries a {number} placeholder may draw: articles are reserved for
// literal template text, everything else is a countable word.
std::vector<const CatalogEntry*> number_pool(const SchemaBundle& bundle) {
    std::vector<const CatalogEntry*> pool;
    auto it = bundle.catalogs.find(kNumberSlot);
    if (it == bundle.catalogs.end()) return pool;
    for (const auto& entry : it->second) {
        if (entry.surface == "a" || entry.surface == "an") continue;
        pool.push_back(&entry);
    }
    return pool;
}

struct PlaceholderPlan {
    // Distinct placeholder names in first-appearance order, surface side
    // first.  Drives both binding draws and validation.
    std::vector<std::string> names;
    std::vector<PlaceholderRef> surface_refs;
    std::vector<PlaceholderRef> parse_refs;
};

PlaceholderPlan plan_template(const TemplateDef& tmpl) {
    PlaceholderPlan plan;
    plan.surface_refs = find_placeholders(tmpl.surface_pattern);
    plan.parse_refs = find_placeholders(tmpl.parse_pattern);
    std::set<std::string> seen;
    for (const auto& ref : plan.surface_refs) {
        if (seen.insert(ref.name).second) plan.names.push_back(ref.name);
    }
    for (const auto& ref : plan.parse_refs) {
        if (ref.name == kIntentPlaceholder) continue;
        if (seen.insert(ref.name).second) plan.names.push_back(ref.name);
    }
    return plan;
}

}  // namespace

Expansion expand(const TemplateDef& tmpl,
                 const std::map<std::string, Binding>& bindings,
                 const SchemaBundle& bundle) {
    PlaceholderPlan plan = plan_template(tmpl);
    std::string surface =
        substitute(tmpl.surface_pattern, plan.surface_refs, bindings, bundle, false);
    std::string parse_text =
        substitute(tmpl.parse_pattern, plan.parse_refs, bindings, bundle, true);

    Expansion out;
    out.utterance = normalize_single_utterance(surface);
    if (out.utterance.empty()) {
        throw Error("template expands to an empty utterance: " + tmpl.surface_pattern);
    }
    out.parse = parse_linear(parse_text);

    auto violations = validate_against_schema(out.parse, bundle);
    if (!violations.empty()) {
        throw Error("template parse violates the schema at " + violations[0].path +
                    ": " + violations[0].detail);
    }
    return out;
}

TemplateSet load_templates(const std::string& path, const SchemaBundle& bundle) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("failed to parse " + path + ": " + e.what());
    }

    TemplateSet set;
    set.task = j.value("task", "");
    if (set.task != bundle.name) {
        throw Error(path + ": template task \"" + set.task +
                    "\" does not match bundle \"" + bundle.name + "\"");
    }
    for (const auto& p : j.value("preludes", json::array())) {
        set.preludes.push_back(p.get<std::string>());
    }
    for (const auto& e : j.value("entity_names", json::array())) {
        set.entity_names.push_back(
            {e.value("surface", ""), e.value("intent", "")});
    }
    for (const auto& jt : j.value("templates", json::array())) {
        TemplateDef tmpl;
        tmpl.surface_pattern = jt.value("surface", "");
        tmpl.parse_pattern = jt.value("parse", "");
        tmpl.weight = jt.value("weight", 1.0);
        tmpl.simple = jt.value("simple", false);
        if (tmpl.weight <= 0.0) {
            throw Error(path + ": template weight must be positive");
        }
        set.templates.push_back(std::move(tmpl));
    }
    if (set.templates.empty()) throw Error(path + ": no templates");

    // Trial-expand every template with deterministic first-choice bindings
    // so authoring mistakes surface now, not mid-generation.
    auto numbers = number_pool(bundle);
    for (const auto& tmpl : set.templates) {
        PlaceholderPlan plan = plan_template(tmpl);
        std::map<std::string, Binding> bindings;
        for (const auto& name : plan.names) {
            Binding binding;
            switch (classify(name)) {
                case PlaceholderKind::kPrelude:
                    if (set.preludes.empty()) {
                        throw Error(path + ": {prelude} used but no preludes listed");
                    }
                    binding.kind = Binding::Kind::kPrelude;
                    binding.text = set.preludes.front();
                    break;
                case PlaceholderKind::kEntityName:
                    if (set.entity_names.empty()) {
                        throw Error(path +
                                    ": {entity_name} used but no entity_names listed");
                    }
                    binding.kind = Binding::Kind::kEntityName;
                    binding.text = set.entity_names.front().surface;
                    binding.intent = set.entity_names.front().intent;
                    break;
                case PlaceholderKind::kNumber:
                    if (numbers.empty()) {
                        throw Error(path + ": {number} used but the " +
                                    kNumberSlot + " catalog has no countable entries");
                    }
                    binding.kind = Binding::Kind::kNumber;
                    binding.entry = *numbers.front();
                    break;
                case PlaceholderKind::kCatalog: {
                    std::string slot = placeholder_slot(name);
                    auto cat = bundle.catalogs.find(slot);
                    if (cat == bundle.catalogs.end() || cat->second.empty()) {
                        throw Error(path + ": placeholder {" + name +
                                    "} refers to slot " + slot +
                                    " which has no catalog");
                    }
                    binding.kind = Binding::Kind::kCatalog;
                    binding.entry = cat->second.front();
                    break;
                }
                case PlaceholderKind::kIntent:
                    continue;
            }
            bindings.emplace(name, std::move(binding));
        }
        try {
            expand(tmpl, bindings, bundle);
        } catch (const Error& e) {
            throw Error(path + ": template \"" + tmpl.surface_pattern +
                        "\" fails to expand: " + e.what());
        }
    }
    return set;
}

GenerationResult sample_dataset(const SchemaBundle& bundle,
                                const TemplateSet& templates,
                                const GenerationConfig& config) {
    std::vector<const TemplateDef*> pool;
    for (const auto& tmpl : templates.templates) {
        if (config.simple_only && !tmpl.simple) continue;
        pool.push_back(&tmpl);
    }
    if (pool.empty()) {
        throw Error("no templates to sample (simple_only filtered everything)");
    }

    std::vector<double> cumulative;
    double total = 0.0;
    for (const TemplateDef* tmpl : pool) {
        total += tmpl->weight;
        cumulative.push_back(total);
    }

    auto numbers = number_pool(bundle);
    std::mt19937_64 rng(config.seed);
    auto uniform_index = [&rng](std::size_t n) {
        return static_cast<std::size_t>(rng() % n);
    };
    auto pick_template = [&]() {
        double r = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
        auto it = std::lower_bound(cumulative.begin(), cumulative.end(), r);
        std::size_t index = static_cast<std::size_t>(it - cumulative.begin());
        if (index >= pool.size()) index = pool.size() - 1;
        return pool[index];
    };

    GenerationResult result;
    result.dataset.form = ValueForm::kSurface;
    std::set<std::string> seen;
    std::size_t budget = config.target_count * config.max_attempts_factor;

    while (result.dataset.examples.size() < config.target_count &&
           result.attempts < budget) {
        ++result.attempts;
        const TemplateDef* tmpl = pick_template();
        PlaceholderPlan plan = plan_template(*tmpl);

        std::map<std::string, Binding> bindings;
        for (const auto& name : plan.names) {
            Binding binding;
            switch (classify(name)) {
                case PlaceholderKind::kPrelude:
                    binding.kind = Binding::Kind::kPrelude;
                    binding.text = templates.preludes[uniform_index(
                        templates.preludes.size())];
                    break;
                case PlaceholderKind::kEntityName: {
                    const auto& entry = templates.entity_names[uniform_index(
                        templates.entity_names.size())];
                    binding.kind = Binding::Kind::kEntityName;
                    binding.text = entry.surface;
                    binding.intent = entry.intent;
                    break;
                }
                case PlaceholderKind::kNumber:
                    binding.kind = Binding::Kind::kNumber;
                    binding.entry = *numbers[uniform_index(numbers.size())];
                    break;
                case PlaceholderKind::kCatalog: {
                    const auto& entries =
                        bundle.catalogs.at(placeholder_slot(name));
                    binding.kind = Binding::Kind::kCatalog;
                    binding.entry = entries[uniform_index(entries.size())];
                    break;
                }
                case PlaceholderKind::kIntent:
                    continue;
            }
            bindings.emplace(name, std::move(binding));
        }

        Expansion expansion = expand(*tmpl, bindings, bundle);
        std::string parse_text = linearize(expansion.parse);
        std::string key = expansion.utterance + "\t" + parse_text;
        if (!seen.insert(key).second) continue;
        result.dataset.examples.push_back(
            Example{std::move(expansion.utterance), std::move(parse_text)});
    }

    if (result.dataset.examples.size() < config.target_count) {
        result.exhausted = true;
        result.diagnostic =
            "generation exhausted after " + std::to_string(result.attempts) +
            " attempts: " + std::to_string(result.dataset.examples.size()) + " of " +
            std::to_string(config.target_count) +
            " unique examples; the template pool cannot produce more";
    }
    return result;
}

}  // namespace taskparse
