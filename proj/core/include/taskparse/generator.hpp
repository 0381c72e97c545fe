#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "taskparse/dataset.hpp"
#include "taskparse/parse_tree.hpp"
#include "taskparse/schema.hpp"

namespace taskparse {

// A surface/parse pattern pair.  {placeholders} in the surface bind catalog
// entries and reappear in the parse pattern; a trailing digit distinguishes
// repeated slots ({topping1}, {topping2}).  Special names:
//   {prelude}      pool of opening phrases, surface only
//   {number...}    NUMBER entry; spelled out in the surface, digits in the parse
//   {entity_name}  intent-tagged phrase pool; {intent} in the parse pattern
//                  names the chosen entry's intent
struct TemplateDef {
    std::string surface_pattern;
    std::string parse_pattern;
    double weight = 1.0;
    bool simple = false;  // single intent, no wrappers; baseline-parseable
};

struct EntityNamePoolEntry {
    std::string surface;
    std::string intent;
};

struct TemplateSet {
    std::string task;  // must equal the bundle name at load
    std::vector<std::string> preludes;
    std::vector<EntityNamePoolEntry> entity_names;
    std::vector<TemplateDef> templates;
};

// Loads a template set and trial-expands every template against the bundle,
// so broken placeholders or out-of-catalog values fail at load time.
TemplateSet load_templates(const std::string& path, const SchemaBundle& bundle);

struct Binding {
    enum class Kind { kCatalog, kNumber, kPrelude, kEntityName } kind = Kind::kCatalog;
    CatalogEntry entry;  // catalog and number bindings
    std::string text;    // prelude and entity-name surface
    std::string intent;  // entity-name bindings only
};

struct Expansion {
    std::string utterance;  // normalized
    ParseForest parse;      // surface-valued
};

// Substitutes one binding per placeholder name into both patterns.  Throws
// on unbound placeholders, bindings outside the referenced catalog, or a
// pattern that does not parse.
Expansion expand(const TemplateDef& tmpl,
                 const std::map<std::string, Binding>& bindings,
                 const SchemaBundle& bundle);

struct GenerationConfig {
    std::size_t target_count = 1000;
    std::uint64_t seed = 0;
    bool simple_only = false;
    // Sampling stops after target_count * this many attempts.
    std::size_t max_attempts_factor = 50;
};

struct GenerationResult {
    Dataset dataset;  // surface-valued, deduplicated
    bool exhausted = false;
    std::size_t attempts = 0;
    std::string diagnostic;  // set when exhausted
};

// Draws templates by weight and fills placeholders uniformly from the
// bundle until target_count unique examples exist or the attempt budget
// runs out.  Same seed, same bundle, same templates: identical output.
GenerationResult sample_dataset(const SchemaBundle& bundle,
                                const TemplateSet& templates,
                                const GenerationConfig& config);

}  // namespace taskparse
