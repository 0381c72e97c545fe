#include "taskparse/schema.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "taskparse/text.hpp"

namespace taskparse {

namespace {

using json = nlohmann::ordered_json;

bool valid_entity_chars(std::string_view entity) {
    return !entity.empty() &&
           std::all_of(entity.begin(), entity.end(), [](char c) {
               return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
           });
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error("failed to parse " + path + ": " + e.what());
    }
}

void parse_schema_section(const json& j, SchemaBundle& bundle) {
    bundle.name = j.value("name", "");
    for (const auto& ji : j.value("intents", json::array())) {
        IntentDef intent;
        intent.name = ji.value("name", "");
        for (const auto& kw : ji.value("invocation_keywords", json::array())) {
            intent.invocation_keywords.push_back(
                normalize_surface(kw.get<std::string>()));
        }
        for (const auto& js : ji.value("slots", json::array())) {
            SlotDef slot;
            slot.name = js.value("name", "");
            slot.negatable = js.value("negatable", false);
            slot.quantifiable = js.value("quantifiable", false);
            intent.slots.push_back(std::move(slot));
        }
        bundle.intents.push_back(std::move(intent));
    }
}

void parse_catalog_section(const json& j, SchemaBundle& bundle) {
    // .items() must run on a named object, not a temporary from .value().
    if (j.contains("catalogs")) {
        for (const auto& [slot, entries] : j.at("catalogs").items()) {
            auto& list = bundle.catalogs[slot];
            for (const auto& je : entries) {
                CatalogEntry entry;
                entry.surface = normalize_surface(je.value("surface", ""));
                entry.entity = je.value("entity", "");
                list.push_back(std::move(entry));
            }
        }
    }
    if (j.contains("generic_lexicons")) {
        for (const auto& [slot, phrases] : j.at("generic_lexicons").items()) {
            auto& list = bundle.generic_lexicons[slot];
            for (const auto& jp : phrases) {
                list.push_back(normalize_surface(jp.get<std::string>()));
            }
        }
    }
}

}  // namespace

std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
    std::ostringstream out;
    for (const auto& d : diags) {
        out << (d.severity == Severity::kError ? "error" : "warning") << " ["
            << d.subject << "]: " << d.message << '\n';
    }
    return out.str();
}

const SlotDef* IntentDef::find_slot(std::string_view slot) const {
    for (const auto& s : slots) {
        if (s.name == slot) return &s;
    }
    return nullptr;
}

const IntentDef* SchemaBundle::find_intent(std::string_view intent) const {
    for (const auto& i : intents) {
        if (i.name == intent) return &i;
    }
    return nullptr;
}

bool SchemaBundle::is_generic_slot(std::string_view slot) const {
    return generic_lexicons.find(std::string(slot)) != generic_lexicons.end();
}

bool SchemaBundle::is_nestable_slot(std::string_view slot) const {
    return is_generic_slot(slot);
}

bool SchemaBundle::is_numeric_slot(std::string_view slot) const {
    return numeric_slots_.find(std::string(slot)) != numeric_slots_.end();
}

bool SchemaBundle::is_known_slot(std::string_view slot) const {
    return known_slots_.find(std::string(slot)) != known_slots_.end();
}

void SchemaBundle::finalize() {
    surface_index_.clear();
    numeric_slots_.clear();
    known_slots_.clear();
    slot_order_.clear();

    for (const auto& [slot, entries] : catalogs) {
        auto& index = surface_index_[slot];
        for (const auto& entry : entries) {
            index.emplace(entry.surface, entry.entity);  // first mapping wins
            if (is_integer_literal(entry.entity)) numeric_slots_.insert(slot);
        }
        known_slots_.insert(slot);
    }
    for (const auto& [slot, phrases] : generic_lexicons) {
        (void)phrases;
        known_slots_.insert(slot);
    }

    std::set<std::string> seen;
    for (const auto& intent : intents) {
        for (const auto& slot : intent.slots) {
            known_slots_.insert(slot.name);
            if (seen.insert(slot.name).second) slot_order_.push_back(slot.name);
        }
    }
    for (const auto& [slot, phrases] : generic_lexicons) {
        (void)phrases;
        if (seen.insert(slot).second) slot_order_.push_back(slot);
    }
    for (const auto& [slot, entries] : catalogs) {
        (void)entries;
        if (seen.insert(slot).second) slot_order_.push_back(slot);
    }
}

std::vector<const IntentDef*> SchemaBundle::parent_intents(std::string_view slot) const {
    std::vector<const IntentDef*> parents;
    for (const auto& intent : intents) {
        if (intent.find_slot(slot) != nullptr) parents.push_back(&intent);
    }

    auto add_matching = [&](auto&& pred) {
        for (const auto& intent : intents) {
            bool any = std::any_of(intent.slots.begin(), intent.slots.end(), pred);
            if (any && std::find(parents.begin(), parents.end(), &intent) == parents.end()) {
                parents.push_back(&intent);
            }
        }
    };

    if (slot == kNotSlot) {
        add_matching([](const SlotDef& s) { return s.negatable; });
    } else if (slot == kQuantitySlot || slot == kComplexSlot) {
        add_matching([](const SlotDef& s) { return s.quantifiable; });
    } else if (parents.empty() && is_generic_slot(slot)) {
        // A custom wrapper we know nothing about: every intent qualifies.
        for (const auto& intent : intents) parents.push_back(&intent);
    }
    return parents;
}

std::vector<Diagnostic> validate_bundle(const SchemaBundle& bundle) {
    std::vector<Diagnostic> diags;
    auto error = [&](std::string subject, std::string message) {
        diags.push_back({Severity::kError, std::move(subject), std::move(message)});
    };
    auto warning = [&](std::string subject, std::string message) {
        diags.push_back({Severity::kWarning, std::move(subject), std::move(message)});
    };

    if (bundle.name.empty()) error("bundle", "missing bundle name");
    if (bundle.intents.empty()) error("bundle", "schema declares no intents");

    std::set<std::string> intent_names;
    std::set<std::string> declared_slots;
    for (const auto& intent : bundle.intents) {
        if (intent.name.empty()) {
            error("bundle", "intent with empty name");
            continue;
        }
        if (!intent_names.insert(intent.name).second) {
            error(intent.name, "duplicate intent name");
        }
        if (intent.slots.empty()) {
            warning(intent.name, "intent declares no slots");
        }
        std::set<std::string> slot_names;
        for (const auto& slot : intent.slots) {
            if (slot.name.empty()) {
                error(intent.name, "slot with empty name");
                continue;
            }
            if (!slot_names.insert(slot.name).second) {
                error(intent.name, "duplicate slot " + slot.name);
            }
            declared_slots.insert(slot.name);
        }
        for (const auto& kw : intent.invocation_keywords) {
            if (kw.empty()) error(intent.name, "empty invocation keyword");
        }
    }

    auto is_generic = [&](const std::string& slot) {
        return bundle.generic_lexicons.find(slot) != bundle.generic_lexicons.end();
    };
    // Wrappers attach through negatable/quantifiable flags, not declarations.
    auto is_wrapper = [](const std::string& slot) {
        return slot == kNotSlot || slot == kQuantitySlot || slot == kComplexSlot;
    };

    bool any_quantifiable = false;
    bool any_negatable = false;
    for (const auto& intent : bundle.intents) {
        for (const auto& slot : intent.slots) {
            any_quantifiable = any_quantifiable || slot.quantifiable;
            any_negatable = any_negatable || slot.negatable;
        }
    }

    for (const auto& [slot, entries] : bundle.catalogs) {
        if (declared_slots.find(slot) == declared_slots.end() && !is_generic(slot) &&
            !is_wrapper(slot)) {
            error(slot, "catalog for a slot no intent declares");
        }
        if ((slot == kQuantitySlot || slot == kComplexSlot) && !any_quantifiable) {
            warning(slot, "wrapper catalog but no quantifiable slot");
        }
        if (slot == kNotSlot && !any_negatable) {
            warning(slot, "wrapper catalog but no negatable slot");
        }
        std::map<std::string, std::string> first_entity;
        std::set<std::pair<std::string, std::string>> seen_pairs;
        for (const auto& entry : entries) {
            if (entry.surface.empty()) {
                error(slot, "catalog entry with empty surface");
                continue;
            }
            if (entry.surface != normalize_surface(entry.surface)) {
                error(slot, "surface not normalized: \"" + entry.surface + "\"");
            }
            if (!valid_entity_chars(entry.entity)) {
                error(slot, "entity \"" + entry.entity +
                                "\" outside [a-z0-9_] for surface \"" +
                                entry.surface + "\"");
                continue;
            }
            if (!seen_pairs.insert({entry.surface, entry.entity}).second) {
                warning(slot, "duplicate catalog entry \"" + entry.surface + "\"");
                continue;
            }
            auto [it, inserted] = first_entity.emplace(entry.surface, entry.entity);
            if (!inserted && it->second != entry.entity) {
                error(slot, "surface \"" + entry.surface +
                                "\" maps to entities " + it->second + " and " +
                                entry.entity);
            }
        }
    }

    for (const auto& [slot, phrases] : bundle.generic_lexicons) {
        if (phrases.empty()) warning(slot, "generic lexicon with no phrases");
        for (const auto& phrase : phrases) {
            if (phrase.empty()) error(slot, "empty lexicon phrase");
        }
    }

    for (const auto& slot : declared_slots) {
        bool has_catalog = bundle.catalogs.find(slot) != bundle.catalogs.end() &&
                           !bundle.catalogs.at(slot).empty();
        if (!has_catalog && !is_generic(slot)) {
            warning(slot, "slot has no catalog entries; no value can fill it");
        }
    }

    return diags;
}

SchemaBundle load_bundle(const std::string& path) {
    namespace fs = std::filesystem;
    SchemaBundle bundle;
    if (fs::is_directory(path)) {
        json schema = read_json_file((fs::path(path) / "schema.json").string());
        json catalogs = read_json_file((fs::path(path) / "catalogs.json").string());
        parse_schema_section(schema, bundle);
        parse_catalog_section(catalogs, bundle);
    } else {
        json j = read_json_file(path);
        parse_schema_section(j, bundle);
        parse_catalog_section(j, bundle);
    }

    auto diags = validate_bundle(bundle);
    if (has_errors(diags)) {
        throw BundleError("invalid bundle " + path, std::move(diags));
    }
    bundle.finalize();
    return bundle;
}

void save_bundle(const SchemaBundle& bundle, const std::string& path) {
    json j;
    j["name"] = bundle.name;
    j["intents"] = json::array();
    for (const auto& intent : bundle.intents) {
        json ji;
        ji["name"] = intent.name;
        if (!intent.invocation_keywords.empty()) {
            ji["invocation_keywords"] = intent.invocation_keywords;
        }
        ji["slots"] = json::array();
        for (const auto& slot : intent.slots) {
            json js;
            js["name"] = slot.name;
            if (slot.negatable) js["negatable"] = true;
            if (slot.quantifiable) js["quantifiable"] = true;
            ji["slots"].push_back(std::move(js));
        }
        j["intents"].push_back(std::move(ji));
    }
    j["catalogs"] = json::object();
    for (const auto& [slot, entries] : bundle.catalogs) {
        json list = json::array();
        for (const auto& entry : entries) {
            list.push_back({{"surface", entry.surface}, {"entity", entry.entity}});
        }
        j["catalogs"][slot] = std::move(list);
    }
    j["generic_lexicons"] = json::object();
    for (const auto& [slot, phrases] : bundle.generic_lexicons) {
        j["generic_lexicons"][slot] = phrases;
    }

    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

std::optional<std::string> lookup_entity(const SchemaBundle& bundle,
                                         std::string_view slot,
                                         std::string_view surface) {
    if (!bundle.is_known_slot(slot)) {
        throw Error("unknown slot " + std::string(slot) + " in bundle " + bundle.name);
    }
    std::string key = normalize_surface(surface);
    if (key.empty()) return std::nullopt;
    auto slot_it = bundle.surface_index_.find(std::string(slot));
    if (slot_it == bundle.surface_index_.end()) return std::nullopt;
    auto it = slot_it->second.find(key);
    if (it == slot_it->second.end()) return std::nullopt;
    return it->second;
}

BundleStats bundle_stats(const SchemaBundle& bundle) {
    BundleStats stats;
    stats.n_intents = bundle.intents.size();
    std::set<std::string> slots;
    for (const auto& intent : bundle.intents) {
        stats.n_keywords += intent.invocation_keywords.size();
        for (const auto& slot : intent.slots) slots.insert(slot.name);
    }
    stats.n_slots = slots.size();
    std::set<std::string> entities;
    for (const auto& [slot, entries] : bundle.catalogs) {
        (void)slot;
        for (const auto& entry : entries) {
            entities.insert(entry.entity);
            ++stats.n_surfaces;
        }
    }
    stats.n_entities = entities.size();
    return stats;
}

}  // namespace taskparse
