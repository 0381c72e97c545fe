#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "taskparse/errors.hpp"

namespace taskparse {

// Names of the bundle-wide wrapper slots.  Any slot listed in a bundle's
// generic_lexicons section may wrap nested slots; these three get special
// treatment (negation scoping, quantity requirements, unit suppression).
inline constexpr const char* kNotSlot = "NOT";
inline constexpr const char* kQuantitySlot = "QUANTITY";
inline constexpr const char* kComplexSlot = "COMPLEX";
inline constexpr const char* kNumberSlot = "NUMBER";
inline constexpr const char* kOrderRoot = "ORDER";

struct SlotDef {
    std::string name;
    bool negatable = false;     // may appear under NOT
    bool quantifiable = false;  // may appear under QUANTITY / COMPLEX
};

struct IntentDef {
    std::string name;
    std::vector<std::string> invocation_keywords;
    std::vector<SlotDef> slots;

    const SlotDef* find_slot(std::string_view slot) const;
};

// One way of saying one thing.  Many surfaces may share an entity; a surface
// never maps to two entities within the same slot.
struct CatalogEntry {
    std::string surface;
    std::string entity;
};

// A restaurant's menu: its intents, their slots, the catalog of sayable
// values per slot, and fixed lexicons for the wrapper slots.
struct SchemaBundle {
    std::string name;
    std::vector<IntentDef> intents;
    // slot name -> entries, in authored order.
    std::map<std::string, std::vector<CatalogEntry>> catalogs;
    // wrapper slot name -> trigger phrases ("without", "extra", ...).
    std::map<std::string, std::vector<std::string>> generic_lexicons;

    // Derived lookup structures.  load_bundle calls finalize(); call it
    // yourself after building a bundle by hand.
    void finalize();

    const IntentDef* find_intent(std::string_view intent) const;
    bool is_generic_slot(std::string_view slot) const;
    // True for slots that may contain nested slots instead of a value.
    bool is_nestable_slot(std::string_view slot) const;
    // True when the slot's catalog contains at least one integer entity,
    // which lets parses carry literal numbers under it.
    bool is_numeric_slot(std::string_view slot) const;
    // Known slot = declared by some intent, generic, or carrying a catalog.
    bool is_known_slot(std::string_view slot) const;
    // Every known slot name, intent declaration order first, then the
    // remaining generic / catalog-only slots in sorted order.
    const std::vector<std::string>& slot_order() const { return slot_order_; }
    // Intents declaring `slot`, plus wrapper applicability: NOT belongs to
    // intents with a negatable slot, QUANTITY and COMPLEX to intents with a
    // quantifiable one.
    std::vector<const IntentDef*> parent_intents(std::string_view slot) const;

private:
    std::map<std::string, std::map<std::string, std::string>> surface_index_;
    std::set<std::string> numeric_slots_;
    std::set<std::string> known_slots_;
    std::vector<std::string> slot_order_;

    friend std::optional<std::string> lookup_entity(const SchemaBundle&,
                                                    std::string_view,
                                                    std::string_view);
};

// Pure check; returns the same diagnostics no matter how often it runs.
std::vector<Diagnostic> validate_bundle(const SchemaBundle& bundle);

// Reads a bundle from a single JSON file, or from a directory holding
// schema.json and catalogs.json.  Normalizes surfaces, validates, and
// finalizes; throws BundleError when validation finds errors.
SchemaBundle load_bundle(const std::string& path);

// Writes the bundle as a single JSON file that load_bundle reads back into
// a structurally equal value.
void save_bundle(const SchemaBundle& bundle, const std::string& path);

// Resolves a surface form to its entity within one slot.  Unknown slot names
// throw; an unknown or empty surface yields nullopt.
std::optional<std::string> lookup_entity(const SchemaBundle& bundle,
                                         std::string_view slot,
                                         std::string_view surface);

struct BundleStats {
    std::size_t n_intents = 0;
    std::size_t n_slots = 0;      // distinct slot names declared by intents
    std::size_t n_entities = 0;   // distinct entities across all catalogs
    std::size_t n_surfaces = 0;
    std::size_t n_keywords = 0;
};

BundleStats bundle_stats(const SchemaBundle& bundle);

}  // namespace taskparse
