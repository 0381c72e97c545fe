#include "taskparse/linker.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "taskparse/text.hpp"

namespace taskparse {

void LinkerConfig::validate() const {
    if (!(threshold > 0.0) || threshold > 1.0) {
        throw Error("linker threshold must be in (0, 1]");
    }
}

namespace {

struct WindowMatch {
    double score = -1.0;
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Best window of utterance words against one phrase, comparing windows of
// the phrase's word count and one word either side.
std::optional<WindowMatch> best_window(const std::string& phrase,
                                       const std::vector<WordSpan>& words,
                                       double threshold) {
    std::vector<WordSpan> phrase_words = word_spans(phrase);
    if (phrase_words.empty() || words.empty()) return std::nullopt;

    std::string phrase_key;
    for (const auto& w : phrase_words) {
        if (!phrase_key.empty()) phrase_key += ' ';
        phrase_key += w.key;
    }

    std::size_t n = phrase_words.size();
    std::vector<std::size_t> lengths;
    lengths.push_back(n);
    if (n > 1) lengths.push_back(n - 1);
    lengths.push_back(n + 1);

    WindowMatch best;
    for (std::size_t len : lengths) {
        if (len == 0 || len > words.size()) continue;
        for (std::size_t start = 0; start + len <= words.size(); ++start) {
            std::string window_key;
            for (std::size_t i = start; i < start + len; ++i) {
                if (!window_key.empty()) window_key += ' ';
                window_key += words[i].key;
            }
            double score = edit_similarity(phrase_key, window_key);
            if (score > best.score) {
                best = {score, words[start].begin, words[start + len - 1].end};
            }
        }
    }
    if (best.score < threshold) return std::nullopt;
    return best;
}

std::string lexicon_pseudo_entity(const std::string& phrase) {
    std::string entity;
    for (char c : match_key(phrase)) {
        entity.push_back(c == ' ' ? '_' : c);
    }
    return entity;
}

struct KeywordHit {
    std::string keyword;
    double score = -1.0;
    std::size_t begin = 0;
};

}  // namespace

LinkedSchema fuzzy_match(std::string_view utterance,
                         const SchemaBundle& bundle,
                         const LinkerConfig& config) {
    config.validate();
    if (config.oracle) {
        throw Error("oracle linking needs a gold parse; call oracle_link");
    }

    std::vector<WordSpan> words = word_spans(utterance);
    LinkedSchema linked;
    if (words.empty()) return linked;

    // One best match per (slot, entity), higher score wins, earlier span
    // breaks ties.
    std::map<std::pair<std::string, std::string>, LinkedValue> kept;
    auto offer = [&](const std::string& slot, LinkedValue value) {
        auto key = std::make_pair(slot, value.entity);
        auto it = kept.find(key);
        if (it == kept.end()) {
            kept.emplace(std::move(key), std::move(value));
            return;
        }
        if (value.score > it->second.score ||
            (value.score == it->second.score && value.begin < it->second.begin)) {
            it->second = std::move(value);
        }
    };

    for (const auto& slot : bundle.slot_order()) {
        auto cat = bundle.catalogs.find(slot);
        if (cat != bundle.catalogs.end()) {
            for (const auto& entry : cat->second) {
                auto match = best_window(entry.surface, words, config.threshold);
                if (!match) continue;
                offer(slot, LinkedValue{entry.surface, entry.entity, match->score,
                                        match->begin, match->end, false});
            }
        }
        auto lex = bundle.generic_lexicons.find(slot);
        if (lex != bundle.generic_lexicons.end()) {
            for (const auto& phrase : lex->second) {
                auto match = best_window(phrase, words, config.threshold);
                if (!match) continue;
                offer(slot, LinkedValue{phrase, lexicon_pseudo_entity(phrase),
                                        match->score, match->begin, match->end,
                                        true});
            }
        }
    }

    if (config.suppress_unit_number) {
        for (auto it = kept.begin(); it != kept.end();) {
            if (it->first.first == kNumberSlot && it->second.entity == "1") {
                it = kept.erase(it);
            } else {
                ++it;
            }
        }
    }

    std::map<const IntentDef*, KeywordHit> keyword_hits;
    for (const auto& intent : bundle.intents) {
        for (const auto& keyword : intent.invocation_keywords) {
            auto match = best_window(keyword, words, config.threshold);
            if (!match) continue;
            auto it = keyword_hits.find(&intent);
            bool better = it == keyword_hits.end() ||
                          match->score > it->second.score ||
                          (match->score == it->second.score &&
                           match->begin < it->second.begin);
            if (better) {
                keyword_hits[&intent] = {keyword, match->score, match->begin};
            }
        }
    }

    // Group surviving values under every intent able to parent their slot.
    std::map<const IntentDef*, std::map<std::string, std::vector<LinkedValue>>>
        grouped;
    for (const auto& [key, value] : kept) {
        const std::string& slot = key.first;
        for (const IntentDef* intent : bundle.parent_intents(slot)) {
            grouped[intent][slot].push_back(value);
        }
    }

    for (std::size_t index = 0; index < bundle.intents.size(); ++index) {
        const IntentDef* intent = &bundle.intents[index];
        auto g = grouped.find(intent);
        auto kw = keyword_hits.find(intent);
        bool has_slots = g != grouped.end() && !g->second.empty();
        if (!has_slots && kw == keyword_hits.end()) continue;

        LinkedIntent out;
        out.intent = intent->name;
        std::size_t anchor = std::string::npos;
        if (kw != keyword_hits.end()) {
            out.matched_keyword = kw->second.keyword;
            anchor = kw->second.begin;
        }

        if (has_slots) {
            struct SlotOrder {
                std::size_t first_begin;
                std::size_t declared_index;
                std::string name;
            };
            std::vector<std::pair<SlotOrder, LinkedSlot>> slots;
            for (auto& [slot_name, values] : g->second) {
                LinkedSlot ls;
                ls.slot = slot_name;
                ls.values = values;
                std::sort(ls.values.begin(), ls.values.end(),
                          [](const LinkedValue& a, const LinkedValue& b) {
                              if (a.begin != b.begin) return a.begin < b.begin;
                              if (a.score != b.score) return a.score > b.score;
                              return a.surface < b.surface;
                          });
                std::size_t declared = intent->slots.size();
                for (std::size_t i = 0; i < intent->slots.size(); ++i) {
                    if (intent->slots[i].name == slot_name) {
                        declared = i;
                        break;
                    }
                }
                std::size_t first = ls.values.front().begin;
                if (anchor == std::string::npos || first < anchor) {
                    if (kw == keyword_hits.end()) anchor = std::min(anchor, first);
                }
                slots.emplace_back(SlotOrder{first, declared, slot_name},
                                   std::move(ls));
            }
            std::sort(slots.begin(), slots.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first.first_begin != b.first.first_begin) {
                              return a.first.first_begin < b.first.first_begin;
                          }
                          if (a.first.declared_index != b.first.declared_index) {
                              return a.first.declared_index < b.first.declared_index;
                          }
                          return a.first.name < b.first.name;
                      });
            for (auto& [order, ls] : slots) {
                (void)order;
                out.slots.push_back(std::move(ls));
            }
        }

        out.anchor = anchor == std::string::npos ? 0 : anchor;
        linked.intents.push_back(std::move(out));
    }

    std::stable_sort(linked.intents.begin(), linked.intents.end(),
                     [](const LinkedIntent& a, const LinkedIntent& b) {
                         return a.anchor < b.anchor;
                     });
    return linked;
}

std::string serialize_input(std::string_view utterance, const LinkedSchema& linked) {
    std::string out(utterance);
    for (const auto& intent : linked.intents) {
        out += " [I] ";
        out += intent.intent;
        if (intent.matched_keyword) {
            out += " : ";
            out += *intent.matched_keyword;
        }
        for (const auto& slot : intent.slots) {
            out += " [S] ";
            out += slot.slot;
            for (const auto& value : slot.values) {
                out += " [V] ";
                out += value.surface;
            }
        }
    }
    return out;
}

namespace {

void collect_leaf_values(const ParseNode& node,
                         std::vector<std::pair<std::string, std::string>>& out) {
    if (node.kind == NodeKind::kSlot && node.children.size() == 1 &&
        node.children[0].is_leaf()) {
        out.emplace_back(node.label, node.children[0].label);
        return;
    }
    for (const auto& child : node.children) collect_leaf_values(child, out);
}

std::optional<std::string> first_surface(const SchemaBundle& bundle,
                                         const std::string& slot,
                                         const std::string& entity) {
    auto it = bundle.catalogs.find(slot);
    if (it == bundle.catalogs.end()) return std::nullopt;
    for (const auto& entry : it->second) {
        if (entry.entity == entity) return entry.surface;
    }
    return std::nullopt;
}

}  // namespace

LinkedSchema oracle_link(std::string_view utterance,
                         const ParseForest& gold,
                         const SchemaBundle& bundle) {
    if (gold.empty()) throw Error("oracle link requires a non-empty gold parse");
    ParseForest resolved = resolve_entities(gold, bundle);

    std::string utterance_key = match_key(utterance);
    std::size_t fallback = utterance_key.size();

    LinkedSchema linked;
    for (const auto& intent_node : resolved.intents) {
        const IntentDef* intent = bundle.find_intent(intent_node.label);
        if (intent == nullptr) {
            throw Error("unknown intent " + intent_node.label + " in gold parse");
        }

        std::vector<std::pair<std::string, std::string>> pairs;
        collect_leaf_values(intent_node, pairs);

        LinkedIntent out;
        out.intent = intent_node.label;
        out.anchor = linked.intents.size();  // keep gold order
        if (pairs.empty() && !intent->invocation_keywords.empty()) {
            out.matched_keyword = intent->invocation_keywords.front();
        }

        std::map<std::string, LinkedSlot> by_slot;
        std::vector<std::string> slot_order;
        for (const auto& [slot, entity] : pairs) {
            std::string surface;
            if (is_integer_literal(entity) && bundle.is_numeric_slot(slot)) {
                surface = entity;
            } else {
                auto s = first_surface(bundle, slot, entity);
                if (!s) {
                    throw Error("entity " + entity + " has no surface in slot " + slot);
                }
                surface = *s;
            }

            // Honest span when the surface occurs verbatim; otherwise an
            // inflated offset that preserves gold order.
            std::size_t begin = utterance_key.find(match_key(surface));
            LinkedValue value;
            value.surface = surface;
            value.entity = entity;
            value.score = 1.0;
            value.begin = begin == std::string::npos ? fallback++ : begin;
            value.end = value.begin + surface.size();

            auto [it, inserted] = by_slot.try_emplace(slot);
            if (inserted) {
                it->second.slot = slot;
                slot_order.push_back(slot);
            }
            it->second.values.push_back(std::move(value));
        }
        for (const auto& slot : slot_order) {
            out.slots.push_back(std::move(by_slot[slot]));
        }
        linked.intents.push_back(std::move(out));
    }
    return linked;
}

std::vector<std::pair<std::string, std::string>> coverage_report(
    const LinkedSchema& linked, const ParseForest& gold_resolved) {
    std::set<std::pair<std::string, std::string>> have;
    for (const auto& intent : linked.intents) {
        for (const auto& slot : intent.slots) {
            for (const auto& value : slot.values) {
                have.emplace(slot.slot, value.entity);
            }
        }
    }

    std::vector<std::pair<std::string, std::string>> gold_pairs;
    for (const auto& intent : gold_resolved.intents) {
        collect_leaf_values(intent, gold_pairs);
    }

    std::vector<std::pair<std::string, std::string>> missing;
    std::set<std::pair<std::string, std::string>> reported;
    for (const auto& pair : gold_pairs) {
        if (pair.first == kNumberSlot && pair.second == "1") continue;
        if (have.count(pair) != 0) continue;
        if (reported.insert(pair).second) missing.push_back(pair);
    }
    return missing;
}

ParseForest baseline_parse(std::string_view utterance,
                           const LinkedSchema& linked,
                           const SchemaBundle& bundle) {
    (void)utterance;
    (void)bundle;
    if (linked.empty()) {
        throw Error("baseline parse: nothing linked to the utterance");
    }

    struct Placed {
        std::string slot;
        LinkedValue value;
    };

    // Distinct catalog values across intents; wrapper phrases carry no value.
    std::vector<Placed> values;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& intent : linked.intents) {
        for (const auto& slot : intent.slots) {
            for (const auto& value : slot.values) {
                if (value.from_lexicon) continue;
                if (seen.emplace(slot.slot, value.entity).second) {
                    values.push_back({slot.slot, value});
                }
            }
        }
    }

    // Within a slot, a value whose span sits inside another value's span is
    // an artifact of overlapping surfaces ("coke" inside "cherry coke").
    std::vector<bool> dropped(values.size(), false);
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (i == j || dropped[j] || values[i].slot != values[j].slot) continue;
            const auto& a = values[i].value;
            const auto& b = values[j].value;
            bool inside = b.begin <= a.begin && a.end <= b.end;
            bool same_span = b.begin == a.begin && a.end == b.end;
            if (inside && !same_span) {
                dropped[i] = true;
                break;
            }
            if (same_span && (a.score < b.score || (a.score == b.score && j < i))) {
                dropped[i] = true;
                break;
            }
        }
    }

    // Only slots an intent declares outright may sit flat under it; wrapper
    // slots (NOT, QUANTITY, COMPLEX) would need nesting this heuristic does
    // not attempt.
    auto declares = [&](const LinkedIntent& intent, const std::string& slot) {
        const IntentDef* def = bundle.find_intent(intent.intent);
        return def != nullptr && def->find_slot(slot) != nullptr;
    };

    // Roots: keyword-matched intents plus intents that are the only declared
    // home of some linked value.
    std::vector<const LinkedIntent*> seeds;
    auto add_seed = [&](const LinkedIntent* intent) {
        if (std::find(seeds.begin(), seeds.end(), intent) == seeds.end()) {
            seeds.push_back(intent);
        }
    };
    for (const auto& intent : linked.intents) {
        if (intent.matched_keyword) add_seed(&intent);
    }
    std::set<std::string> slots_seen;
    for (const auto& placed : values) {
        if (!slots_seen.insert(placed.slot).second) continue;
        const LinkedIntent* only = nullptr;
        std::size_t count = 0;
        for (const auto& candidate : linked.intents) {
            if (declares(candidate, placed.slot)) {
                ++count;
                only = &candidate;
            }
        }
        if (count == 1) add_seed(only);
    }
    if (seeds.empty()) seeds.push_back(&linked.intents.front());
    std::sort(seeds.begin(), seeds.end());  // vector order == utterance order

    // Each value goes to the nearest root that declares its slot.
    std::map<const LinkedIntent*, std::vector<Placed>> assigned;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (dropped[i]) continue;
        const LinkedIntent* chosen = nullptr;
        std::size_t best_distance = 0;
        for (const LinkedIntent* seed : seeds) {
            if (!declares(*seed, values[i].slot)) continue;
            std::size_t a = values[i].value.begin;
            std::size_t b = seed->anchor;
            std::size_t distance = a > b ? a - b : b - a;
            if (chosen == nullptr || distance < best_distance) {
                chosen = seed;
                best_distance = distance;
            }
        }
        if (chosen != nullptr) assigned[chosen].push_back(values[i]);
    }

    ParseForest forest;
    for (const LinkedIntent* seed : seeds) {
        ParseNode intent;
        intent.kind = NodeKind::kIntent;
        intent.label = seed->intent;

        auto& placed = assigned[seed];
        std::sort(placed.begin(), placed.end(),
                  [](const Placed& a, const Placed& b) {
                      if (a.value.begin != b.value.begin) {
                          return a.value.begin < b.value.begin;
                      }
                      return a.slot < b.slot;
                  });
        bool has_number = false;
        for (const auto& p : placed) {
            if (p.slot == kNumberSlot) has_number = true;
            ParseNode slot;
            slot.kind = NodeKind::kSlot;
            slot.label = p.slot;
            ParseNode leaf;
            leaf.kind = NodeKind::kValue;
            leaf.label = p.value.surface;
            slot.children.push_back(std::move(leaf));
            intent.children.push_back(std::move(slot));
        }
        if (!has_number) {
            ParseNode slot;
            slot.kind = NodeKind::kSlot;
            slot.label = kNumberSlot;
            ParseNode leaf;
            leaf.kind = NodeKind::kValue;
            leaf.label = "1";
            slot.children.push_back(std::move(leaf));
            intent.children.insert(intent.children.begin(), std::move(slot));
        }
        forest.intents.push_back(std::move(intent));
    }
    return forest;
}

}  // namespace taskparse
