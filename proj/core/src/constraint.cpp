#include "taskparse/constraint.hpp"

#include <algorithm>

#include "taskparse/parse_tree.hpp"
#include "taskparse/text.hpp"

namespace taskparse {

SurfaceTokenizer word_tokenizer() {
    return [](std::string_view surface) {
        std::vector<std::string> tokens;
        for (auto& word : word_spans(surface)) {
            tokens.push_back(std::move(word.key));
        }
        return tokens;
    };
}

std::optional<TokenId> Vocabulary::id(std::string_view token) const {
    auto it = ids_.find(token);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

namespace {

bool contains(const std::vector<TokenId>& sorted, TokenId token) {
    return std::binary_search(sorted.begin(), sorted.end(), token);
}

}  // namespace

ConstraintEngine::ConstraintEngine(const SchemaBundle& bundle,
                                   StrictnessConfig strictness,
                                   SurfaceTokenizer tokenizer)
    : bundle_(&bundle), strictness_(strictness) {
    std::set<std::string> names;
    for (const auto& intent : bundle.intents) names.insert(intent.name);
    for (const auto& slot : bundle.slot_order()) names.insert(slot);
    std::map<std::string, std::vector<std::vector<std::string>>> surface_tokens;
    for (const auto& [slot, entries] : bundle.catalogs) {
        auto& sequences = surface_tokens[slot];
        for (const auto& entry : entries) {
            names.insert(entry.entity);
            auto words = tokenizer(entry.surface);
            for (const auto& w : words) names.insert(w);
            sequences.push_back(std::move(words));
            sequences.push_back({entry.entity});
        }
    }

    vocab_.tokens_ = {kBosToken, kEosToken, "(", ")"};
    for (const auto& name : names) vocab_.tokens_.push_back(name);
    for (TokenId id = 0; id < vocab_.tokens_.size(); ++id) {
        vocab_.ids_[vocab_.tokens_[id]] = id;
    }
    auto must_id = [&](const std::string& token) { return *vocab_.id(token); };

    for (const auto& intent : bundle.intents) {
        intent_ids_.push_back(must_id(intent.name));
    }
    std::sort(intent_ids_.begin(), intent_ids_.end());
    intent_ids_.erase(std::unique(intent_ids_.begin(), intent_ids_.end()),
                      intent_ids_.end());

    for (const auto& slot : bundle.slot_order()) {
        TokenId id = must_id(slot);
        slot_ids_.push_back(id);
        SlotInfo info;
        info.nestable = bundle.is_nestable_slot(slot);
        auto st = surface_tokens.find(slot);
        if (st != surface_tokens.end() && !st->second.empty()) {
            info.trie_root = static_cast<std::int32_t>(trie_.size());
            trie_.emplace_back();
            for (const auto& sequence : st->second) {
                std::int32_t node = info.trie_root;
                for (const auto& word : sequence) {
                    TokenId tok = must_id(word);
                    auto next = trie_[node].next.find(tok);
                    if (next == trie_[node].next.end()) {
                        std::int32_t fresh = static_cast<std::int32_t>(trie_.size());
                        trie_[node].next.emplace(tok, fresh);
                        trie_.emplace_back();
                        node = fresh;
                    } else {
                        node = next->second;
                    }
                }
                trie_[node].terminal = true;
            }
        }
        slots_[id] = info;
        if (info.trie_root < 0 && !info.nestable) {
            diagnostics_.push_back(
                {Severity::kWarning, slot,
                 "slot has no catalog entries; decoding can never fill it"});
        }
    }
    std::sort(slot_ids_.begin(), slot_ids_.end());
    slot_ids_.erase(std::unique(slot_ids_.begin(), slot_ids_.end()),
                    slot_ids_.end());

    if (auto id = vocab_.id(kNotSlot); id && bundle.is_known_slot(kNotSlot)) {
        not_id_ = *id;
        has_not_ = true;
    }
    if (auto id = vocab_.id(kQuantitySlot); id && bundle.is_known_slot(kQuantitySlot)) {
        quantity_id_ = *id;
        has_quantity_ = true;
    }
    if (auto id = vocab_.id(kComplexSlot); id && bundle.is_known_slot(kComplexSlot)) {
        complex_id_ = *id;
        has_complex_ = true;
    }

    for (const auto& intent : bundle.intents) {
        std::vector<TokenId> allowed;
        for (const auto& slot : intent.slots) allowed.push_back(must_id(slot.name));
        for (const auto& [slot, phrases] : bundle.generic_lexicons) {
            (void)phrases;
            allowed.push_back(must_id(slot));
        }
        std::sort(allowed.begin(), allowed.end());
        allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
        intent_slot_ids_[must_id(intent.name)] = std::move(allowed);
    }

    std::set<TokenId> negatable;
    for (const auto& intent : bundle.intents) {
        for (const auto& slot : intent.slots) {
            if (slot.negatable) negatable.insert(must_id(slot.name));
        }
    }
    negatable_ids_.assign(negatable.begin(), negatable.end());
}

bool ConstraintEngine::label_allowed(const DecoderState& state, TokenId token) const {
    if (state.stack_.empty()) return contains(intent_ids_, token);
    const auto& parent = state.stack_.back();
    if (parent.is_intent) {
        if (strictness_.enforce_intent_slot_compatibility) {
            auto it = intent_slot_ids_.find(parent.label);
            return it != intent_slot_ids_.end() && contains(it->second, token);
        }
        return contains(slot_ids_, token);
    }
    if (has_complex_ && parent.label == complex_id_ && parent.children == 0) {
        return has_quantity_ && token == quantity_id_;
    }
    if (strictness_.enforce_negatable_under_not && has_not_ &&
        parent.label == not_id_) {
        return contains(negatable_ids_, token);
    }
    return contains(slot_ids_, token);
}

void ConstraintEngine::label_followers(const DecoderState& state,
                                       std::vector<TokenId>& out) const {
    if (state.stack_.empty()) {
        out = intent_ids_;
        return;
    }
    const auto& parent = state.stack_.back();
    if (parent.is_intent) {
        if (strictness_.enforce_intent_slot_compatibility) {
            auto it = intent_slot_ids_.find(parent.label);
            if (it != intent_slot_ids_.end()) out = it->second;
            return;
        }
        out = slot_ids_;
        return;
    }
    if (has_complex_ && parent.label == complex_id_ && parent.children == 0) {
        if (has_quantity_) out.push_back(quantity_id_);
        return;
    }
    if (strictness_.enforce_negatable_under_not && has_not_ &&
        parent.label == not_id_) {
        out = negatable_ids_;
        return;
    }
    out = slot_ids_;
}

std::vector<TokenId> ConstraintEngine::allowed_next(const DecoderState& state) const {
    std::vector<TokenId> out;
    if (state.finished_) return out;
    if (state.expecting_label_) {
        label_followers(state, out);
        return out;
    }
    if (state.stack_.empty()) {
        if (state.closed_intents_ > 0) out.push_back(vocab_.eos());
        out.push_back(vocab_.open());
        return out;
    }
    const auto& top = state.stack_.back();
    if (top.is_intent) {
        out.push_back(vocab_.open());
        if (top.children > 0) out.push_back(vocab_.close());
        std::sort(out.begin(), out.end());
        return out;
    }
    if (top.children > 0) {
        // A wrapper that already holds nested slots (hence nestable).
        out.push_back(vocab_.open());
        out.push_back(vocab_.close());
        std::sort(out.begin(), out.end());
        return out;
    }
    auto info = slots_.find(top.label);
    if (top.trie_node >= 0) {
        if (trie_[top.trie_node].terminal) out.push_back(vocab_.close());
        for (const auto& [tok, node] : trie_[top.trie_node].next) {
            (void)node;
            out.push_back(tok);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    if (info != slots_.end()) {
        if (info->second.nestable) out.push_back(vocab_.open());
        if (info->second.trie_root >= 0) {
            for (const auto& [tok, node] : trie_[info->second.trie_root].next) {
                (void)node;
                out.push_back(tok);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool ConstraintEngine::step(DecoderState& state, TokenId token) const {
    if (state.finished_) return false;
    if (token >= vocab_.size() || token == vocab_.bos()) return false;

    if (state.expecting_label_) {
        if (!label_allowed(state, token)) return false;
        DecoderState::Frame frame;
        frame.label = token;
        frame.is_intent = state.stack_.empty();
        state.stack_.push_back(frame);
        state.expecting_label_ = false;
        return true;
    }

    if (token == vocab_.open()) {
        if (state.stack_.empty()) {
            state.expecting_label_ = true;
            return true;
        }
        const auto& top = state.stack_.back();
        if (top.is_intent) {
            state.expecting_label_ = true;
            return true;
        }
        if (top.trie_node >= 0) return false;  // a value leaf has started
        auto info = slots_.find(top.label);
        if (info == slots_.end() || !info->second.nestable) return false;
        state.expecting_label_ = true;
        return true;
    }

    if (token == vocab_.close()) {
        if (state.stack_.empty()) return false;
        const auto& top = state.stack_.back();
        bool closable = false;
        if (top.is_intent || top.children > 0) {
            closable = top.children > 0;
        } else {
            closable = top.trie_node >= 0 && trie_[top.trie_node].terminal;
        }
        if (!closable) return false;
        bool was_intent = top.is_intent;
        state.stack_.pop_back();
        if (state.stack_.empty()) {
            if (was_intent) ++state.closed_intents_;
        } else {
            ++state.stack_.back().children;
        }
        return true;
    }

    if (token == vocab_.eos()) {
        if (!is_accepting(state)) return false;
        state.finished_ = true;
        return true;
    }

    if (state.stack_.empty()) return false;
    auto& top = state.stack_.back();
    if (top.is_intent || top.children > 0) return false;
    auto info = slots_.find(top.label);
    if (info == slots_.end() || info->second.trie_root < 0) return false;
    std::int32_t node = top.trie_node < 0 ? info->second.trie_root : top.trie_node;
    auto next = trie_[node].next.find(token);
    if (next == trie_[node].next.end()) return false;
    top.trie_node = next->second;
    return true;
}

bool ConstraintEngine::is_accepting(const DecoderState& state) const {
    return !state.finished_ && !state.expecting_label_ && state.stack_.empty() &&
           state.closed_intents_ > 0;
}

ReplayResult ConstraintEngine::replay(std::span<const std::string> tokens) const {
    DecoderState state = initial_state();
    std::size_t start = 0;
    if (!tokens.empty() && tokens[0] == kBosToken) start = 1;

    auto expected_sample = [&](const DecoderState& s) {
        std::vector<std::string> sample;
        for (TokenId t : allowed_next(s)) {
            sample.push_back(vocab_.text(t));
            if (sample.size() == 8) break;
        }
        return sample;
    };

    for (std::size_t i = start; i < tokens.size(); ++i) {
        auto id = vocab_.id(tokens[i]);
        if (!id || !step(state, *id)) {
            ReplayResult result;
            result.accepted = false;
            result.position = i;
            result.token = tokens[i];
            result.expected = expected_sample(state);
            return result;
        }
    }

    ReplayResult result;
    result.accepted = state.finished() || is_accepting(state);
    if (!result.accepted) {
        result.position = tokens.size();
        result.token = "<end of sequence>";
        result.expected = expected_sample(state);
    }
    return result;
}

ReplayResult ConstraintEngine::replay_text(std::string_view linearized) const {
    std::vector<std::string> tokens = tokenize_linear(linearized);
    return replay(std::span<const std::string>(tokens));
}

}  // namespace taskparse
