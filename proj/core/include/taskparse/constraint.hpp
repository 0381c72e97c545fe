#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taskparse/errors.hpp"
#include "taskparse/schema.hpp"

namespace taskparse {

using TokenId = std::uint32_t;

inline constexpr const char* kBosToken = "<s>";
inline constexpr const char* kEosToken = "</s>";

// Splits a catalog surface into the tokens a decoder emits for it.  The
// default lowercases and splits on non-alphanumerics, one word per token.
using SurfaceTokenizer = std::function<std::vector<std::string>(std::string_view)>;
SurfaceTokenizer word_tokenizer();

// Decoder-side vocabulary: specials first, then every label, surface word,
// and entity, deduplicated and sorted.  Ids are dense and stable for a
// given bundle and tokenizer.
class Vocabulary {
public:
    TokenId bos() const { return 0; }
    TokenId eos() const { return 1; }
    TokenId open() const { return 2; }
    TokenId close() const { return 3; }

    std::size_t size() const { return tokens_.size(); }
    const std::string& text(TokenId id) const { return tokens_.at(id); }
    std::optional<TokenId> id(std::string_view token) const;
    const std::vector<std::string>& tokens() const { return tokens_; }

private:
    std::vector<std::string> tokens_;
    std::map<std::string, TokenId, std::less<>> ids_;

    friend class ConstraintEngine;
};

// Optional tightenings beyond the always-on rules.  Both default off; the
// base table already guarantees balanced, catalog-pure output.
struct StrictnessConfig {
    bool enforce_intent_slot_compatibility = false;
    bool enforce_negatable_under_not = false;
};

// Progress through one constrained decode.  Opaque to callers: fresh states
// come from ConstraintEngine::initial_state() and change only through
// step(), so a state always describes a legal prefix.
class DecoderState {
public:
    bool finished() const { return finished_; }

private:
    struct Frame {
        TokenId label = 0;
        bool is_intent = false;
        std::uint32_t children = 0;
        std::int32_t trie_node = -1;  // >= 0 once a value leaf has started
    };

    std::vector<Frame> stack_;
    std::uint32_t closed_intents_ = 0;
    bool expecting_label_ = false;
    bool finished_ = false;

    friend class ConstraintEngine;
};

struct ReplayResult {
    bool accepted = false;
    std::size_t position = 0;      // index of the rejected token
    std::string token;             // its text
    std::vector<std::string> expected;  // sample of legal alternatives
};

// The transition table for schema-constrained decoding: which token may
// follow which prefix, derived entirely from one bundle.
class ConstraintEngine {
public:
    ConstraintEngine(const SchemaBundle& bundle,
                     StrictnessConfig strictness = {},
                     SurfaceTokenizer tokenizer = word_tokenizer());

    const Vocabulary& vocabulary() const { return vocab_; }
    const std::vector<Diagnostic>& build_diagnostics() const { return diagnostics_; }
    const SchemaBundle& bundle() const { return *bundle_; }

    DecoderState initial_state() const { return DecoderState{}; }

    // Every token that may legally extend the state, ascending by id.
    // Empty only for a finished state or below a slot with no values.
    std::vector<TokenId> allowed_next(const DecoderState& state) const;

    // Applies one token.  Returns false (state untouched) when illegal.
    bool step(DecoderState& state, TokenId token) const;

    // True when EOS may be emitted: all nodes closed, at least one intent.
    bool is_accepting(const DecoderState& state) const;

    // Feeds a whole sequence through step(), reporting the first rejection.
    // A leading BOS and trailing EOS are both optional.
    ReplayResult replay(std::span<const std::string> tokens) const;
    ReplayResult replay_text(std::string_view linearized) const;

private:
    struct TrieNode {
        std::map<TokenId, std::int32_t> next;
        bool terminal = false;
    };
    struct SlotInfo {
        std::int32_t trie_root = -1;
        bool nestable = false;
    };

    const SchemaBundle* bundle_;
    StrictnessConfig strictness_;
    Vocabulary vocab_;
    std::vector<TrieNode> trie_;
    std::map<TokenId, SlotInfo> slots_;
    std::vector<TokenId> intent_ids_;          // ascending
    std::vector<TokenId> slot_ids_;            // ascending
    std::map<TokenId, std::vector<TokenId>> intent_slot_ids_;  // strict mode
    std::vector<TokenId> negatable_ids_;       // strict mode
    TokenId not_id_ = 0;
    TokenId quantity_id_ = 0;
    TokenId complex_id_ = 0;
    bool has_not_ = false;
    bool has_quantity_ = false;
    bool has_complex_ = false;
    std::vector<Diagnostic> diagnostics_;

    std::int32_t trie_insert(std::int32_t node, std::span<const TokenId> tokens);
    void label_followers(const DecoderState& state, std::vector<TokenId>& out) const;
    bool label_allowed(const DecoderState& state, TokenId token) const;
};

}  // namespace taskparse
