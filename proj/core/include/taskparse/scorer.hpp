#pragma once

#include <cstdio>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "taskparse/constraint.hpp"

namespace taskparse {

// Assigns a score to every vocabulary token given the tokens decoded so
// far.  The search adds the chosen token's score to the running total, so
// log-probabilities and raw scores both work.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual void score(std::span<const TokenId> prefix, std::span<double> out) = 0;
};

// Independent uniform scores in [0, 1).  Deterministic for a given seed and
// call order; exists to exercise the constraint table, not to parse well.
class UniformRandomScorer : public Scorer {
public:
    explicit UniformRandomScorer(std::uint64_t seed);
    void score(std::span<const TokenId> prefix, std::span<double> out) override;

private:
    std::mt19937_64 rng_;
};

// Scores 1 for the token that continues the fixed target sequence, 0 for
// everything else.  Beam search then reproduces the target exactly, which
// checks the surrounding pipeline without a model.
class GoldReplayScorer : public Scorer {
public:
    GoldReplayScorer(const ConstraintEngine& engine, std::string_view gold_linearized);
    void score(std::span<const TokenId> prefix, std::span<double> out) override;

private:
    std::vector<TokenId> target_;
};

// Bridges to an external process over a line protocol:
//   handshake:  "VOCAB <n> <token>...\n"      (engine -> child, once)
//   request:    "SCORE <k> <token>...\n"      (engine -> child, per call)
//   response:   n whitespace-separated floats on one line (child -> engine)
// The child is spawned through /bin/sh.  Throws Error on spawn or protocol
// failures.
class PipeScorer : public Scorer {
public:
    PipeScorer(const ConstraintEngine& engine, const std::string& command);
    ~PipeScorer() override;

    PipeScorer(const PipeScorer&) = delete;
    PipeScorer& operator=(const PipeScorer&) = delete;

    void score(std::span<const TokenId> prefix, std::span<double> out) override;

private:
    const ConstraintEngine* engine_;
    std::FILE* to_child_ = nullptr;
    std::FILE* from_child_ = nullptr;
    long child_pid_ = -1;
};

struct BeamHypothesis {
    std::vector<TokenId> tokens;  // no BOS, no EOS
    double score = 0.0;
};

struct BeamResult {
    std::vector<BeamHypothesis> hypotheses;  // accepted, best first
    std::size_t n_pruned_unfinished = 0;     // hit max_len before EOS
};

// Beam search where every expansion is filtered through the constraint
// table, so each finished hypothesis is a legal order.
BeamResult constrained_beam_search(const ConstraintEngine& engine,
                                   Scorer& scorer,
                                   std::size_t beam_width = 6,
                                   std::size_t max_len = 256);

// Uniform random walk over allowed_next until EOS.  Returns nullopt when
// the walk hits max_len or a dead end (possible under empty catalogs).
std::optional<std::vector<TokenId>> sample_parse(const ConstraintEngine& engine,
                                                 std::mt19937_64& rng,
                                                 std::size_t max_len = 256);

// Renders decoder tokens back into linearized text.
std::string detokenize(const ConstraintEngine& engine, std::span<const TokenId> tokens);

}  // namespace taskparse
