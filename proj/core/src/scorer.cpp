#include "taskparse/scorer.hpp"

#include <algorithm>
#include <csignal>
#include <cstring>

#include <sys/wait.h>
#include <unistd.h>

#include "taskparse/parse_tree.hpp"

namespace taskparse {

UniformRandomScorer::UniformRandomScorer(std::uint64_t seed) : rng_(seed) {}

void UniformRandomScorer::score(std::span<const TokenId> prefix,
                                std::span<double> out) {
    (void)prefix;
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (double& v : out) v = dist(rng_);
}

GoldReplayScorer::GoldReplayScorer(const ConstraintEngine& engine,
                                   std::string_view gold_linearized) {
    for (const auto& token : tokenize_linear(gold_linearized)) {
        auto id = engine.vocabulary().id(token);
        if (!id) {
            throw Error("gold token \"" + token + "\" not in decoder vocabulary");
        }
        target_.push_back(*id);
    }
    if (target_.empty()) throw Error("empty gold sequence");
    target_.push_back(engine.vocabulary().eos());
}

void GoldReplayScorer::score(std::span<const TokenId> prefix,
                             std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (prefix.size() >= target_.size()) return;
    if (!std::equal(prefix.begin(), prefix.end(), target_.begin())) return;
    out[target_[prefix.size()]] = 1.0;
}

PipeScorer::PipeScorer(const ConstraintEngine& engine, const std::string& command)
    : engine_(&engine) {
    // A dying child must surface as a read/write error, not SIGPIPE.
    std::signal(SIGPIPE, SIG_IGN);

    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
        throw Error("pipe() failed for scorer command");
    }
    pid_t pid = fork();
    if (pid < 0) throw Error("fork() failed for scorer command");
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    child_pid_ = pid;
    to_child_ = fdopen(to_child[1], "w");
    from_child_ = fdopen(from_child[0], "r");
    if (to_child_ == nullptr || from_child_ == nullptr) {
        throw Error("fdopen() failed for scorer command");
    }

    const auto& vocab = engine.vocabulary();
    std::fprintf(to_child_, "VOCAB %zu", vocab.size());
    for (const auto& token : vocab.tokens()) {
        std::fprintf(to_child_, " %s", token.c_str());
    }
    std::fprintf(to_child_, "\n");
    if (std::fflush(to_child_) != 0) {
        throw Error("scorer command closed its input during handshake");
    }
}

PipeScorer::~PipeScorer() {
    if (to_child_ != nullptr) std::fclose(to_child_);
    if (from_child_ != nullptr) std::fclose(from_child_);
    if (child_pid_ > 0) {
        int status = 0;
        waitpid(static_cast<pid_t>(child_pid_), &status, 0);
    }
}

void PipeScorer::score(std::span<const TokenId> prefix, std::span<double> out) {
    const auto& vocab = engine_->vocabulary();
    std::fprintf(to_child_, "SCORE %zu", prefix.size());
    for (TokenId id : prefix) {
        std::fprintf(to_child_, " %s", vocab.text(id).c_str());
    }
    std::fprintf(to_child_, "\n");
    if (std::fflush(to_child_) != 0) {
        throw Error("scorer command closed its input");
    }
    for (double& v : out) {
        if (std::fscanf(from_child_, " %lf", &v) != 1) {
            throw Error("scorer command sent a short or malformed response");
        }
    }
}

BeamResult constrained_beam_search(const ConstraintEngine& engine,
                                   Scorer& scorer,
                                   std::size_t beam_width,
                                   std::size_t max_len) {
    if (beam_width == 0) throw Error("beam width must be positive");

    struct Hypothesis {
        DecoderState state;
        std::vector<TokenId> tokens;
        double score = 0.0;
    };

    std::vector<Hypothesis> live;
    live.push_back({engine.initial_state(), {}, 0.0});
    std::vector<BeamHypothesis> done;
    std::vector<double> scores(engine.vocabulary().size(), 0.0);
    const TokenId eos = engine.vocabulary().eos();

    BeamResult result;
    for (std::size_t length = 0; length < max_len && !live.empty(); ++length) {
        struct Candidate {
            std::size_t parent;
            TokenId token;
            double score;
        };
        std::vector<Candidate> candidates;
        for (std::size_t h = 0; h < live.size(); ++h) {
            auto allowed = engine.allowed_next(live[h].state);
            if (allowed.empty()) continue;  // dead end; drop the hypothesis
            scorer.score(live[h].tokens, scores);
            for (TokenId token : allowed) {
                candidates.push_back({h, token, live[h].score + scores[token]});
            }
        }
        // Ties go to the lower token id so a closable hypothesis can take
        // end-of-sequence instead of being crowded out by deeper expansions.
        std::sort(candidates.begin(), candidates.end(),
                  [](const Candidate& a, const Candidate& b) {
                      if (a.score != b.score) return a.score > b.score;
                      if (a.token != b.token) return a.token < b.token;
                      return a.parent < b.parent;
                  });
        if (candidates.size() > beam_width) candidates.resize(beam_width);

        std::vector<Hypothesis> next;
        for (const auto& candidate : candidates) {
            const Hypothesis& parent = live[candidate.parent];
            if (candidate.token == eos) {
                done.push_back({parent.tokens, candidate.score});
                continue;
            }
            Hypothesis hyp;
            hyp.state = parent.state;
            if (!engine.step(hyp.state, candidate.token)) {
                throw Error("allowed token rejected by step(); engine bug");
            }
            hyp.tokens = parent.tokens;
            hyp.tokens.push_back(candidate.token);
            hyp.score = candidate.score;
            next.push_back(std::move(hyp));
        }
        live = std::move(next);
    }

    result.n_pruned_unfinished = live.size();
    std::sort(done.begin(), done.end(),
              [](const BeamHypothesis& a, const BeamHypothesis& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.tokens < b.tokens;
              });
    if (done.size() > beam_width) done.resize(beam_width);
    result.hypotheses = std::move(done);
    return result;
}

std::optional<std::vector<TokenId>> sample_parse(const ConstraintEngine& engine,
                                                 std::mt19937_64& rng,
                                                 std::size_t max_len) {
    DecoderState state = engine.initial_state();
    std::vector<TokenId> tokens;
    const TokenId eos = engine.vocabulary().eos();
    for (std::size_t length = 0; length < max_len; ++length) {
        auto allowed = engine.allowed_next(state);
        if (allowed.empty()) return std::nullopt;
        TokenId token = allowed[static_cast<std::size_t>(rng() % allowed.size())];
        if (!engine.step(state, token)) {
            throw Error("allowed token rejected by step(); engine bug");
        }
        if (token == eos) return tokens;
        tokens.push_back(token);
    }
    return std::nullopt;
}

std::string detokenize(const ConstraintEngine& engine,
                       std::span<const TokenId> tokens) {
    std::string out;
    for (TokenId id : tokens) {
        const std::string& text = engine.vocabulary().text(id);
        if (!out.empty() && out.back() != '(') out += ' ';
        out += text;
    }
    return out;
}

}  // namespace taskparse
