// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "recap/backends.hpp"
#include "recap/corpus_retrieval.hpp"
#include "recap/keyframes.hpp"
#include "recap/soft_prompt.hpp"

namespace recap {

inline constexpr std::size_t kDefaultCandidates = 100;
inline constexpr std::size_t kDefaultIterations = 16;
inline constexpr std::size_t kDefaultMaxTokens = 15;
inline constexpr double kDefaultTemperature = 0.1;
inline constexpr double kProbabilityFloor = 1e-12;

/// Top-N next-token candidates for one step.
struct CandidateSet {
    std::vector<TokenId> ids;          ///< top-N of the full distribution, most probable first
    Vector base_probs;                 ///< q renormalized over the N candidates
    std::vector<std::string> texts;    ///< s_k: generated text plus candidate, prompts excluded
    Vector p_sentence, p_word, p_vision;  ///< pseudo-targets; empty when not computed

    [[nodiscard]] std::size_t size() const { return ids.size(); }
};

/// N clamps to the vocabulary size. Ties in probability keep the lower token id first.
CandidateSet make_candidate_set(const TokenDistribution &full, std::span<const TokenId> generated, std::size_t n,
                                const Tokenizer &tokenizer);

/// Full-vocabulary distribution from lm(soft ++ embed(hard ++ generated)), then make_candidate_set.
CandidateSet candidate_set(const CausalLm &lm, const SoftPrompt &soft, const HardPrompt &hard,
                           std::span<const TokenId> generated, std::size_t n);

/// p = softmax(mean_j scores[k][j] / tau) where `scores` is row-major N x R.
Vector average_then_softmax(std::span<const double> scores, std::size_t n, std::size_t r, double tau);

/// Retrieved-sentence pseudo-target. Throws InputError on empty `sentences` or tau <= 0.
Vector pseudo_target_sentences(const CandidateSet &cands, std::span<const std::string> sentences,
                               const SentenceScorer &scorer, double tau);

/// Frequent-word pseudo-target; same contract as pseudo_target_sentences.
Vector pseudo_target_words(const CandidateSet &cands, std::span<const std::string> words,
                           const SentenceScorer &scorer, double tau);

/// Keyframe-matching pseudo-target over the T frames of `keys`.
Vector pseudo_target_vision(const CandidateSet &cands, const KeyframeSet &keys, const ImageTextScorer &scorer,
                            double tau);

/// -sum_k p_k log(max(q_k, 1e-12)). Throws std::logic_error on length mismatch.
double loss_cross_entropy(std::span<const double> p, std::span<const double> q);

/// Cross-entropy with the prompt-free "reading" distribution as target and the
/// soft-prompted "writing" distribution as prediction, over the full vocabulary.
double loss_language(const TokenDistribution &q_soft, const TokenDistribution &q_plain);

struct LossWeights {
    double language = 1.6;
    double sentence = 0.8;
    double word = 0.3;
    double vision = 1.0;
};

struct LossTerms {
    double language = 0.0;
    double sentence = 0.0;
    double word = 0.0;
    double vision = 0.0;
    double total = 0.0;
};

double total_loss(const LossTerms &terms, const LossWeights &weights);

/// The loss of one token step as a function of the soft prompt, with the
/// context, candidate ids, reading distribution and pseudo-targets held fixed.
/// An empty target disables its term.
class StepObjective {
  public:
    struct Targets {
        Vector sentence, word, vision;
    };

    StepObjective(const CausalLm &lm, std::vector<TokenId> context, std::vector<TokenId> candidate_ids,
                  TokenDistribution reading, Targets targets, LossWeights weights);

    [[nodiscard]] LossTerms evaluate(std::span<const Vector> soft) const;
    /// d total / d soft, one row per soft token.
    [[nodiscard]] std::vector<Vector> gradient(std::span<const Vector> soft) const;

  private:
    [[nodiscard]] LossTerms terms_from_logits(std::span<const double> logits) const;

    const CausalLm *lm_;
    std::vector<TokenId> context_;
    std::vector<TokenId> ids_;
    TokenDistribution reading_;
    Targets targets_;
    LossWeights weights_;
};

enum class Emission { greedy, top_k };

struct DecoderConfig {
    std::size_t soft_tokens = kDefaultSoftTokens;
    std::size_t candidates = kDefaultCandidates;
    std::size_t iterations = kDefaultIterations;
    std::size_t max_tokens = kDefaultMaxTokens;
    double temperature = kDefaultTemperature;
    LossWeights weights;
    AdamWOptions optimizer;
    double init_noise = kDefaultInitNoise;
    std::size_t steps_per_token = 1;
    Emission emission = Emission::greedy;
    std::size_t top_k = 5;
    std::vector<std::string> prompts = default_prompt_set();
    bool validate_distributions = false;

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
};

struct TokenStep {
    CandidateSet candidates;
    LossTerms losses;               ///< evaluated before the update
    TokenDistribution updated;      ///< full distribution after the update
    std::size_t updates_applied = 0;
};

struct SentenceResult {
    std::string text;
    std::vector<TokenId> tokens;
    std::vector<LossTerms> trace;
};

struct CaptionResult {
    std::vector<std::string> captions;
    std::vector<std::string> hard_prompts;
    Vector selection_scores;
    std::size_t best_index = 0;
    std::string best_caption;
    std::vector<std::vector<LossTerms>> traces;
    std::vector<std::string> warnings;
    std::uint64_t optimizer_steps = 0;
};

/// Argmax of the mean keyframe-caption score; ties resolve to the lowest index.
std::pair<std::size_t, Vector> select_best_caption(std::span<const std::string> captions, const KeyframeSet &keys,
                                                   const ImageTextScorer &scorer);

/// Runs test-time soft-prompt optimization for one video.
///
/// `text_prefix` is placed between the soft and hard prompt; it is empty
/// except in the retrieved-sentence prefix baseline.
class CaptionGenerator {
  public:
    CaptionGenerator(const BackendSuite &backends, const RetrievalContext &context, const KeyframeSet &keys,
                     DecoderConfig config, std::vector<TokenId> text_prefix = {});

    /// Builds candidates and targets, applies `steps_per_token` updates, and
    /// recomputes the distribution with the updated prompt.
    TokenStep token_step(SoftPrompt &soft, const HardPrompt &hard, std::span<const TokenId> generated) const;

    SentenceResult generate_sentence(SoftPrompt &soft, const HardPrompt &hard, std::mt19937_64 &rng) const;

    /// M sentences with a persistent soft prompt; the hard prompt is re-drawn per iteration.
    CaptionResult generate_caption(std::uint64_t seed) const;

    [[nodiscard]] const DecoderConfig &config() const { return config_; }
    [[nodiscard]] const std::vector<std::string> &warnings() const { return warnings_; }

  private:
    [[nodiscard]] std::vector<TokenId> context_tokens(const HardPrompt &hard, std::span<const TokenId> generated) const;
    [[nodiscard]] TokenId emit(const TokenDistribution &dist, std::mt19937_64 &rng) const;

    const BackendSuite *backends_;
    const RetrievalContext *context_;
    const KeyframeSet *keys_;
    DecoderConfig config_;
    std::vector<TokenId> text_prefix_;
    std::vector<std::string> sentences_;
    std::vector<std::string> words_;
    std::vector<std::string> warnings_;
};

}  // namespace recap
