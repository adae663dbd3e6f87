// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "recap/errors.hpp"

namespace recap {

namespace {

void require_distribution(std::span<const double> p, const char *what) {
    if (!is_distribution(p)) {
        throw std::logic_error(std::string("decoder: ") + what + " is not a valid distribution");
    }
}

Vector gather(std::span<const double> values, std::span<const TokenId> ids) {
    Vector out;
    out.reserve(ids.size());
    for (TokenId id : ids) {
        out.push_back(values[static_cast<std::size_t>(id)]);
    }
    return out;
}

}  // namespace

CandidateSet make_candidate_set(const TokenDistribution &full, std::span<const TokenId> generated, std::size_t n,
                                const Tokenizer &tokenizer) {
    if (n == 0) {
        throw InputError("candidate set: N must be >= 1");
    }
    const auto probs = full.probabilities();
    std::vector<TokenId> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t take = std::min(n, probs.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](TokenId a, TokenId b) {
                          const double pa = probs[static_cast<std::size_t>(a)];
                          const double pb = probs[static_cast<std::size_t>(b)];
                          return pa > pb || (pa == pb && a < b);
                      });
    CandidateSet c;
    c.ids.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    c.base_probs = gather(probs, c.ids);
    const double mass = std::accumulate(c.base_probs.begin(), c.base_probs.end(), 0.0);
    for (double &q : c.base_probs) {
        q /= mass;
    }
    std::vector<TokenId> continuation(generated.begin(), generated.end());
    continuation.push_back(0);
    for (TokenId id : c.ids) {
        continuation.back() = id;
        c.texts.push_back(tokenizer.decode(continuation));
    }
    return c;
}

CandidateSet candidate_set(const CausalLm &lm, const SoftPrompt &soft, const HardPrompt &hard,
                           std::span<const TokenId> generated, std::size_t n) {
    std::vector<TokenId> context(hard.tokens);
    context.insert(context.end(), generated.begin(), generated.end());
    return make_candidate_set(lm.next_distribution(soft.embeddings(), context), generated, n, lm.tokenizer());
}

Vector average_then_softmax(std::span<const double> scores, std::size_t n, std::size_t r, double tau) {
    if (!(tau > 0.0)) {
        throw InputError("pseudo-target: temperature must be positive");
    }
    if (r == 0) {
        throw InputError("pseudo-target: no reference items");
    }
    if (scores.size() != n * r) {
        throw std::logic_error("pseudo-target: score matrix shape mismatch");
    }
    Vector logits(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < r; ++j) {
            acc += scores[k * r + j];
        }
        logits[k] = (acc / static_cast<double>(r)) / tau;
    }
    return softmax(logits);
}

Vector pseudo_target_sentences(const CandidateSet &cands, std::span<const std::string> sentences,
                               const SentenceScorer &scorer, double tau) {
    if (sentences.empty()) {
        throw InputError("pseudo-target: no retrieved sentences");
    }
    return average_then_softmax(scorer.similarity_matrix(cands.texts, sentences), cands.size(), sentences.size(), tau);
}

Vector pseudo_target_words(const CandidateSet &cands, std::span<const std::string> words,
                           const SentenceScorer &scorer, double tau) {
    if (words.empty()) {
        throw InputError("pseudo-target: no frequent words");
    }
    return average_then_softmax(scorer.similarity_matrix(cands.texts, words), cands.size(), words.size(), tau);
}

Vector pseudo_target_vision(const CandidateSet &cands, const KeyframeSet &keys, const ImageTextScorer &scorer,
                            double tau) {
    if (keys.size() == 0) {
        throw InputError("pseudo-target: empty keyframe set");
    }
    std::vector<double> scores;
    scores.reserve(cands.size() * keys.size());
    for (const auto &text : cands.texts) {
        const EmbeddingVector t = scorer.embed_text(text);
        for (const auto &frame : keys.embeddings) {
            scores.push_back(ImageTextScorer::score(frame, t));
        }
    }
    return average_then_softmax(scores, cands.size(), keys.size(), tau);
}

double loss_cross_entropy(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw std::logic_error("cross entropy: length mismatch");
    }
    double loss = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        loss -= p[k] * std::log(std::max(q[k], kProbabilityFloor));
    }
    return loss;
}

double loss_language(const TokenDistribution &q_soft, const TokenDistribution &q_plain) {
    return loss_cross_entropy(q_plain.probabilities(), q_soft.probabilities());
}

double total_loss(const LossTerms &t, const LossWeights &w) {
    return w.language * t.language + w.sentence * t.sentence + w.word * t.word + w.vision * t.vision;
}

StepObjective::StepObjective(const CausalLm &lm, std::vector<TokenId> context, std::vector<TokenId> candidate_ids,
                             TokenDistribution reading, Targets targets, LossWeights weights)
    : lm_(&lm),
      context_(std::move(context)),
      ids_(std::move(candidate_ids)),
      reading_(std::move(reading)),
      targets_(std::move(targets)),
      weights_(weights) {
    for (const Vector *t : {&targets_.sentence, &targets_.word, &targets_.vision}) {
        if (!t->empty() && t->size() != ids_.size()) {
            throw std::logic_error("step objective: target length does not match candidate count");
        }
    }
    if (reading_.vocab_size() != lm.vocab_size()) {
        throw std::logic_error("step objective: reading distribution has the wrong vocabulary");
    }
}

LossTerms StepObjective::terms_from_logits(std::span<const double> logits) const {
    const Vector q = softmax(logits);
    const Vector q_cand = softmax(gather(logits, ids_));
    LossTerms t;
    t.language = loss_cross_entropy(reading_.probabilities(), q);
    if (!targets_.sentence.empty()) {
        t.sentence = loss_cross_entropy(targets_.sentence, q_cand);
    }
    if (!targets_.word.empty()) {
        t.word = loss_cross_entropy(targets_.word, q_cand);
    }
    if (!targets_.vision.empty()) {
        t.vision = loss_cross_entropy(targets_.vision, q_cand);
    }
    t.total = total_loss(t, weights_);
    return t;
}

LossTerms StepObjective::evaluate(std::span<const Vector> soft) const {
    lm_->check_inputs(soft, context_);
    return terms_from_logits(lm_->next_logits(soft, context_));
}

std::vector<Vector> StepObjective::gradient(std::span<const Vector> soft) const {
    lm_->check_inputs(soft, context_);
    const Vector logits = lm_->next_logits(soft, context_);
    const Vector q = softmax(logits);
    const Vector q_cand = softmax(gather(logits, ids_));
    const auto reading = reading_.probabilities();

    // Both cross-entropies have unit-mass targets, so d/dz = weight * (prediction - target).
    Vector grad(q.size());
    for (std::size_t v = 0; v < q.size(); ++v) {
        grad[v] = weights_.language * (q[v] - reading[v]);
    }
    const std::pair<const Vector *, double> candidate_terms[] = {
        {&targets_.sentence, weights_.sentence},
        {&targets_.word, weights_.word},
        {&targets_.vision, weights_.vision},
    };
    for (const auto &[target, weight] : candidate_terms) {
        if (target->empty() || weight == 0.0) {
            continue;
        }
        for (std::size_t k = 0; k < ids_.size(); ++k) {
            grad[static_cast<std::size_t>(ids_[k])] += weight * (q_cand[k] - (*target)[k]);
        }
    }
    return lm_->prefix_gradient(soft, context_, grad);
}

void DecoderConfig::validate() const {
    auto fail = [](const std::string &msg) { throw ConfigError("decoder config: " + msg); };
    if (soft_tokens == 0) fail("P (soft_tokens) must be >= 1");
    if (candidates == 0) fail("N (candidates) must be >= 1");
    if (iterations == 0) fail("M (iterations) must be >= 1");
    if (max_tokens == 0) fail("max_tokens must be >= 1");
    if (!(temperature > 0.0)) fail("temperature must be > 0");
    for (double w : {weights.language, weights.sentence, weights.word, weights.vision}) {
        if (!(w >= 0.0) || !std::isfinite(w)) fail("loss weights must be finite and >= 0");
    }
    if (!(optimizer.lr >= 0.0) || !(optimizer.weight_decay >= 0.0)) fail("lr and weight decay must be >= 0");
    if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0) || !(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) {
        fail("betas must lie in [0, 1)");
    }
    if (!(optimizer.eps > 0.0)) fail("eps must be > 0");
    if (!(init_noise >= 0.0)) fail("init noise must be >= 0");
    if (steps_per_token == 0) fail("steps_per_token must be >= 1");
    if (top_k == 0) fail("top_k must be >= 1");
    if (prompts.empty()) fail("prompt set is empty");
}

std::pair<std::size_t, Vector> select_best_caption(std::span<const std::string> captions, const KeyframeSet &keys,
                                                   const ImageTextScorer &scorer) {
    if (captions.empty()) {
        throw InputError("select_best_caption: no captions");
    }
    if (keys.size() == 0) {
        throw InputError("select_best_caption: empty keyframe set");
    }
    Vector scores;
    scores.reserve(captions.size());
    for (const auto &caption : captions) {
        const EmbeddingVector t = scorer.embed_text(caption);
        double acc = 0.0;
        for (const auto &frame : keys.embeddings) {
            acc += ImageTextScorer::score(frame, t);
        }
        scores.push_back(acc / static_cast<double>(keys.size()));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) {
            best = i;
        }
    }
    return {best, std::move(scores)};
}

CaptionGenerator::CaptionGenerator(const BackendSuite &backends, const RetrievalContext &context,
                                   const KeyframeSet &keys, DecoderConfig config, std::vector<TokenId> text_prefix)
    : backends_(&backends),
      context_(&context),
      keys_(&keys),
      config_(std::move(config)),
      text_prefix_(std::move(text_prefix)),
      sentences_(context.sentence_texts()),
      words_(context.word_texts()) {
    config_.validate();
    if (!backends.lm || !backends.image_text || !backends.sentence) {
        throw ConfigError("caption generator: backend suite is incomplete");
    }
    if (keys.size() == 0) {
        throw InputError("caption generator: empty keyframe set");
    }
    if (sentences_.empty() && config_.weights.sentence > 0.0) {
        warnings_.emplace_back("no retrieved sentences; sentence retrieval loss disabled");
        config_.weights.sentence = 0.0;
    }
    if (words_.empty() && config_.weights.word > 0.0) {
        warnings_.emplace_back("no frequent words; word retrieval loss disabled");
        config_.weights.word = 0.0;
    }
}

std::vector<TokenId> CaptionGenerator::context_tokens(const HardPrompt &hard, std::span<const TokenId> generated) const {
    std::vector<TokenId> ctx(text_prefix_);
    ctx.insert(ctx.end(), hard.tokens.begin(), hard.tokens.end());
    ctx.insert(ctx.end(), generated.begin(), generated.end());
    return ctx;
}

TokenStep CaptionGenerator::token_step(SoftPrompt &soft, const HardPrompt &hard,
                                       std::span<const TokenId> generated) const {
    const CausalLm &lm = *backends_->lm;
    const auto ctx = context_tokens(hard, generated);
    const TokenDistribution full = lm.next_distribution(soft.embeddings(), ctx);

    TokenStep step;
    step.candidates = make_candidate_set(full, generated, config_.candidates, lm.tokenizer());
    CandidateSet &c = step.candidates;
    const LossWeights &w = config_.weights;
    if (w.sentence > 0.0) {
        c.p_sentence = pseudo_target_sentences(c, sentences_, *backends_->sentence, config_.temperature);
    }
    if (w.word > 0.0) {
        c.p_word = pseudo_target_words(c, words_, *backends_->sentence, config_.temperature);
    }
    if (w.vision > 0.0) {
        c.p_vision = pseudo_target_vision(c, *keys_, *backends_->image_text, config_.temperature);
    }
    if (config_.validate_distributions) {
        require_distribution(full.probabilities(), "q (full)");
        require_distribution(c.base_probs, "q (candidates)");
        for (const Vector *p : {&c.p_sentence, &c.p_word, &c.p_vision}) {
            if (!p->empty()) {
                require_distribution(*p, "pseudo-target");
            }
        }
    }

    const StepObjective objective(lm, ctx, c.ids, lm.next_distribution({}, ctx),
                                  {c.p_sentence, c.p_word, c.p_vision}, w);
    step.losses = objective.evaluate(soft.embeddings());
    for (std::size_t i = 0; i < config_.steps_per_token; ++i) {
        if (!optimize_step(soft, objective.gradient(soft.embeddings()), config_.optimizer)) {
            break;
        }
        ++step.updates_applied;
    }
    step.updated = lm.next_distribution(soft.embeddings(), ctx);
    return step;
}

TokenId CaptionGenerator::emit(const TokenDistribution &dist, std::mt19937_64 &rng) const {
    const auto p = dist.probabilities();
    if (config_.emission == Emission::greedy) {
        return static_cast<TokenId>(std::max_element(p.begin(), p.end()) - p.begin());
    }
    const CandidateSet top = make_candidate_set(dist, {}, config_.top_k, backends_->lm->tokenizer());
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double acc = 0.0;
    for (std::size_t k = 0; k < top.size(); ++k) {
        acc += top.base_probs[k];
        if (u < acc) {
            return top.ids[k];
        }
    }
    return top.ids.back();
}

SentenceResult CaptionGenerator::generate_sentence(SoftPrompt &soft, const HardPrompt &hard,
                                                   std::mt19937_64 &rng) const {
    const Tokenizer &tok = backends_->lm->tokenizer();
    SentenceResult out;
    for (std::size_t i = 0; i < config_.max_tokens; ++i) {
        TokenStep step = token_step(soft, hard, out.tokens);
        out.trace.push_back(step.losses);
        const TokenId next = emit(step.updated, rng);
        out.tokens.push_back(next);
        const std::string &text = tok.token_text(next);
        if (!text.empty() && text.back() == '.') {
            break;
        }
    }
    out.text = tok.decode(out.tokens);
    return out;
}

CaptionResult CaptionGenerator::generate_caption(std::uint64_t seed) const {
    const CausalLm &lm = *backends_->lm;
    std::mt19937_64 rng(seed);
    auto draw_prompt = [&] {
        return make_hard_prompt(config_.prompts[rng() % config_.prompts.size()], lm.tokenizer(), config_.prompts);
    };

    CaptionResult result;
    result.warnings = warnings_;
    HardPrompt hard = draw_prompt();
    SoftPrompt soft = init_soft_prompt(hard, config_.soft_tokens, Fnv1a().u64(seed).str("soft-prompt").digest(), lm,
                                       config_.init_noise);
    for (std::size_t m = 0; m < config_.iterations; ++m) {
        if (m > 0) {
            hard = draw_prompt();
        }
        SentenceResult sentence = generate_sentence(soft, hard, rng);
        if (!soft.is_finite()) {
            throw std::runtime_error("soft prompt became non-finite");
        }
        result.hard_prompts.push_back(hard.text);
        result.captions.push_back(std::move(sentence.text));
        result.traces.push_back(std::move(sentence.trace));
    }
    result.optimizer_steps = soft.optimizer_state().step;
    auto [best, scores] = select_best_caption(result.captions, *keys_, *backends_->image_text);
    result.best_index = best;
    result.selection_scores = std::move(scores);
    result.best_caption = result.captions[best];
    return result;
}

}  // namespace recap
