// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "recap/decoder.hpp"
#include "recap/errors.hpp"
#include "recap/keyframes.hpp"
#include "recap/soft_prompt.hpp"
#include "recap/toy_backends.hpp"

namespace recap {
namespace {

std::vector<std::string> small_vocab(std::size_t n) {
    std::vector<std::string> v{"<unk>"};
    for (std::size_t i = 1; i < n; ++i) v.push_back("w" + std::to_string(i));
    return v;
}

KeyframeSet keys_from_texts(const ImageTextScorer &scorer, const std::vector<std::string> &texts) {
    std::vector<Frame> frames;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        frames.push_back({"f" + std::to_string(i), oracle::values(scorer.embed_text(texts[i]))});
    }
    KeyframeSet keys;
    for (const auto &f : frames) {
        keys.frames.push_back(f);
        keys.embeddings.push_back(scorer.embed_image(f));
        keys.source_indices.push_back(keys.source_indices.size());
    }
    return keys;
}

CandidateSet manual_candidates(const std::vector<std::string> &texts) {
    CandidateSet c;
    for (std::size_t i = 0; i < texts.size(); ++i) c.ids.push_back(static_cast<TokenId>(i + 1));
    c.texts = texts;
    c.base_probs.assign(texts.size(), 1.0 / static_cast<double>(texts.size()));
    return c;
}

std::string random_text(std::mt19937_64 &rng, std::size_t words) {
    static const std::vector<std::string> pool = {"a",    "cat",  "dog",   "man",    "plays", "ball",  "kitchen",
                                                  "road", "runs", "woman", "sings",  "car",   "bread", "table",
                                                  "red",  "big",  "on",    "stage",  "the",   "is"};
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        if (i) out += ' ';
        out += pool[rng() % pool.size()];
    }
    return out;
}

// ---- soft prompt ----

TEST(SoftPrompt, DefaultSize) { EXPECT_EQ(DecoderConfig{}.soft_tokens, 5u); }

TEST(SoftPrompt, ZeroNoiseRowsEqualMeanHardEmbedding) {
    const auto suite = make_toy_backends();
    const auto &lm = *suite.lm;
    const auto hard = make_hard_prompt("Video of", lm.tokenizer(), default_prompt_set());
    const auto soft = init_soft_prompt(hard, 5, 1, lm, 0.0);
    Vector mean(lm.embedding_width(), 0.0);
    for (TokenId id : hard.tokens) {
        const Vector e = lm.token_embedding(id);
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += e[d] / static_cast<double>(hard.tokens.size());
    }
    ASSERT_EQ(soft.size(), 5u);
    for (const auto &row : soft.embeddings()) {
        for (std::size_t d = 0; d < mean.size(); ++d) EXPECT_NEAR(row[d], mean[d], 1e-15);
    }
}

TEST(SoftPrompt, SeedDeterminism) {
    const auto suite = make_toy_backends();
    const auto hard = make_hard_prompt("Video shows", suite.lm->tokenizer(), default_prompt_set());
    const auto a = init_soft_prompt(hard, 5, 3, *suite.lm);
    const auto b = init_soft_prompt(hard, 5, 3, *suite.lm);
    const auto c = init_soft_prompt(hard, 5, 4, *suite.lm);
    EXPECT_EQ(a.embeddings(), b.embeddings());
    EXPECT_NE(a.embeddings(), c.embeddings());
}

TEST(SoftPrompt, HardPromptMustBeInSet) {
    const auto suite = make_toy_backends();
    EXPECT_THROW(make_hard_prompt("Picture of", suite.lm->tokenizer(), default_prompt_set()), ConfigError);
    EXPECT_EQ(default_prompt_set().size(), 4u);
}

TEST(AdamW, DefaultHyperparameters) {
    const AdamWOptions o;
    EXPECT_DOUBLE_EQ(o.lr, 1e-4);
    EXPECT_DOUBLE_EQ(o.weight_decay, 0.3);
    EXPECT_DOUBLE_EQ(o.beta1, 0.9);
    EXPECT_DOUBLE_EQ(o.beta2, 0.999);
    EXPECT_DOUBLE_EQ(o.eps, 1e-8);
}

TEST(AdamW, ZeroGradientNoDecayIsIdentity) {
    SoftPrompt soft({{0.5, -1.0}, {2.0, 0.25}});
    const auto before = soft.embeddings();
    AdamWOptions o;
    o.weight_decay = 0.0;
    ASSERT_TRUE(optimize_step(soft, {{0.0, 0.0}, {0.0, 0.0}}, o));
    EXPECT_EQ(soft.embeddings(), before);
}

TEST(AdamW, ZeroGradientShrinksByDecay) {
    SoftPrompt soft({{0.5, -1.0}, {2.0, 0.25}});
    const auto before = soft.embeddings();
    const AdamWOptions o;
    ASSERT_TRUE(optimize_step(soft, {{0.0, 0.0}, {0.0, 0.0}}, o));
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            EXPECT_NEAR(soft.embeddings()[r][c], before[r][c] * (1.0 - o.lr * o.weight_decay), 1e-15);
        }
    }
}

TEST(AdamW, MatchesScalarReference) {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        AdamWOptions o;
        o.lr = std::pow(10.0, -1.0 - static_cast<double>(rng() % 4));
        o.weight_decay = static_cast<double>(rng() % 5) * 0.1;
        std::vector<Vector> w(3, Vector(4));
        for (auto &row : w)
            for (double &x : row) x = n(rng);
        SoftPrompt soft(w);
        std::vector<oracle::ScalarAdamW> ref(12, {o.lr, o.weight_decay, o.beta1, o.beta2, o.eps});
        for (int step = 0; step < 5; ++step) {
            std::vector<Vector> g(3, Vector(4));
            for (auto &row : g)
                for (double &x : row) x = n(rng);
            ASSERT_TRUE(optimize_step(soft, g, o));
            for (std::size_t r = 0; r < 3; ++r) {
                for (std::size_t c = 0; c < 4; ++c) {
                    w[r][c] = ref[r * 4 + c].step(w[r][c], g[r][c]);
                    EXPECT_NEAR(soft.embeddings()[r][c], w[r][c], 1e-10);
                }
            }
        }
        EXPECT_EQ(soft.optimizer_state().step, 5u);
    }
}

TEST(AdamW, RejectsNonFiniteGradientWithoutSideEffects) {
    SoftPrompt soft({{0.5, -1.0}});
    ASSERT_TRUE(optimize_step(soft, {{0.1, 0.2}}, {}));
    const auto rows = soft.embeddings();
    const auto state = soft.optimizer_state();
    EXPECT_FALSE(optimize_step(soft, {{std::numeric_limits<double>::quiet_NaN(), 0.0}}, {}));
    EXPECT_FALSE(optimize_step(soft, {{std::numeric_limits<double>::infinity(), 0.0}}, {}));
    EXPECT_FALSE(optimize_step(soft, {{0.1, 0.2, 0.3}}, {}));
    EXPECT_EQ(soft.embeddings(), rows);
    EXPECT_EQ(soft.optimizer_state().step, state.step);
    EXPECT_EQ(soft.optimizer_state().first_moment, state.first_moment);
    EXPECT_EQ(soft.optimizer_state().second_moment, state.second_moment);
}

// ---- candidates ----

TEST(Candidates, ClampsToVocabulary) {
    const ToyCausalLm lm(3, 8, small_vocab(10));
    const auto dist = lm.next_distribution({}, std::vector<TokenId>{1, 2});
    const auto c = make_candidate_set(dist, {}, 100, lm.tokenizer());
    EXPECT_EQ(c.size(), 10u);
    EXPECT_TRUE(is_distribution(c.base_probs));
}

TEST(Candidates, TopNMatchesFullArgsort) {
    const auto suite = make_toy_backends();
    const auto &lm = *suite.lm;
    const std::vector<TokenId> gen = lm.tokenizer().encode("a cat");
    const auto dist = lm.next_distribution({}, gen);
    const auto probs = dist.probabilities();
    const auto order = oracle::argsort_desc(Vector(probs.begin(), probs.end()));
    const auto c = make_candidate_set(dist, gen, 100, lm.tokenizer());
    ASSERT_EQ(c.size(), 100u);
    double mass = 0.0;
    for (std::size_t k = 0; k < 100; ++k) {
        EXPECT_EQ(static_cast<std::size_t>(c.ids[k]), order[k]);
        mass += probs[order[k]];
    }
    for (std::size_t k = 0; k < 100; ++k) EXPECT_NEAR(c.base_probs[k], probs[order[k]] / mass, 1e-15);
    EXPECT_EQ(c.texts[0], "a cat " + lm.tokenizer().token_text(c.ids[0]));
}

TEST(Candidates, DefaultCount) { EXPECT_EQ(DecoderConfig{}.candidates, 100u); }

TEST(Candidates, ZeroIsRejected) {
    const ToyCausalLm lm(3, 8, small_vocab(10));
    EXPECT_THROW(make_candidate_set(lm.next_distribution({}, std::vector<TokenId>{1}), {}, 0, lm.tokenizer()),
                 InputError);
}

// ---- pseudo-targets ----

TEST(PseudoTarget, SingleCandidateIsOne) {
    const ToySentenceScorer s(5, 64);
    const auto c = manual_candidates({"a cat"});
    const std::vector<std::string> refs{"a dog runs", "a man sings"};
    EXPECT_EQ(pseudo_target_sentences(c, refs, s, 0.1), Vector{1.0});
    EXPECT_EQ(pseudo_target_words(c, std::vector<std::string>{"a cat"}, s, 0.1), Vector{1.0});
}

TEST(PseudoTarget, EqualScoresAreUniform) {
    const ToySentenceScorer s(5, 64);
    const auto c = manual_candidates({"a cat", "a cat"});
    const auto p = pseudo_target_sentences(c, std::vector<std::string>{"a dog"}, s, 0.1);
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(PseudoTarget, DefaultTemperature) { EXPECT_DOUBLE_EQ(DecoderConfig{}.temperature, 0.1); }

TEST(PseudoTarget, SentencesMatchOracle) {
    const ToySentenceScorer s(5, 64);
    const HashTextEmbedder emb(5, 64);
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> cands, refs;
        for (int i = 0; i < 3 + trial % 4; ++i) cands.push_back(random_text(rng, 2 + rng() % 4));
        for (int i = 0; i < 1 + trial % 5; ++i) refs.push_back(random_text(rng, 3 + rng() % 5));
        const auto got = pseudo_target_sentences(manual_candidates(cands), refs, s, 0.1);
        const auto want = oracle::text_pseudo_target(cands, refs, emb, 0.1);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-9);
    }
}

TEST(PseudoTarget, WordsMatchOracle) {
    const ToySentenceScorer s(5, 64);
    const HashTextEmbedder emb(5, 64);
    const std::vector<std::string> cands{"a cat", "a dog", "the kitchen", "a ball"};
    const std::vector<std::string> words{"cat", "ball"};
    const auto got = pseudo_target_words(manual_candidates(cands), words, s, 0.1);
    const auto want = oracle::text_pseudo_target(cands, words, emb, 0.1);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(got[k], want[k], 1e-9);
    EXPECT_TRUE(is_distribution(got));
}

TEST(PseudoTarget, VisionMatchesOracle) {
    const ToyImageTextScorer scorer(5, 64);
    const HashTextEmbedder emb(5, 64);
    const std::vector<std::string> cands{"a cat plays", "a dog runs", "a man sings"};
    const auto keys = keys_from_texts(scorer, {"a cat playing", "a dog", "a stage"});
    std::vector<Vector> raw;
    for (const auto &f : keys.frames) raw.push_back(f.features);
    const auto got = pseudo_target_vision(manual_candidates(cands), keys, scorer, 0.1);
    const auto want = oracle::vision_pseudo_target(cands, raw, emb, 0.1);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(got[k], want[k], 1e-9);
}

TEST(PseudoTarget, VisionSingleFrameAndDuplicates) {
    const ToyImageTextScorer scorer(5, 64);
    const auto c = manual_candidates({"a cat plays", "a dog runs"});
    const auto one = keys_from_texts(scorer, {"a cat"});
    const auto two = keys_from_texts(scorer, {"a cat", "a cat"});
    const auto p1 = pseudo_target_vision(c, one, scorer, 0.1);
    const auto p2 = pseudo_target_vision(c, two, scorer, 0.1);
    const double s0 = ImageTextScorer::score(one.embeddings[0], scorer.embed_text("a cat plays"));
    const double s1 = ImageTextScorer::score(one.embeddings[0], scorer.embed_text("a dog runs"));
    EXPECT_NEAR(p1[0], oracle::softmax({s0 / 0.1, s1 / 0.1})[0], 1e-12);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(p1[k], p2[k], 1e-12);
}

TEST(PseudoTarget, RejectsEmptyReferencesAndBadTemperature) {
    const ToySentenceScorer s(5, 64);
    const ToyImageTextScorer v(5, 64);
    const auto c = manual_candidates({"a cat"});
    EXPECT_THROW(pseudo_target_sentences(c, {}, s, 0.1), InputError);
    EXPECT_THROW(pseudo_target_words(c, {}, s, 0.1), InputError);
    EXPECT_THROW(pseudo_target_vision(c, KeyframeSet{}, v, 0.1), InputError);
    EXPECT_THROW(pseudo_target_sentences(c, std::vector<std::string>{"x"}, s, 0.0), InputError);
}

// ---- losses ----

TEST(Loss, UniformCrossEntropyIsLogN) {
    const Vector u(4, 0.25);
    EXPECT_NEAR(loss_cross_entropy(u, u), std::log(4.0), 1e-15);
}

TEST(Loss, OneHotCrossEntropy) {
    EXPECT_NEAR(loss_cross_entropy(Vector{0, 1, 0}, Vector{0.2, 0.5, 0.3}), -std::log(0.5), 1e-15);
    EXPECT_NEAR(loss_cross_entropy(Vector{1, 0}, Vector{1, 0}), 0.0, 1e-15);
    EXPECT_NEAR(loss_cross_entropy(Vector{1, 0}, Vector{0, 1}), -std::log(1e-12), 1e-9);
}

TEST(Loss, CrossEntropyMatchesSum) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vector a(7), b(7);
        for (double &x : a) x = n(rng);
        for (double &x : b) x = n(rng);
        const Vector p = oracle::softmax(a), q = oracle::softmax(b);
        double want = 0.0;
        for (std::size_t k = 0; k < 7; ++k) want -= p[k] * std::log(q[k]);
        EXPECT_NEAR(loss_cross_entropy(p, q), want, 1e-12);
    }
    EXPECT_THROW(loss_cross_entropy(Vector{1.0}, Vector{0.5, 0.5}), std::logic_error);
}

TEST(Loss, LanguageLossIsEntropyWhenEqual) {
    const auto d = TokenDistribution::from_probabilities({0.5, 0.25, 0.25});
    EXPECT_NEAR(loss_language(d, d), 0.5 * std::log(2.0) + 0.5 * std::log(4.0), 1e-15);
    const auto hot = TokenDistribution::from_probabilities({0.0, 1.0, 0.0});
    EXPECT_NEAR(loss_language(hot, hot), 0.0, 1e-15);
}

TEST(Loss, LanguageLossOnToyLm) {
    const auto suite = make_toy_backends();
    const auto &lm = *suite.lm;
    const auto ctx = lm.tokenizer().encode("video of a cat");
    const std::vector<Vector> soft(2, Vector(lm.embedding_width(), 0.05));
    const auto writing = lm.next_distribution(soft, ctx);
    const auto reading = lm.next_distribution({}, ctx);
    double want = 0.0;
    for (std::size_t v = 0; v < lm.vocab_size(); ++v) {
        want -= reading.probabilities()[v] * std::log(writing.probabilities()[v]);
    }
    EXPECT_NEAR(loss_language(writing, reading), want, 1e-12);
}

TEST(Loss, TotalIsWeightedSum) {
    const LossWeights w;
    EXPECT_DOUBLE_EQ(w.language, 1.6);
    EXPECT_DOUBLE_EQ(w.vision, 1.0);
    EXPECT_DOUBLE_EQ(w.sentence, 0.8);
    EXPECT_DOUBLE_EQ(w.word, 0.3);
    EXPECT_DOUBLE_EQ(total_loss(LossTerms{}, w), 0.0);
    EXPECT_NEAR(total_loss(LossTerms{1, 1, 1, 1, 0}, w), 3.7, 1e-15);
    EXPECT_NEAR(total_loss(LossTerms{2, 0, 0, 0, 0}, w), 3.2, 1e-15);
}

// ---- gradient ----

TEST(Gradient, MatchesCentralDifference) {
    for (std::uint64_t seed : {1u, 2u}) {
        ToyBackendOptions opts;
        opts.seed = seed;
        const auto suite = make_toy_backends(opts);
        const auto &lm = *suite.lm;
        const auto hard = make_hard_prompt("Video of", lm.tokenizer(), default_prompt_set());
        const SoftPrompt soft = init_soft_prompt(hard, 5, seed, lm);
        const auto gen = lm.tokenizer().encode("a cat is");
        auto ctx = hard.tokens;
        ctx.insert(ctx.end(), gen.begin(), gen.end());
        const auto cands = make_candidate_set(lm.next_distribution(soft.embeddings(), ctx), gen, 100, lm.tokenizer());
        const auto keys = keys_from_texts(*suite.image_text, {"a cat playing"});
        StepObjective::Targets t;
        t.sentence = pseudo_target_sentences(
            cands, std::vector<std::string>{"a cat is playing with a ball.", "a kitten chases a toy."},
            *suite.sentence, 0.1);
        t.word = pseudo_target_words(cands, std::vector<std::string>{"cat", "ball"}, *suite.sentence, 0.1);
        t.vision = pseudo_target_vision(cands, keys, *suite.image_text, 0.1);
        const StepObjective obj(lm, ctx, cands.ids, lm.next_distribution({}, ctx), t, LossWeights{});
        const auto analytic = obj.gradient(soft.embeddings());
        const auto numeric = oracle::central_difference(
            [&](const std::vector<Vector> &x) { return obj.evaluate(x).total; }, soft.embeddings(), 1e-4);
        for (std::size_t r = 0; r < analytic.size(); ++r) {
            for (std::size_t c = 0; c < analytic[r].size(); ++c) {
                const double a = analytic[r][c], f = numeric[r][c];
                EXPECT_LT(std::abs(a - f) / std::max({std::abs(a), std::abs(f), 1e-8}), 1e-4)
                    << "seed " << seed << " row " << r << " col " << c;
            }
        }
    }
}

// ---- generation ----

struct Scene {
    BackendSuite suite = make_toy_backends();
    RetrievalContext ctx;
    KeyframeSet keys;

    Scene() {
        ctx.sentences = {{"a cat is playing with a ball.", 0.9, 0}, {"a kitten chases a toy.", 0.8, 1}};
        ctx.words = {{"cat", 3}, {"ball", 2}};
        keys = keys_from_texts(*suite.image_text, {"a cat playing with a ball", "a cat on a table"});
    }
};

TEST(Generation, Defaults) {
    const DecoderConfig cfg;
    EXPECT_EQ(cfg.iterations, 16u);
    EXPECT_EQ(cfg.max_tokens, 15u);
    EXPECT_EQ(cfg.steps_per_token, 1u);
}

TEST(Generation, OneTokenOneStep) {
    Scene s;
    DecoderConfig cfg;
    cfg.max_tokens = 1;
    cfg.iterations = 1;
    const CaptionGenerator gen(s.suite, s.ctx, s.keys, cfg);
    const auto r = gen.generate_caption(3);
    ASSERT_EQ(r.captions.size(), 1u);
    EXPECT_EQ(s.suite.lm->tokenizer().encode(r.captions[0]).size(), 1u);
    EXPECT_EQ(r.optimizer_steps, 1u);
    EXPECT_EQ(r.best_index, 0u);
    EXPECT_EQ(r.traces[0].size(), 1u);
}

TEST(Generation, IterationCountAndStopRule) {
    Scene s;
    DecoderConfig cfg;
    cfg.iterations = 3;
    cfg.max_tokens = 6;
    const CaptionGenerator gen(s.suite, s.ctx, s.keys, cfg);
    const auto r = gen.generate_caption(5);
    ASSERT_EQ(r.captions.size(), 3u);
    ASSERT_EQ(r.hard_prompts.size(), 3u);
    ASSERT_EQ(r.selection_scores.size(), 3u);
    std::uint64_t steps = 0;
    for (std::size_t m = 0; m < 3; ++m) {
        const auto tokens = s.suite.lm->tokenizer().encode(r.captions[m]);
        EXPECT_LE(tokens.size(), 6u);
        steps += r.traces[m].size();
        EXPECT_EQ(r.traces[m].size(), tokens.size());
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
            EXPECT_NE(s.suite.lm->tokenizer().token_text(tokens[i]).back(), '.');
        }
        EXPECT_NE(std::find(default_prompt_set().begin(), default_prompt_set().end(), r.hard_prompts[m]),
                  default_prompt_set().end());
    }
    EXPECT_EQ(r.optimizer_steps, steps);
    EXPECT_EQ(r.best_caption, r.captions[r.best_index]);
}

TEST(Generation, DeterministicAcrossRuns) {
    Scene s;
    DecoderConfig cfg;
    cfg.iterations = 2;
    cfg.max_tokens = 5;
    const CaptionGenerator gen(s.suite, s.ctx, s.keys, cfg);
    const auto a = gen.generate_caption(17);
    const auto b = gen.generate_caption(17);
    EXPECT_EQ(a.captions, b.captions);
    EXPECT_EQ(a.hard_prompts, b.hard_prompts);
    EXPECT_EQ(a.selection_scores, b.selection_scores);
    ASSERT_EQ(a.traces.size(), b.traces.size());
    for (std::size_t m = 0; m < a.traces.size(); ++m) {
        ASSERT_EQ(a.traces[m].size(), b.traces[m].size());
        for (std::size_t i = 0; i < a.traces[m].size(); ++i) EXPECT_EQ(a.traces[m][i].total, b.traces[m][i].total);
    }
}

TEST(Generation, BackbonesStayFrozen) {
    Scene s;
    const auto before = s.suite.parameter_checksum();
    DecoderConfig cfg;
    cfg.iterations = 2;
    cfg.max_tokens = 4;
    CaptionGenerator(s.suite, s.ctx, s.keys, cfg).generate_caption(1);
    EXPECT_EQ(s.suite.parameter_checksum(), before);
}

TEST(Generation, NoLossesNoDecayIsGreedyLm) {
    Scene s;
    DecoderConfig cfg;
    cfg.weights = {0.0, 0.0, 0.0, 0.0};
    cfg.optimizer.weight_decay = 0.0;
    cfg.max_tokens = 8;
    const CaptionGenerator gen(s.suite, s.ctx, s.keys, cfg);
    const auto &lm = *s.suite.lm;
    const auto hard = make_hard_prompt("Video shows", lm.tokenizer(), default_prompt_set());
    SoftPrompt soft = init_soft_prompt(hard, 5, 2, lm);
    const SoftPrompt initial = soft;
    std::mt19937_64 rng(0);
    const auto got = gen.generate_sentence(soft, hard, rng);

    std::vector<TokenId> want;
    for (std::size_t i = 0; i < 8; ++i) {
        auto ctx = hard.tokens;
        ctx.insert(ctx.end(), want.begin(), want.end());
        const auto dist = lm.next_distribution(initial.embeddings(), ctx);
        const auto p = dist.probabilities();
        want.push_back(static_cast<TokenId>(std::max_element(p.begin(), p.end()) - p.begin()));
        if (lm.tokenizer().token_text(want.back()).back() == '.') break;
    }
    EXPECT_EQ(got.tokens, want);
    EXPECT_EQ(soft.embeddings(), initial.embeddings());
}

TEST(Generation, WordTermRaisesRetrievedWord) {
    const auto suite = make_toy_backends();
    RetrievalContext ctx;
    ctx.words = {{"cat", 3}};
    ctx.sentences = {{"a cat is playing with a ball.", 0.9, 0}};
    const auto keys = keys_from_texts(*suite.image_text, {"a cat playing with a ball"});
    const auto &lm = *suite.lm;
    const auto hard = make_hard_prompt("Video of", lm.tokenizer(), default_prompt_set());
    const auto generated = lm.tokenizer().encode("a");
    const TokenId cat = lm.tokenizer().id_of("cat");

    auto prob_after_step = [&](double word_weight) {
        DecoderConfig cfg;
        cfg.weights.word = word_weight;
        SoftPrompt soft = init_soft_prompt(hard, 5, 1, lm);
        const auto step = CaptionGenerator(suite, ctx, keys, cfg).token_step(soft, hard, generated);
        EXPECT_NE(std::find(step.candidates.ids.begin(), step.candidates.ids.end(), cat), step.candidates.ids.end());
        return step.updated[cat];
    };
    EXPECT_GT(prob_after_step(0.3), prob_after_step(0.0));
}

TEST(Generation, InLoopValidationPasses) {
    Scene s;
    DecoderConfig cfg;
    cfg.validate_distributions = true;
    cfg.iterations = 2;
    cfg.max_tokens = 4;
    EXPECT_NO_THROW(CaptionGenerator(s.suite, s.ctx, s.keys, cfg).generate_caption(8));
}

TEST(Generation, EmptyContextDisablesTermsWithWarning) {
    Scene s;
    s.ctx = {};
    DecoderConfig cfg;
    cfg.iterations = 1;
    cfg.max_tokens = 2;
    const CaptionGenerator gen(s.suite, s.ctx, s.keys, cfg);
    EXPECT_EQ(gen.warnings().size(), 2u);
    const auto r = gen.generate_caption(1);
    for (const auto &t : r.traces[0]) {
        EXPECT_EQ(t.sentence, 0.0);
        EXPECT_EQ(t.word, 0.0);
    }
}

TEST(Generation, RejectsEmptyKeyframes) {
    Scene s;
    EXPECT_THROW(CaptionGenerator(s.suite, s.ctx, KeyframeSet{}, DecoderConfig{}), InputError);
}

TEST(Generation, TopKEmissionIsSeeded) {
    Scene s;
    DecoderConfig cfg;
    cfg.emission = Emission::top_k;
    cfg.iterations = 2;
    cfg.max_tokens = 5;
    const CaptionGenerator gen(s.suite, s.ctx, s.keys, cfg);
    EXPECT_EQ(gen.generate_caption(4).captions, gen.generate_caption(4).captions);
}

TEST(Generation, ConfigValidation) {
    DecoderConfig cfg;
    cfg.candidates = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.temperature = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.weights.word = -1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.prompts.clear();
    EXPECT_THROW(cfg.validate(), ConfigError);
}

// ---- selection ----

TEST(Selection, SingleCaption) {
    const ToyImageTextScorer scorer(5, 64);
    const auto keys = keys_from_texts(scorer, {"a cat"});
    EXPECT_EQ(select_best_caption(std::vector<std::string>{"a dog"}, keys, scorer).first, 0u);
}

TEST(Selection, IdenticalCaptionsPickFirst) {
    const ToyImageTextScorer scorer(5, 64);
    const auto keys = keys_from_texts(scorer, {"a cat", "a ball"});
    EXPECT_EQ(select_best_caption(std::vector<std::string>{"a dog", "a dog", "a dog"}, keys, scorer).first, 0u);
}

TEST(Selection, MatchesMeanScoreArgmax) {
    const ToyImageTextScorer scorer(5, 64);
    const HashTextEmbedder emb(5, 64);
    const auto keys = keys_from_texts(scorer, {"a cat playing", "a ball on a table"});
    const std::vector<std::string> caps{"a dog runs", "a cat plays with a ball", "a man sings"};
    const auto [best, scores] = select_best_caption(caps, keys, scorer);
    Vector want;
    for (const auto &c : caps) {
        double acc = 0.0;
        for (const auto &f : keys.frames) acc += oracle::cosine(f.features, oracle::values(emb.embed(c)));
        want.push_back(acc / 2.0);
    }
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(scores[i], want[i], 1e-12);
    EXPECT_EQ(best, static_cast<std::size_t>(std::max_element(want.begin(), want.end()) - want.begin()));
    EXPECT_EQ(best, 1u);
}

TEST(Selection, RejectsEmptyInputs) {
    const ToyImageTextScorer scorer(5, 64);
    const auto keys = keys_from_texts(scorer, {"a cat"});
    EXPECT_THROW(select_best_caption({}, keys, scorer), InputError);
    EXPECT_THROW(select_best_caption(std::vector<std::string>{"a"}, KeyframeSet{}, scorer), InputError);
}

}  // namespace
}  // namespace recap
