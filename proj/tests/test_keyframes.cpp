// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "recap/errors.hpp"
#include "recap/keyframes.hpp"
#include "recap/toy_backends.hpp"

namespace recap {
namespace {

std::vector<EmbeddingVector> unit_rows(const std::vector<std::vector<double>> &rows) {
    std::vector<EmbeddingVector> out;
    for (const auto &r : rows) out.push_back(EmbeddingVector::normalized(r));
    return out;
}

std::vector<std::vector<double>> raw(const std::vector<EmbeddingVector> &rows) {
    std::vector<std::vector<double>> out;
    for (const auto &r : rows) out.push_back(oracle::values(r));
    return out;
}

TEST(SampleFrames, SingleFrameVideo) {
    FrameSource video{{{"only", {1.0}}}, 30.0};
    const auto frames = sample_frames(video, 3.0);
    ASSERT_EQ(frames.size(), 1u);
    EXPECT_EQ(frames[0].id, "only");
}

TEST(SampleFrames, DefaultRate) { EXPECT_DOUBLE_EQ(kDefaultSampleFps, 3.0); }

TEST(SampleFrames, TenSecondsAtThreeFps) {
    // Exact rational timestamps: frame k sits at native index k * 30 / 3.
    const auto got = sample_frame_indices(300, 30.0, 3.0);
    ASSERT_EQ(got.size(), 30u);
    for (std::size_t k = 0; k < 30; ++k) EXPECT_EQ(got[k], k * 30 / 3);
}

TEST(SampleFrames, NtscRate) {
    // 29.97 fps sampled at 3 fps: index floor(k * 999 / 100), computed in integers.
    const auto got = sample_frame_indices(300, 29.97, 3.0);
    std::vector<std::size_t> expected;
    for (std::size_t k = 0; k * 999 / 100 < 300; ++k) expected.push_back(k * 999 / 100);
    EXPECT_EQ(got, expected);
}

TEST(SampleFrames, Errors) {
    EXPECT_THROW(sample_frame_indices(0, 30.0, 3.0), InputError);
    EXPECT_THROW(sample_frame_indices(10, 30.0, 0.0), InputError);
    EXPECT_THROW(sample_frame_indices(10, -1.0, 3.0), InputError);
}

TEST(Keyframes, IdenticalFramesKeepOnlyTheFirst) {
    const std::vector<EmbeddingVector> rows(10, EmbeddingVector::normalized({0.3, 0.4, 0.5}));
    EXPECT_EQ(select_keyframe_indices(rows, 0.9), (std::vector<std::size_t>{0}));
    EXPECT_EQ(select_keyframe_indices(rows, 1.0), (std::vector<std::size_t>{0}));
    EXPECT_DOUBLE_EQ(kDefaultKeyframeThreshold, 0.9);
}

TEST(Keyframes, SixHandSetFramesMatchSimulation) {
    const auto rows = unit_rows({{1, 0, 0}, {0.95, 0.1, 0}, {0.6, 0.8, 0}, {0.55, 0.85, 0.05}, {0, 0, 1}, {1, 0, 0.1}});
    const auto got = select_keyframe_indices(rows, 0.9);
    EXPECT_EQ(got, oracle::keyframes(raw(rows), 0.9, false));
    EXPECT_EQ(got, (std::vector<std::size_t>{0, 2, 4, 5}));
}

TEST(Keyframes, AnchorModesDiffer) {
    // A slow drift: each step is similar to the previous frame but the end is far from the start.
    std::vector<std::vector<double>> drift;
    for (int i = 0; i < 8; ++i) drift.push_back({std::cos(0.3 * i), std::sin(0.3 * i)});
    const auto rows = unit_rows(drift);
    EXPECT_EQ(select_keyframe_indices(rows, 0.9, AnchorMode::every), oracle::keyframes(raw(rows), 0.9, true));
    EXPECT_EQ(select_keyframe_indices(rows, 0.9, AnchorMode::every), (std::vector<std::size_t>{0}));
    EXPECT_GT(select_keyframe_indices(rows, 0.9, AnchorMode::admitted).size(), 1u);
}

TEST(Keyframes, Preconditions) {
    const auto rows = unit_rows({{1, 0}});
    EXPECT_THROW(select_keyframe_indices({}, 0.9), InputError);
    EXPECT_THROW(select_keyframe_indices(rows, 0.0), InputError);
    EXPECT_THROW(select_keyframe_indices(rows, 1.5), InputError);
}

TEST(Keyframes, RandomSequencesMatchSimulationAndInvariants) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> thr(0.05, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 30;
        const std::size_t dim = 2 + rng() % 5;
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < n; ++i) rows.push_back(oracle::random_unit(rng, dim));
        const auto emb = unit_rows(rows);
        const double lambda = thr(rng);
        const auto got = select_keyframe_indices(emb, lambda);
        ASSERT_EQ(got, oracle::keyframes(raw(emb), lambda, false));
        ASSERT_EQ(got.front(), 0u);
        for (std::size_t i = 1; i < got.size(); ++i) ASSERT_LT(got[i - 1], got[i]);
    }
}

TEST(Keyframes, TinyThresholdWithNonNegativeSimilarities) {
    std::mt19937_64 rng(4);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 20; ++i) {
        auto r = oracle::random_unit(rng, 4);
        for (double &x : r) x = std::abs(x);
        rows.push_back(r);
    }
    EXPECT_EQ(select_keyframe_indices(unit_rows(rows), 1e-12), (std::vector<std::size_t>{0}));
}

TEST(Keyframes, AdmissionIsMonotoneInThreshold) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 500; ++trial) {
        const auto pair = unit_rows({oracle::random_unit(rng, 3), oracle::random_unit(rng, 3)});
        const double lo = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
        const double hi = std::uniform_real_distribution<double>(lo, 1.0)(rng);
        if (select_keyframe_indices(pair, lo).size() == 2) {
            ASSERT_EQ(select_keyframe_indices(pair, hi).size(), 2u);
        }
    }
}

TEST(Keyframes, SelectUsesImageTower) {
    const ToyImageTextScorer scorer(3, 4);
    const std::vector<Frame> frames{{"a", {1, 0, 0, 0}}, {"b", {2, 0.1, 0, 0}}, {"c", {0, 1, 0, 0}}};
    const auto set = select_keyframes(frames, scorer, 0.9);
    ASSERT_EQ(set.size(), 2u);
    EXPECT_EQ(set.frames[1].id, "c");
    EXPECT_EQ(set.source_indices, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(set.embeddings[1], scorer.embed_image(frames[2]));
}

}  // namespace
}  // namespace recap
