// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "recap/config.hpp"
#include "recap/errors.hpp"
#include "recap/manifest.hpp"
#include "recap/vector_blob.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace recap {
namespace {

class TempDir {
  public:
    TempDir() {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / (std::string("recap_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    [[nodiscard]] const fs::path &path() const { return path_; }

  private:
    fs::path path_;
};

void write(const fs::path &p, const std::string &text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

// Minimal 24-bit BMP writer for image-directory tests.
void write_bmp(const fs::path &p, int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const int row = (w * 3 + 3) & ~3;
    fs::create_directories(p.parent_path());
    const std::uint32_t size = 54 + static_cast<std::uint32_t>(row * h);
    std::vector<std::uint8_t> buf(size, 0);
    auto put32 = [&](std::size_t at, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
    };
    buf[0] = 'B';
    buf[1] = 'M';
    put32(2, size);
    put32(10, 54);
    put32(14, 40);
    put32(18, static_cast<std::uint32_t>(w));
    put32(22, static_cast<std::uint32_t>(h));
    buf[26] = 1;
    buf[28] = 24;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t at = 54 + static_cast<std::size_t>(y * row + x * 3);
            buf[at] = b;
            buf[at + 1] = g;
            buf[at + 2] = r;
        }
    }
    std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char *>(buf.data()), size);
}

// ---- config ----

TEST(Config, Defaults) {
    const RunConfig c;
    EXPECT_EQ(c.retrieved_sentences, 15u);
    EXPECT_EQ(c.frequent_words, 5u);
    EXPECT_EQ(c.retrieval_frames, 16u);
    EXPECT_DOUBLE_EQ(c.sample_fps, 3.0);
    EXPECT_DOUBLE_EQ(c.keyframe_threshold, 0.9);
    EXPECT_EQ(c.anchor, AnchorMode::admitted);
    EXPECT_EQ(c.decoder.soft_tokens, 5u);
    EXPECT_EQ(c.decoder.candidates, 100u);
    EXPECT_EQ(c.decoder.iterations, 16u);
    EXPECT_EQ(c.mode, DecodeMode::loss);
    EXPECT_EQ(c.corpus_path, "@references");
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, JsonRoundTrip) {
    RunConfig c;
    c.retrieved_sentences = 7;
    c.frequent_words = 3;
    c.anchor = AnchorMode::every;
    c.decoder.weights.word = 0.0;
    c.decoder.optimizer.lr = 5e-3;
    c.decoder.prompts = {"Video of"};
    c.mode = DecodeMode::prefix;
    c.backend.kind = BackendKind::integration;
    c.backend.url = "http://127.0.0.1:1";
    c.seed = 42;
    const json j = to_json(c);
    const RunConfig back = run_config_from_json(j);
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(config_fingerprint(back), config_fingerprint(c));
}

TEST(Config, PartialJsonKeepsDefaults) {
    const RunConfig c = run_config_from_json(json::parse(R"({"retrieval": {"K": 20}})"));
    EXPECT_EQ(c.retrieved_sentences, 20u);
    EXPECT_EQ(c.frequent_words, 5u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(run_config_from_json(json::parse(R"({"retreival": {}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"retrieval": {"Q": 1}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"retrieval": {"K": "ten"}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"retrieval": {"K": -1}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"decoder": {"N": 0}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"decoder": {"tau": 0}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"keyframes": {"anchor": "sometimes"}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"mode": "magic"})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"backend": {"kind": "integration"}})")), ConfigError);
}

TEST(Config, FingerprintIgnoresRuntimeFields) {
    RunConfig a, b;
    b.workers = 8;
    b.output_dir = "elsewhere";
    EXPECT_EQ(config_fingerprint(a), config_fingerprint(b));
    EXPECT_EQ(config_fingerprint(a).size(), 16u);
    b.seed = 1;
    EXPECT_NE(config_fingerprint(a), config_fingerprint(b));
}

TEST(Config, LoadFileSetsBaseDir) {
    TempDir dir;
    write(dir.path() / "cfg" / "run.json", R"({"corpus": {"path": "corpus.txt"}, "workers": 2})");
    const RunConfig c = load_run_config(dir.path() / "cfg" / "run.json");
    EXPECT_EQ(c.corpus_path, "corpus.txt");
    EXPECT_EQ(c.workers, 2u);
    EXPECT_EQ(fs::weakly_canonical(c.base_dir), fs::weakly_canonical(dir.path() / "cfg"));
    EXPECT_THROW(load_run_config(dir.path() / "missing.json"), ConfigError);
    write(dir.path() / "bad.json", "{not json");
    EXPECT_THROW(load_run_config(dir.path() / "bad.json"), ConfigError);
}

// ---- manifest ----

TEST(Manifest, JsonlResolvesRelativePaths) {
    TempDir dir;
    fs::create_directories(dir.path() / "frames");
    write_vector_blob(dir.path() / "frames" / "v1.f32", {{1.0, 0.0}, {0.0, 1.0}});
    write(dir.path() / "m.jsonl",
          R"({"video_id": "v1", "embeddings": "frames/v1.f32", "references": ["a cat"], "fps": 3})"
          "\n\n");
    const auto m = load_manifest(dir.path() / "m.jsonl");
    ASSERT_EQ(m.entries.size(), 1u);
    const auto &e = m.entries[0];
    EXPECT_EQ(e.video_id, "v1");
    EXPECT_TRUE(e.frames.is_absolute());
    EXPECT_EQ(e.format, FrameFormat::embeddings);
    EXPECT_DOUBLE_EQ(e.fps, 3.0);
    const auto frames = load_frames(e);
    ASSERT_EQ(frames.frames.size(), 2u);
    EXPECT_EQ(frames.frames[1].features, (Vector{0.0, 1.0}));
    EXPECT_NE(m.find("v1"), nullptr);
    EXPECT_EQ(m.find("v2"), nullptr);
}

TEST(Manifest, ReportsEveryProblemAtOnce) {
    TempDir dir;
    write(dir.path() / "m.jsonl",
          "{\"video_id\": \"a\", \"embeddings\": \"missing.f32\", \"references\": [\"x\"]}\n"
          "{\"video_id\": \"b\", \"embeddings\": \"x.f32\", \"references\": [], \"colour\": 1}\n"
          "not json\n"
          "{\"video_id\": \"a\", \"embeddings\": \"missing.f32\", \"references\": [\"x\"]}\n");
    try {
        load_manifest(dir.path() / "m.jsonl");
        FAIL() << "expected DataError";
    } catch (const DataError &e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("line 1"), std::string::npos) << msg;
        EXPECT_NE(msg.find("colour"), std::string::npos) << msg;
        EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
        EXPECT_NE(msg.find("duplicate"), std::string::npos) << msg;
    }
}

TEST(Manifest, MissingFramesAllowedWhenNotRequired) {
    TempDir dir;
    write(dir.path() / "m.jsonl", R"({"video_id": "a", "embeddings": "gone.f32", "references": ["x"]})");
    ManifestOptions opts;
    opts.require_frames = false;
    EXPECT_EQ(load_manifest(dir.path() / "m.jsonl", opts).all_references(), std::vector<std::string>{"x"});
    EXPECT_THROW(load_manifest(dir.path() / "m.jsonl"), DataError);
    EXPECT_THROW(load_manifest(dir.path() / "nothing.jsonl"), DataError);
}

TEST(Manifest, MsrVttAnnotations) {
    TempDir dir;
    fs::create_directories(dir.path() / "frames");
    write_vector_blob(dir.path() / "frames" / "video0.f32", {{1.0, 0.0}});
    fs::create_directories(dir.path() / "frames" / "video1");
    write_bmp(dir.path() / "frames" / "video1" / "0001.bmp", 4, 4, 255, 0, 0);
    write(dir.path() / "ann.json", R"({
        "videos": [{"video_id": "video0", "split": "test"}, {"video_id": "video1"}],
        "sentences": [{"video_id": "video0", "caption": "a man talks"},
                      {"video_id": "video1", "caption": "a red screen"},
                      {"video_id": "video0", "caption": "someone speaks"}]})");
    const auto m = load_manifest(dir.path() / "ann.json");
    ASSERT_EQ(m.entries.size(), 2u);
    EXPECT_EQ(m.entries[0].references, (std::vector<std::string>{"a man talks", "someone speaks"}));
    EXPECT_EQ(m.entries[0].format, FrameFormat::embeddings);
    EXPECT_EQ(m.entries[1].format, FrameFormat::images);
}

TEST(Manifest, MsrVttUnknownVideo) {
    TempDir dir;
    write(dir.path() / "ann.json",
          R"({"videos": [{"video_id": "v"}], "sentences": [{"video_id": "w", "caption": "x"}]})");
    ManifestOptions opts;
    opts.require_frames = false;
    EXPECT_THROW(load_manifest(dir.path() / "ann.json", opts), DataError);
}

TEST(Manifest, WriteThenLoad) {
    TempDir dir;
    write_vector_blob(dir.path() / "v.f32", {{0.5, 0.5}});
    DatasetManifest m;
    m.entries.push_back({"v", dir.path() / "v.f32", FrameFormat::embeddings, {"r1", "r2"}, 25.0});
    write_manifest_jsonl(m, dir.path() / "out.jsonl");
    const auto back = load_manifest(dir.path() / "out.jsonl");
    ASSERT_EQ(back.entries.size(), 1u);
    EXPECT_EQ(back.entries[0].references, m.entries[0].references);
    EXPECT_DOUBLE_EQ(back.entries[0].fps, 25.0);
    EXPECT_EQ(fs::weakly_canonical(back.entries[0].frames), fs::weakly_canonical(dir.path() / "v.f32"));
}

TEST(Manifest, ImageDirectoryFrames) {
    if (!image_frames_supported()) GTEST_SKIP() << "built without image decoding";
    TempDir dir;
    write_bmp(dir.path() / "v" / "b.bmp", 16, 16, 0, 0, 255);
    write_bmp(dir.path() / "v" / "a.bmp", 16, 16, 255, 0, 0);
    write_bmp(dir.path() / "v" / "c.bmp", 16, 16, 255, 0, 0);
    write(dir.path() / "v" / "notes.txt", "ignored");
    ManifestEntry e{"v", dir.path() / "v", FrameFormat::images, {"x"}, 1.0};
    FrameLoadOptions opts;
    opts.image_dim = 16;
    const auto src = load_frames(e, opts);
    ASSERT_EQ(src.frames.size(), 3u);
    EXPECT_EQ(src.frames[0].id, "a.bmp");
    EXPECT_EQ(src.frames[0].features.size(), 16u);
    EXPECT_EQ(src.frames[0].features, src.frames[2].features);
    EXPECT_NE(src.frames[0].features, src.frames[1].features);
    EXPECT_EQ(load_frames(e, opts).frames[1].features, src.frames[1].features);
}

}  // namespace
}  // namespace recap
