// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/toy_world.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "recap/errors.hpp"
#include "recap/pipeline.hpp"
#include "recap/toy_backends.hpp"
#include "recap/vector_blob.hpp"

namespace recap {

namespace fs = std::filesystem;

namespace {

struct Scene {
    std::vector<std::string> shots;
    std::vector<std::string> captions;
};

const std::vector<Scene> &scenes() {
    static const std::vector<Scene> all = {
        {{"a cat playing with a ball", "a kitten chasing a toy"},
         {"a cat is playing with a ball.", "a kitten chases a toy on the table.", "a cat plays with a small ball."}},
        {{"a man cutting bread in a kitchen", "a knife slicing a loaf"},
         {"a man is cutting bread.", "the man cuts a loaf of bread.", "a person slices bread in a kitchen."}},
        {{"two people playing ping pong", "a player hitting a ball on a table"},
         {"two people are playing ping pong.", "two men play ping pong at a table.",
          "players are playing a game of ping pong."}},
        {{"a woman singing on a stage", "a band playing music"},
         {"a woman is singing on a stage.", "a singer performs a song with a band.", "a woman sings a song."}},
        {{"a dog running in the park", "a dog catching a ball on the grass"},
         {"a dog is running in the park.", "a dog runs on the grass.", "a dog catches a ball in a park."}},
        {{"a chef cooking vegetables in a pan", "someone frying an egg"},
         {"a chef is cooking vegetables.", "a person cooks food in a pan.", "someone is frying vegetables in a kitchen."}},
        {{"a car driving on a road", "a car on a street"},
         {"a car is driving down the road.", "a red car drives on the street.", "a car drives on a road near a river."}},
        {{"a reporter talking about the news", "a man talking in a room"},
         {"a reporter is talking about the news.", "a man talks to the camera.", "a news reporter explains the news."}},
    };
    return all;
}

const std::vector<std::string> &distractors() {
    static const std::vector<std::string> all = {
        "a horse is running in a field.",  "a boy is riding a bike.",          "people are swimming in a pool.",
        "a girl is reading a book.",       "a boat is on the river.",          "children are playing soccer.",
        "a baby is eating food.",          "a woman is applying makeup.",      "a cartoon character is talking.",
        "a man is playing the guitar.",    "a team is playing basketball.",    "a bird sits in a tree.",
        "a person is walking in the snow.", "a crowd is watching a game.",     "a man is writing on paper.",
    };
    return all;
}

}  // namespace

ToyWorld write_toy_world(const fs::path &dir, const ToyWorldOptions &options) {
    if (options.videos == 0 || options.frames_per_shot == 0 || options.shots == 0) {
        throw InputError("toy world: videos, shots and frames per shot must be >= 1");
    }
    fs::create_directories(dir / "frames");
    ToyWorld world;
    world.config.backend = options.backend;
    world.config.corpus_path = "corpus.txt";
    world.config.corpus_id = "toy";
    world.config.base_dir = dir;

    RunConfig backend_config;
    backend_config.backend = options.backend;
    backend_config.backend.kind = BackendKind::toy;
    const BackendSuite backends = make_backends(backend_config);

    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order(scenes().size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::shuffle(order.begin(), order.end(), rng);
    std::normal_distribution<double> noise(0.0, options.frame_noise);

    world.manifest.source = dir / "manifest.jsonl";
    for (std::size_t v = 0; v < options.videos; ++v) {
        const Scene &scene = scenes()[order[v % order.size()]];
        ManifestEntry entry;
        entry.video_id = "video" + std::to_string(v);
        entry.frames = fs::absolute(dir / "frames" / (entry.video_id + ".f32"));
        entry.format = FrameFormat::embeddings;
        entry.fps = 30.0;
        const std::size_t n_refs = std::min(options.references, scene.captions.size());
        entry.references.assign(scene.captions.begin(), scene.captions.begin() + static_cast<long>(n_refs));

        std::vector<Vector> rows;
        for (std::size_t s = 0; s < options.shots; ++s) {
            const EmbeddingVector base = backends.image_text->embed_text(scene.shots[s % scene.shots.size()]);
            for (std::size_t f = 0; f < options.frames_per_shot; ++f) {
                Vector row(base.values().begin(), base.values().end());
                for (double &x : row) {
                    x += noise(rng);
                }
                rows.push_back(std::move(row));
            }
        }
        write_vector_blob(entry.frames, rows);
        world.manifest.entries.push_back(std::move(entry));
    }
    write_manifest_jsonl(world.manifest, world.manifest.source);

    for (const auto &scene : scenes()) {
        world.corpus.insert(world.corpus.end(), scene.captions.begin(), scene.captions.end());
    }
    world.corpus.insert(world.corpus.end(), distractors().begin(), distractors().end());
    std::ofstream corpus(dir / "corpus.txt");
    for (const auto &s : world.corpus) {
        corpus << s << '\n';
    }
    if (!corpus) {
        throw DataError("toy world: cannot write corpus");
    }
    write_text_file(dir / "config.json", to_json(world.config).dump(2) + "\n");
    return world;
}

}  // namespace recap
