// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "recap/errors.hpp"

namespace recap {

namespace {

using nlohmann::json;

template <typename Enum>
struct EnumNames {
    Enum value;
    const char *name;
};

constexpr EnumNames<AnchorMode> kAnchorNames[] = {{AnchorMode::admitted, "admitted"}, {AnchorMode::every, "every"}};
constexpr EnumNames<BackendKind> kBackendNames[] = {
    {BackendKind::toy, "toy"}, {BackendKind::files, "files"}, {BackendKind::integration, "integration"}};
constexpr EnumNames<DecodeMode> kModeNames[] = {{DecodeMode::loss, "loss"}, {DecodeMode::prefix, "prefix"}};
constexpr EnumNames<Emission> kEmissionNames[] = {{Emission::greedy, "greedy"}, {Emission::top_k, "top_k"}};

template <typename Enum, std::size_t N>
std::string enum_name(const EnumNames<Enum> (&names)[N], Enum value) {
    for (const auto &n : names) {
        if (n.value == value) {
            return n.name;
        }
    }
    throw std::logic_error("unnamed enum value");
}

template <typename Enum, std::size_t N>
Enum enum_value(const EnumNames<Enum> (&names)[N], const std::string &name, const std::string &key) {
    for (const auto &n : names) {
        if (name == n.name) {
            return n.value;
        }
    }
    throw ConfigError("config: unknown value '" + name + "' for " + key);
}

// Reads one JSON object, rejecting unknown keys once all expected keys are consumed.
class Section {
  public:
    Section(const json &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError("config: " + label() + " must be an object");
        }
    }

    [[nodiscard]] const json *find(const std::string &key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void count(const std::string &key, std::size_t &out) {
        if (const json *v = find(key)) {
            if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
                throw ConfigError("config: " + qualified(key) + " must be a non-negative integer");
            }
            out = v->get<std::size_t>();
        }
    }

    void u64(const std::string &key, std::uint64_t &out) {
        if (const json *v = find(key)) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
                throw ConfigError("config: " + qualified(key) + " must be a non-negative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void number(const std::string &key, double &out) {
        if (const json *v = find(key)) {
            if (!v->is_number()) {
                throw ConfigError("config: " + qualified(key) + " must be a number");
            }
            out = v->get<double>();
        }
    }

    void string(const std::string &key, std::string &out) {
        if (const json *v = find(key)) {
            if (!v->is_string()) {
                throw ConfigError("config: " + qualified(key) + " must be a string");
            }
            out = v->get<std::string>();
        }
    }

    void boolean(const std::string &key, bool &out) {
        if (const json *v = find(key)) {
            if (!v->is_boolean()) {
                throw ConfigError("config: " + qualified(key) + " must be a boolean");
            }
            out = v->get<bool>();
        }
    }

    template <typename Enum, std::size_t N>
    void choice(const std::string &key, const EnumNames<Enum> (&names)[N], Enum &out) {
        std::string name;
        string(key, name);
        if (!name.empty()) {
            out = enum_value(names, name, qualified(key));
        }
    }

    void strings(const std::string &key, std::vector<std::string> &out) {
        if (const json *v = find(key)) {
            if (!v->is_array()) {
                throw ConfigError("config: " + qualified(key) + " must be an array of strings");
            }
            out.clear();
            for (const auto &item : *v) {
                if (!item.is_string()) {
                    throw ConfigError("config: " + qualified(key) + " must be an array of strings");
                }
                out.push_back(item.get<std::string>());
            }
        }
    }

    [[nodiscard]] std::string qualified(const std::string &key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() const {
        for (const auto &[key, value] : j_.items()) {
            if (!seen_.count(key)) {
                throw ConfigError("config: unknown key '" + qualified(key) + "'");
            }
        }
    }

  private:
    [[nodiscard]] std::string label() const { return path_.empty() ? "root" : "'" + path_ + "'"; }

    const json &j_;
    std::string path_;
    std::set<std::string> seen_;
};

json to_json_without_runtime(const RunConfig &c) {
    const DecoderConfig &d = c.decoder;
    return json{
        {"backend",
         {{"kind", to_string(c.backend.kind)},
          {"seed", c.backend.seed},
          {"vision_dim", c.backend.vision_dim},
          {"sentence_dim", c.backend.sentence_dim},
          {"lm_width", c.backend.lm_width},
          {"url", c.backend.url}}},
        {"corpus", {{"path", c.corpus_path}, {"id", c.corpus_id}}},
        {"retrieval", {{"K", c.retrieved_sentences}, {"L", c.frequent_words}, {"frames", c.retrieval_frames}}},
        {"keyframes", {{"fps", c.sample_fps}, {"lambda_clip", c.keyframe_threshold}, {"anchor", to_string(c.anchor)}}},
        {"decoder",
         {{"P", d.soft_tokens},
          {"N", d.candidates},
          {"M", d.iterations},
          {"max_tokens", d.max_tokens},
          {"tau", d.temperature},
          {"init_noise", d.init_noise},
          {"steps_per_token", d.steps_per_token},
          {"emission", to_string(d.emission)},
          {"top_k", d.top_k},
          {"prompts", d.prompts},
          {"validate_distributions", d.validate_distributions}}},
        {"loss_weights",
         {{"language", d.weights.language},
          {"vision", d.weights.vision},
          {"sentence", d.weights.sentence},
          {"word", d.weights.word}}},
        {"optimizer",
         {{"lr", d.optimizer.lr},
          {"weight_decay", d.optimizer.weight_decay},
          {"beta1", d.optimizer.beta1},
          {"beta2", d.optimizer.beta2},
          {"eps", d.optimizer.eps}}},
        {"mode", to_string(c.mode)},
        {"seed", c.seed},
    };
}

}  // namespace

std::string to_string(AnchorMode mode) { return enum_name(kAnchorNames, mode); }
std::string to_string(BackendKind kind) { return enum_name(kBackendNames, kind); }
std::string to_string(DecodeMode mode) { return enum_name(kModeNames, mode); }
std::string to_string(Emission emission) { return enum_name(kEmissionNames, emission); }

void RunConfig::validate() const {
    auto fail = [](const std::string &msg) { throw ConfigError("config: " + msg); };
    if (retrieved_sentences == 0) fail("retrieval.K must be >= 1");
    if (retrieval_frames == 0) fail("retrieval.frames must be >= 1");
    if (!(sample_fps > 0.0) || !std::isfinite(sample_fps)) fail("keyframes.fps must be > 0");
    if (!(keyframe_threshold > 0.0 && keyframe_threshold <= 1.0)) fail("keyframes.lambda_clip must lie in (0, 1]");
    if (backend.vision_dim == 0 || backend.sentence_dim == 0 || backend.lm_width == 0) {
        fail("backend dimensions must be >= 1");
    }
    if (backend.kind == BackendKind::integration && backend.url.empty()) fail("integration backend needs backend.url");
    if (corpus_path.empty()) fail("corpus.path is empty");
    if (workers == 0) fail("workers must be >= 1");
    decoder.validate();
}

json to_json(const RunConfig &config) {
    json j = to_json_without_runtime(config);
    j["workers"] = config.workers;
    j["output_dir"] = config.output_dir;
    return j;
}

RunConfig run_config_from_json(const json &j) {
    RunConfig c;
    DecoderConfig &d = c.decoder;
    Section root(j, "");
    if (const json *v = root.find("backend")) {
        Section s(*v, "backend");
        s.choice("kind", kBackendNames, c.backend.kind);
        s.u64("seed", c.backend.seed);
        s.count("vision_dim", c.backend.vision_dim);
        s.count("sentence_dim", c.backend.sentence_dim);
        s.count("lm_width", c.backend.lm_width);
        s.string("url", c.backend.url);
        s.finish();
    }
    if (const json *v = root.find("corpus")) {
        Section s(*v, "corpus");
        s.string("path", c.corpus_path);
        s.string("id", c.corpus_id);
        s.finish();
    }
    if (const json *v = root.find("retrieval")) {
        Section s(*v, "retrieval");
        s.count("K", c.retrieved_sentences);
        s.count("L", c.frequent_words);
        s.count("frames", c.retrieval_frames);
        s.finish();
    }
    if (const json *v = root.find("keyframes")) {
        Section s(*v, "keyframes");
        s.number("fps", c.sample_fps);
        s.number("lambda_clip", c.keyframe_threshold);
        s.choice("anchor", kAnchorNames, c.anchor);
        s.finish();
    }
    if (const json *v = root.find("decoder")) {
        Section s(*v, "decoder");
        s.count("P", d.soft_tokens);
        s.count("N", d.candidates);
        s.count("M", d.iterations);
        s.count("max_tokens", d.max_tokens);
        s.number("tau", d.temperature);
        s.number("init_noise", d.init_noise);
        s.count("steps_per_token", d.steps_per_token);
        s.choice("emission", kEmissionNames, d.emission);
        s.count("top_k", d.top_k);
        s.strings("prompts", d.prompts);
        s.boolean("validate_distributions", d.validate_distributions);
        s.finish();
    }
    if (const json *v = root.find("loss_weights")) {
        Section s(*v, "loss_weights");
        s.number("language", d.weights.language);
        s.number("vision", d.weights.vision);
        s.number("sentence", d.weights.sentence);
        s.number("word", d.weights.word);
        s.finish();
    }
    if (const json *v = root.find("optimizer")) {
        Section s(*v, "optimizer");
        s.number("lr", d.optimizer.lr);
        s.number("weight_decay", d.optimizer.weight_decay);
        s.number("beta1", d.optimizer.beta1);
        s.number("beta2", d.optimizer.beta2);
        s.number("eps", d.optimizer.eps);
        s.finish();
    }
    root.choice("mode", kModeNames, c.mode);
    root.u64("seed", c.seed);
    root.count("workers", c.workers);
    root.string("output_dir", c.output_dir);
    root.finish();
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    RunConfig config = run_config_from_json(j);
    config.base_dir = path.parent_path();
    return config;
}

std::string config_fingerprint(const RunConfig &config) {
    const std::uint64_t h = Fnv1a().str(to_json_without_runtime(config).dump()).str(kCodeVersion).digest();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace recap
