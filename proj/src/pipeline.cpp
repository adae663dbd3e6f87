// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "recap/errors.hpp"
#include "recap/plot.hpp"
#include "recap/remote_backend.hpp"
#include "recap/toy_backends.hpp"

namespace recap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPartialFailureRatio = 0.10;

struct RunContext {
    const RunConfig *config;
    const BackendSuite *backends;
    const CorpusIndex *index;
};

VideoRecord caption_video(const ManifestEntry &entry, const RunContext &run) {
    const RunConfig &cfg = *run.config;
    const BackendSuite &b = *run.backends;
    VideoRecord rec;
    rec.video_id = entry.video_id;
    try {
        const FrameSource source = load_frames(entry, {cfg.backend.vision_dim, cfg.backend.seed});
        const EmbeddingVector video = encode_video(*b.video_encoder, source.frames, cfg.retrieval_frames);
        rec.context = build_retrieval_context(video, *run.index, cfg.retrieved_sentences, cfg.frequent_words);

        const std::vector<Frame> sampled = sample_frames(source, cfg.sample_fps);
        const KeyframeSet keys = select_keyframes(sampled, *b.image_text, cfg.keyframe_threshold, cfg.anchor);
        rec.keyframes = keys.source_indices;
        rec.sampled_frames = sampled.size();

        DecoderConfig dc = cfg.decoder;
        std::vector<TokenId> prefix;
        if (cfg.mode == DecodeMode::prefix) {
            dc.weights.sentence = 0.0;
            dc.weights.word = 0.0;
            const Tokenizer &tok = b.lm->tokenizer();
            for (const auto &s : rec.context.sentences) {
                const auto ids = tok.encode(s.text);
                prefix.insert(prefix.end(), ids.begin(), ids.end());
            }
        }
        const CaptionGenerator generator(b, rec.context, keys, dc, std::move(prefix));
        rec.result = generator.generate_caption(video_seed(cfg.seed, entry.video_id));
        rec.ok = true;
    } catch (const std::exception &e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

json loss_json(const LossTerms &t) { return json::array({t.language, t.sentence, t.word, t.vision, t.total}); }

json record_json(const VideoRecord &r) {
    json j;
    j["video_id"] = r.video_id;
    j["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) {
        j["error"] = r.error;
        return j;
    }
    const CaptionResult &c = r.result;
    j["caption"] = c.best_caption;
    j["best_index"] = c.best_index;
    j["captions"] = c.captions;
    j["hard_prompts"] = c.hard_prompts;
    j["selection_scores"] = c.selection_scores;
    json retrieved = json::array();
    for (const auto &s : r.context.sentences) {
        retrieved.push_back({{"text", s.text}, {"score", s.score}, {"row", s.row}});
    }
    j["retrieved"] = retrieved;
    json words = json::array();
    for (const auto &w : r.context.words) {
        words.push_back({{"word", w.word}, {"count", w.count}});
    }
    j["words"] = words;
    j["keyframes"] = r.keyframes;
    j["sampled_frames"] = r.sampled_frames;
    j["optimizer_steps"] = c.optimizer_steps;
    j["warnings"] = c.warnings;
    // One row per generated token: [language, sentence, word, vision, total].
    json traces = json::array();
    for (const auto &trace : c.traces) {
        json rows = json::array();
        for (const auto &t : trace) {
            rows.push_back(loss_json(t));
        }
        traces.push_back(rows);
    }
    j["loss_trace"] = traces;
    return j;
}

json stable_config_json(const RunConfig &config) {
    json j = to_json(config);
    j.erase("workers");
    j.erase("output_dir");
    return j;
}

std::size_t parse_count(const std::string &axis, const std::string &value) {
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("ablation: " + axis + " value '" + value + "' is not a non-negative integer");
    }
    return out;
}

double parse_number(const std::string &axis, const std::string &value) {
    std::istringstream in(value);
    double out = 0.0;
    in >> out;
    if (!in || !in.eof()) {
        throw ConfigError("ablation: " + axis + " value '" + value + "' is not a number");
    }
    return out;
}

std::string directory_token(const std::string &value) {
    std::string out;
    for (char c : value) {
        out += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+' ? c : '_';
    }
    return out;
}

std::string fixed(double v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) {
        s.append(width - s.size(), ' ');
    }
    return s;
}

}  // namespace

BackendSuite make_backends(const RunConfig &config) {
    switch (config.backend.kind) {
        case BackendKind::toy:
        case BackendKind::files:
            return make_toy_backends({config.backend.seed, config.backend.vision_dim, config.backend.sentence_dim,
                                      config.backend.lm_width});
        case BackendKind::integration:
            return make_remote_backends(config.backend.url);
    }
    throw std::logic_error("unhandled backend kind");
}

CorpusIndex load_or_build_corpus(const RunConfig &config, const DatasetManifest &manifest, const VideoEncoder &encoder) {
    CorpusIndex index;
    const fs::path corpus = fs::path(config.corpus_path).is_absolute() || config.base_dir.empty()
                                ? fs::path(config.corpus_path)
                                : config.base_dir / config.corpus_path;
    if (config.corpus_path == kManifestReferencesCorpus) {
        const auto refs = manifest.all_references();
        if (refs.empty()) {
            throw DataError("corpus: the manifest holds no references to index");
        }
        index = build_index(refs, encoder, config.corpus_id);
    } else if (is_index_directory(corpus)) {
        index = load_index(corpus);
    } else {
        index = build_index(load_corpus_file(corpus), encoder, config.corpus_id);
    }
    if (index.dim() != encoder.embedding_dim()) {
        throw ConfigError("corpus: index dimension " + std::to_string(index.dim()) + " does not match encoder dimension " +
                          std::to_string(encoder.embedding_dim()));
    }
    return index;
}

std::uint64_t video_seed(std::uint64_t run_seed, const std::string &video_id) {
    return Fnv1a().u64(run_seed).str(video_id).digest();
}

std::size_t CaptionRun::failed() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto &r) { return !r.ok; }));
}

bool CaptionRun::partial_failure() const {
    return !records.empty() && static_cast<double>(failed()) > kPartialFailureRatio * static_cast<double>(records.size());
}

CaptionRun run_caption(const RunConfig &config, const DatasetManifest &manifest) {
    config.validate();
    if (manifest.entries.empty()) {
        throw DataError("caption: manifest has no entries");
    }
    if (config.backend.kind == BackendKind::files) {
        for (const auto &e : manifest.entries) {
            if (e.format != FrameFormat::embeddings) {
                throw ConfigError("caption: the files backend needs embedding blobs, '" + e.video_id +
                                  "' points at an image directory");
            }
        }
    }
    const BackendSuite backends = make_backends(config);
    const CorpusIndex index = load_or_build_corpus(config, manifest, *backends.video_encoder);
    const RunContext ctx{&config, &backends, &index};

    CaptionRun run;
    run.fingerprint = config_fingerprint(config);
    run.records.resize(manifest.entries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < manifest.entries.size(); i = next++) {
            run.records[i] = caption_video(manifest.entries[i], ctx);
        }
    };
    const std::size_t n_threads = std::min(config.workers, manifest.entries.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    std::sort(run.records.begin(), run.records.end(),
              [](const VideoRecord &a, const VideoRecord &b) { return a.video_id < b.video_id; });
    return run;
}

CaptionRun run_prefix_baseline(RunConfig config, const DatasetManifest &manifest) {
    config.mode = DecodeMode::prefix;
    return run_caption(config, manifest);
}

json caption_run_json(const CaptionRun &run, const RunConfig &config) {
    json failures = json::array();
    for (const auto &r : run.records) {
        if (!r.ok) {
            failures.push_back({{"video_id", r.video_id}, {"error", r.error}});
        }
    }
    json records = json::array();
    for (const auto &r : run.records) {
        records.push_back(record_json(r));
    }
    return json{{"fingerprint", run.fingerprint},
                {"version", kCodeVersion},
                {"config", stable_config_json(config)},
                {"summary",
                 {{"videos", run.records.size()},
                  {"succeeded", run.records.size() - run.failed()},
                  {"failed", run.failed()},
                  {"failures", failures}}},
                {"records", records}};
}

fs::path write_caption_run(const CaptionRun &run, const RunConfig &config, const fs::path &dir) {
    fs::create_directories(dir);
    const fs::path path = dir / "results.json";
    write_text_file(path, caption_run_json(run, config).dump(2) + "\n");
    return path;
}

json EvaluationReport::to_json() const {
    return json{{"fingerprint", fingerprint}, {"items", metrics.items},   {"B4", metrics.bleu4},
                {"M", nullptr},               {"R", metrics.rouge_l},     {"C", metrics.cider},
                {"warnings", metrics.warnings}};
}

std::string EvaluationReport::table() const {
    std::ostringstream out;
    out << "fingerprint " << fingerprint << "\n";
    out << pad("items", 8) << pad("B@4", 10) << pad("M", 6) << pad("R", 10) << "C\n";
    out << pad(std::to_string(metrics.items), 8) << pad(fixed(metrics.bleu4, 4), 10) << pad("-", 6)
        << pad(fixed(metrics.rouge_l, 4), 10) << fixed(metrics.cider, 4) << "\n";
    return out.str();
}

EvaluationReport run_evaluate(const json &results, const DatasetManifest &manifest) {
    if (!results.is_object() || !results.contains("records") || !results["records"].is_array()) {
        throw DataError("evaluate: results file has no records array");
    }
    EvalCorpus corpus;
    std::vector<std::string> missing;
    for (const auto &r : results["records"]) {
        if (r.value("status", "") != "ok") {
            continue;
        }
        const std::string id = r.at("video_id").get<std::string>();
        const ManifestEntry *entry = manifest.find(id);
        const bool has_refs = entry && std::any_of(entry->references.begin(), entry->references.end(),
                                                   [](const std::string &s) { return !is_blank(s); });
        if (!has_refs) {
            missing.push_back(id);
            continue;
        }
        corpus[id] = {r.at("caption").get<std::string>(), entry->references};
    }
    if (!missing.empty()) {
        std::string msg = "evaluate: no references for " + std::to_string(missing.size()) + " video(s):";
        for (const auto &id : missing) {
            msg += " " + id;
        }
        throw DataError(msg);
    }
    if (corpus.empty()) {
        throw DataError("evaluate: results hold no captions");
    }
    EvaluationReport report;
    report.fingerprint = results.value("fingerprint", "");
    report.metrics = evaluate_corpus(corpus);
    return report;
}

json read_json_file(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_text_file(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << text;
}

RunConfig apply_axis_value(RunConfig base, const std::string &axis, const std::string &value) {
    const DecoderConfig defaults;
    if (axis == "K") {
        base.retrieved_sentences = parse_count(axis, value);
    } else if (axis == "L") {
        base.frequent_words = parse_count(axis, value);
    } else if (axis == "P") {
        base.decoder.soft_tokens = parse_count(axis, value);
    } else if (axis == "lambda_clip") {
        base.keyframe_threshold = parse_number(axis, value);
    } else if (axis == "corpus") {
        base.corpus_path = value;
        base.corpus_id = value == kManifestReferencesCorpus ? "testset" : fs::path(value).stem().string();
    } else if (axis == "anchor") {
        if (value == "admitted") {
            base.anchor = AnchorMode::admitted;
        } else if (value == "every") {
            base.anchor = AnchorMode::every;
        } else {
            throw ConfigError("ablation: anchor value must be admitted or every");
        }
    } else if (axis == "losses") {
        LossWeights &w = base.decoder.weights;
        const double s = w.sentence > 0.0 ? w.sentence : defaults.weights.sentence;
        const double wd = w.word > 0.0 ? w.word : defaults.weights.word;
        base.mode = DecodeMode::loss;
        if (value == "none") {
            w.sentence = w.word = 0.0;
        } else if (value == "S") {
            w.sentence = s;
            w.word = 0.0;
        } else if (value == "W") {
            w.sentence = 0.0;
            w.word = wd;
        } else if (value == "S+W") {
            w.sentence = s;
            w.word = wd;
        } else if (value == "prefix") {
            w.sentence = w.word = 0.0;
            base.mode = DecodeMode::prefix;
        } else {
            throw ConfigError("ablation: losses value must be one of none, S, W, S+W, prefix");
        }
    } else {
        throw ConfigError("ablation: unknown axis '" + axis + "'");
    }
    base.validate();
    return base;
}

json AblationReport::to_json() const {
    json rows_json = json::array();
    for (const auto &r : rows) {
        rows_json.push_back({{"value", r.value},
                             {"fingerprint", r.fingerprint},
                             {"items", r.metrics.items},
                             {"failed", r.failed},
                             {"B4", r.metrics.bleu4},
                             {"M", nullptr},
                             {"R", r.metrics.rouge_l},
                             {"C", r.metrics.cider}});
    }
    return json{{"axis", axis}, {"rows", rows_json}};
}

std::string AblationReport::table() const {
    std::size_t width = std::max<std::size_t>(axis.size(), 6);
    for (const auto &r : rows) {
        width = std::max(width, r.value.size());
    }
    width += 2;
    std::ostringstream out;
    out << pad(axis, width) << pad("B@4", 10) << pad("M", 6) << pad("R", 10) << "C\n";
    for (const auto &r : rows) {
        out << pad(r.value, width) << pad(fixed(r.metrics.bleu4, 4), 10) << pad("-", 6)
            << pad(fixed(r.metrics.rouge_l, 4), 10) << fixed(r.metrics.cider, 4) << "\n";
    }
    return out.str();
}

AblationReport run_ablation(const RunConfig &config, const DatasetManifest &manifest, const std::string &axis,
                            const std::vector<std::string> &values, const fs::path &out) {
    if (std::find(ablation_axes().begin(), ablation_axes().end(), axis) == ablation_axes().end()) {
        throw ConfigError("ablation: unknown axis '" + axis + "'");
    }
    if (values.size() < 2) {
        throw ConfigError("ablation: need at least two values");
    }
    std::vector<RunConfig> configs;
    for (const auto &v : values) {
        configs.push_back(apply_axis_value(config, axis, v));
    }
    fs::create_directories(out);
    AblationReport report;
    report.axis = axis;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const CaptionRun run = run_caption(configs[i], manifest);
        const fs::path dir = out / (axis + "=" + directory_token(values[i]));
        const json results = caption_run_json(run, configs[i]);
        fs::create_directories(dir);
        write_text_file(dir / "results.json", results.dump(2) + "\n");
        const EvaluationReport eval = run_evaluate(results, manifest);
        write_text_file(dir / "metrics.json", eval.to_json().dump(2) + "\n");
        report.rows.push_back({values[i], run.fingerprint, eval.metrics, run.failed()});
    }
    write_text_file(out / "ablation.json", report.to_json().dump(2) + "\n");
    write_text_file(out / "ablation.txt", report.table());

    const bool numeric = axis == "K" || axis == "L" || axis == "P" || axis == "lambda_clip";
    LineChart chart;
    chart.x_label = axis;
    for (const auto &r : report.rows) {
        chart.x_ticks.push_back(r.value);
        if (numeric) {
            chart.x.push_back(parse_number(axis, r.value));
        }
    }
    chart.title = "CIDEr vs " + axis;
    chart.y_label = "CIDEr";
    for (const auto &r : report.rows) {
        chart.y.push_back(r.metrics.cider);
    }
    write_line_chart_svg(chart, out / "ablation_cider.svg");
    chart.title = "BLEU@4 vs " + axis;
    chart.y_label = "BLEU@4";
    chart.y.clear();
    for (const auto &r : report.rows) {
        chart.y.push_back(r.metrics.bleu4);
    }
    write_line_chart_svg(chart, out / "ablation_bleu4.svg");
    return report;
}

}  // namespace recap
