// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "recap/config.hpp"
#include "recap/errors.hpp"
#include "recap/pipeline.hpp"
#include "recap/remote_backend.hpp"
#include "recap/toy_world.hpp"

namespace fs = std::filesystem;
using namespace recap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPartial = 2;
constexpr int kExitData = 3;

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out;
};

void add_common(CLI::App *cmd, CommonOptions &o) {
    cmd->add_option("--config", o.config, "RunConfig JSON file (defaults apply to missing keys)");
    cmd->add_option("--seed", o.seed, "Run seed");
    cmd->add_option("--workers", o.workers, "Videos captioned in parallel")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "Output directory");
}

RunConfig resolve_config(const CommonOptions &o) {
    RunConfig config = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    if (o.seed) config.seed = *o.seed;
    if (o.workers) config.workers = *o.workers;
    if (!o.out.empty()) config.output_dir = o.out;
    config.validate();
    return config;
}

int report_caption(const CaptionRun &run, const RunConfig &config) {
    const fs::path path = write_caption_run(run, config, config.output_dir);
    std::cout << "wrote " << path.string() << " (" << run.records.size() - run.failed() << "/" << run.records.size()
              << " videos, fingerprint " << run.fingerprint << ")\n";
    for (const auto &r : run.records) {
        if (!r.ok) {
            std::cerr << "failed " << r.video_id << ": " << r.error << "\n";
        }
    }
    return run.partial_failure() ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"recap: retrieval-guided zero-shot video captioning with test-time soft prompts"};
    app.require_subcommand(1);

    CommonOptions common;
    std::string manifest_path;
    std::string frames_root;

    auto *index_cmd = app.add_subcommand("index", "Embed a text corpus and save the index");
    add_common(index_cmd, common);
    std::string corpus_path;
    index_cmd->add_option("--corpus", corpus_path, "Corpus file (plain text or JSONL); overrides corpus.path");

    auto *caption_cmd = app.add_subcommand("caption", "Caption every video of a manifest");
    add_common(caption_cmd, common);
    caption_cmd->add_option("--manifest", manifest_path, "Dataset manifest (.jsonl or MSR-VTT style .json)")->required();
    caption_cmd->add_option("--frames-root", frames_root, "Frame location for MSR-VTT style manifests");

    auto *prefix_cmd = app.add_subcommand("prefix-baseline", "Caption with retrieved sentences as a text prefix");
    add_common(prefix_cmd, common);
    prefix_cmd->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    prefix_cmd->add_option("--frames-root", frames_root, "Frame location for MSR-VTT style manifests");

    auto *eval_cmd = app.add_subcommand("evaluate", "Score a results file against manifest references");
    std::string results_path;
    eval_cmd->add_option("--results", results_path, "results.json from caption")->required();
    eval_cmd->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    eval_cmd->add_option("--out", common.out, "Directory for metrics.json and metrics.txt");

    auto *ablate_cmd = app.add_subcommand("ablate", "Sweep one hyperparameter and tabulate metrics");
    add_common(ablate_cmd, common);
    std::string axis;
    std::vector<std::string> values;
    ablate_cmd->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    ablate_cmd->add_option("--frames-root", frames_root, "Frame location for MSR-VTT style manifests");
    ablate_cmd->add_option("--axis", axis, "K, L, P, corpus, losses, lambda_clip or anchor")
        ->required()
        ->check(CLI::IsMember(ablation_axes()));
    ablate_cmd->add_option("--values", values, "Comma-separated axis values")->required()->delimiter(',');

    auto *toy_cmd = app.add_subcommand("make-toy", "Write a small synthetic dataset");
    std::string toy_out = "toy";
    ToyWorldOptions toy;
    toy_cmd->add_option("--out", toy_out, "Output directory");
    toy_cmd->add_option("--videos", toy.videos, "Number of videos")->check(CLI::PositiveNumber);
    toy_cmd->add_option("--seed", toy.seed, "Dataset seed");

    auto *serve_cmd = app.add_subcommand("serve", "Serve the configured backends over HTTP");
    add_common(serve_cmd, common);
    std::string host = "127.0.0.1";
    int port = 8080;
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--port", port, "Port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const ManifestOptions manifest_options{frames_root, true};
        if (*index_cmd) {
            RunConfig config = resolve_config(common);
            if (!corpus_path.empty()) {
                config.corpus_path = fs::absolute(corpus_path).string();
            }
            if (config.corpus_path == kManifestReferencesCorpus) {
                throw ConfigError("index: give --corpus or set corpus.path to a file");
            }
            const BackendSuite backends = make_backends(config);
            const CorpusIndex index = load_or_build_corpus(config, DatasetManifest{}, *backends.video_encoder);
            const fs::path out = common.out.empty() ? fs::path(config.output_dir) / "index" : fs::path(common.out);
            save_index(index, out);
            std::cout << "indexed " << index.size() << " sentences into " << out.string();
            if (index.skipped_empty > 0) {
                std::cout << " (skipped " << index.skipped_empty << " blank lines)";
            }
            std::cout << "\n";
        } else if (*caption_cmd || *prefix_cmd) {
            const RunConfig config = resolve_config(common);
            const DatasetManifest manifest = load_manifest(manifest_path, manifest_options);
            const CaptionRun run = *prefix_cmd ? run_prefix_baseline(config, manifest) : run_caption(config, manifest);
            RunConfig written = config;
            if (*prefix_cmd) {
                written.mode = DecodeMode::prefix;
            }
            return report_caption(run, written);
        } else if (*eval_cmd) {
            const DatasetManifest manifest = load_manifest(manifest_path, {frames_root, false});
            const EvaluationReport report = run_evaluate(read_json_file(results_path), manifest);
            for (const auto &w : report.metrics.warnings) {
                std::cerr << "warning: " << w << "\n";
            }
            std::cout << report.table();
            if (!common.out.empty()) {
                fs::create_directories(common.out);
                write_text_file(fs::path(common.out) / "metrics.json", report.to_json().dump(2) + "\n");
                write_text_file(fs::path(common.out) / "metrics.txt", report.table());
            }
        } else if (*ablate_cmd) {
            const RunConfig config = resolve_config(common);
            const DatasetManifest manifest = load_manifest(manifest_path, manifest_options);
            const fs::path out = common.out.empty() ? fs::path(config.output_dir) / ("ablate_" + axis) : fs::path(common.out);
            const AblationReport report = run_ablation(config, manifest, axis, values, out);
            std::cout << report.table();
            std::cout << "wrote " << (out / "ablation.json").string() << " and plots in " << out.string() << "\n";
        } else if (*toy_cmd) {
            const ToyWorld world = write_toy_world(toy_out, toy);
            std::cout << "wrote " << world.manifest.entries.size() << " videos to " << toy_out << "\n";
        } else if (*serve_cmd) {
            const RunConfig config = resolve_config(common);
            if (config.backend.kind == BackendKind::integration) {
                throw ConfigError("serve: pick a local backend (toy or files)");
            }
            BackendServer server(make_backends(config));
            std::cout << "serving " << to_string(config.backend.kind) << " backends on " << host << ":" << port << "\n";
            server.listen(host, port);
        }
    } catch (const DataError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InputError &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
