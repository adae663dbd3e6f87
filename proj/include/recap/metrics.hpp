// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

namespace recap {

struct EvalItem {
    std::string candidate;
    std::vector<std::string> references;
};

/// video_id -> (candidate, references). Every item needs >= 1 non-blank reference.
using EvalCorpus = std::map<std::string, EvalItem>;

/// Throws InputError for an empty corpus or an item without references.
void validate_eval_corpus(const EvalCorpus &corpus);

/// Corpus-level BLEU-4: uniform weights, clipped counts, closest reference
/// length (shorter on ties) for the brevity penalty, no smoothing.
double bleu4(const EvalCorpus &corpus);

/// Mean over items of the best per-reference LCS F-measure (beta = 1.2).
double rouge_l(const EvalCorpus &corpus);

/// CIDEr-D (n = 1..4, sigma = 6, clipped tf-idf cosine, x10), averaged over items.
double cider_d(const EvalCorpus &corpus);

/// Per-item CIDEr-D scores in corpus (id) order.
std::vector<double> cider_d_per_item(const EvalCorpus &corpus);

struct MetricReport {
    double bleu4 = 0.0;
    double rouge_l = 0.0;
    double cider = 0.0;
    std::size_t items = 0;
    std::vector<std::string> warnings;
};

MetricReport evaluate_corpus(const EvalCorpus &corpus);

}  // namespace recap
