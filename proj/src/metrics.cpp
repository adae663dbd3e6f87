// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <set>
#include <unordered_map>

#include "recap/errors.hpp"
#include "recap/text.hpp"

namespace recap {

namespace {

constexpr int kMaxOrder = 4;
constexpr double kCiderSigma = 6.0;
constexpr double kRougeBeta = 1.2;

using Words = std::vector<std::string>;
using NgramCounts = std::unordered_map<std::string, int>;

NgramCounts ngram_counts(const Words &words, int n) {
    NgramCounts counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= words.size(); ++i) {
        std::string key = words[i];
        for (int j = 1; j < n; ++j) {
            key += ' ';
            key += words[i + static_cast<std::size_t>(j)];
        }
        ++counts[key];
    }
    return counts;
}

std::size_t lcs_length(const Words &a, const Words &b) {
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// One tf-idf vector per n-gram order.
struct CiderVector {
    std::array<std::unordered_map<std::string, double>, kMaxOrder> weights;
    std::array<double, kMaxOrder> norms{};
    double length = 0.0;
};

}  // namespace

void validate_eval_corpus(const EvalCorpus &corpus) {
    if (corpus.empty()) {
        throw InputError("metrics: empty corpus");
    }
    for (const auto &[id, item] : corpus) {
        const bool ok = std::any_of(item.references.begin(), item.references.end(),
                                    [](const std::string &r) { return !is_blank(r); });
        if (!ok) {
            throw InputError("metrics: item '" + id + "' has no non-empty reference");
        }
    }
}

double bleu4(const EvalCorpus &corpus) {
    validate_eval_corpus(corpus);
    std::array<double, kMaxOrder> matches{};
    std::array<double, kMaxOrder> totals{};
    double cand_len = 0.0;
    double ref_len = 0.0;
    for (const auto &[id, item] : corpus) {
        const Words cand = normalized_words(item.candidate);
        std::vector<Words> refs;
        for (const auto &r : item.references) {
            refs.push_back(normalized_words(r));
        }
        std::size_t closest = refs.front().size();
        for (const auto &r : refs) {
            const auto d = [&](std::size_t len) { return len > cand.size() ? len - cand.size() : cand.size() - len; };
            if (d(r.size()) < d(closest) || (d(r.size()) == d(closest) && r.size() < closest)) {
                closest = r.size();
            }
        }
        cand_len += static_cast<double>(cand.size());
        ref_len += static_cast<double>(closest);
        for (int n = 1; n <= kMaxOrder; ++n) {
            const NgramCounts c = ngram_counts(cand, n);
            NgramCounts max_ref;
            for (const auto &r : refs) {
                for (const auto &[g, cnt] : ngram_counts(r, n)) {
                    max_ref[g] = std::max(max_ref[g], cnt);
                }
            }
            for (const auto &[g, cnt] : c) {
                const auto it = max_ref.find(g);
                matches[n - 1] += std::min(cnt, it == max_ref.end() ? 0 : it->second);
                totals[n - 1] += cnt;
            }
        }
    }
    double log_sum = 0.0;
    for (int n = 0; n < kMaxOrder; ++n) {
        if (matches[n] == 0.0 || totals[n] == 0.0) {
            return 0.0;
        }
        log_sum += std::log(matches[n] / totals[n]) / kMaxOrder;
    }
    const double bp = cand_len > ref_len ? 1.0 : std::exp(1.0 - ref_len / cand_len);
    return bp * std::exp(log_sum);
}

double rouge_l(const EvalCorpus &corpus) {
    validate_eval_corpus(corpus);
    const double beta2 = kRougeBeta * kRougeBeta;
    double total = 0.0;
    for (const auto &[id, item] : corpus) {
        const Words cand = normalized_words(item.candidate);
        double best = 0.0;
        for (const auto &ref_text : item.references) {
            const Words ref = normalized_words(ref_text);
            const auto lcs = static_cast<double>(lcs_length(cand, ref));
            if (lcs == 0.0) {
                continue;
            }
            const double p = lcs / static_cast<double>(cand.size());
            const double r = lcs / static_cast<double>(ref.size());
            best = std::max(best, (1.0 + beta2) * p * r / (r + beta2 * p));
        }
        total += best;
    }
    return total / static_cast<double>(corpus.size());
}

std::vector<double> cider_d_per_item(const EvalCorpus &corpus) {
    validate_eval_corpus(corpus);
    struct Cooked {
        std::array<NgramCounts, kMaxOrder> test;
        std::vector<std::array<NgramCounts, kMaxOrder>> refs;
    };
    auto cook = [](const std::string &text) {
        const Words w = normalized_words(text);
        std::array<NgramCounts, kMaxOrder> out;
        for (int n = 1; n <= kMaxOrder; ++n) {
            out[n - 1] = ngram_counts(w, n);
        }
        return out;
    };
    std::vector<Cooked> cooked;
    std::unordered_map<std::string, double> doc_freq;
    for (const auto &[id, item] : corpus) {
        Cooked c{cook(item.candidate), {}};
        std::set<std::string> seen;
        for (const auto &r : item.references) {
            c.refs.push_back(cook(r));
            for (const auto &order : c.refs.back()) {
                for (const auto &[g, cnt] : order) {
                    seen.insert(g);
                }
            }
        }
        for (const auto &g : seen) {
            doc_freq[g] += 1.0;
        }
        cooked.push_back(std::move(c));
    }

    const double ref_len = std::log(static_cast<double>(corpus.size()));
    auto to_vector = [&](const std::array<NgramCounts, kMaxOrder> &counts) {
        CiderVector v;
        for (int n = 0; n < kMaxOrder; ++n) {
            for (const auto &[g, tf] : counts[n]) {
                const auto it = doc_freq.find(g);
                const double df = std::log(std::max(1.0, it == doc_freq.end() ? 0.0 : it->second));
                const double w = static_cast<double>(tf) * (ref_len - df);
                v.weights[n][g] = w;
                v.norms[n] += w * w;
                // The reference scorer measures length in bigram occurrences.
                if (n == 1) {
                    v.length += tf;
                }
            }
            v.norms[n] = std::sqrt(v.norms[n]);
        }
        return v;
    };
    auto similarity = [](const CiderVector &hyp, const CiderVector &ref) {
        const double delta = hyp.length - ref.length;
        std::array<double, kMaxOrder> val{};
        for (int n = 0; n < kMaxOrder; ++n) {
            for (const auto &[g, w] : hyp.weights[n]) {
                const auto it = ref.weights[n].find(g);
                if (it != ref.weights[n].end()) {
                    val[n] += std::min(w, it->second) * it->second;
                }
            }
            if (hyp.norms[n] != 0.0 && ref.norms[n] != 0.0) {
                val[n] /= hyp.norms[n] * ref.norms[n];
            }
            val[n] *= std::exp(-(delta * delta) / (2.0 * kCiderSigma * kCiderSigma));
        }
        return val;
    };

    std::vector<double> scores;
    scores.reserve(cooked.size());
    for (const auto &c : cooked) {
        const CiderVector hyp = to_vector(c.test);
        std::array<double, kMaxOrder> acc{};
        for (const auto &r : c.refs) {
            const auto s = similarity(hyp, to_vector(r));
            for (int n = 0; n < kMaxOrder; ++n) {
                acc[n] += s[n];
            }
        }
        double mean = 0.0;
        for (double a : acc) {
            mean += a;
        }
        mean /= kMaxOrder;
        mean /= static_cast<double>(c.refs.size());
        scores.push_back(mean * 10.0);
    }
    return scores;
}

double cider_d(const EvalCorpus &corpus) {
    const auto per_item = cider_d_per_item(corpus);
    double total = 0.0;
    for (double s : per_item) {
        total += s;
    }
    return total / static_cast<double>(per_item.size());
}

MetricReport evaluate_corpus(const EvalCorpus &corpus) {
    validate_eval_corpus(corpus);
    MetricReport report;
    report.items = corpus.size();
    if (corpus.size() == 1) {
        report.warnings.emplace_back("CIDEr-D on a single item: document frequencies are degenerate");
    }
    for (const auto &[id, item] : corpus) {
        if (is_blank(item.candidate)) {
            report.warnings.push_back("empty candidate for '" + id + "'");
        }
    }
    report.bleu4 = bleu4(corpus);
    report.rouge_l = rouge_l(corpus);
    report.cider = cider_d(corpus);
    return report;
}

}  // namespace recap
