// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/soft_prompt.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "recap/errors.hpp"

namespace recap {

SoftPrompt::SoftPrompt(std::vector<Vector> rows) : rows_(std::move(rows)) {
    if (rows_.empty() || rows_.front().empty()) {
        throw ConfigError("soft prompt: need at least one non-empty row");
    }
    for (const auto &r : rows_) {
        if (r.size() != rows_.front().size()) {
            throw ConfigError("soft prompt: rows must share one width");
        }
    }
    state_.first_moment.assign(rows_.size(), Vector(width(), 0.0));
    state_.second_moment.assign(rows_.size(), Vector(width(), 0.0));
}

bool SoftPrompt::is_finite() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const Vector &r) { return all_finite(r); });
}

bool SoftPrompt::apply_update(const std::vector<Vector> &gradient, const AdamWOptions &o) {
    if (gradient.size() != rows_.size()) {
        return false;
    }
    for (const auto &g : gradient) {
        if (g.size() != width() || !all_finite(g)) {
            return false;
        }
    }
    const std::uint64_t t = state_.step + 1;
    const double bias1 = 1.0 - std::pow(o.beta1, static_cast<double>(t));
    const double bias2 = 1.0 - std::pow(o.beta2, static_cast<double>(t));
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        Vector &w = rows_[r];
        Vector &m = state_.first_moment[r];
        Vector &v = state_.second_moment[r];
        const Vector &g = gradient[r];
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] *= 1.0 - o.lr * o.weight_decay;
            m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g[i];
            v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bias1;
            const double v_hat = v[i] / bias2;
            w[i] -= o.lr * m_hat / (std::sqrt(v_hat) + o.eps);
        }
    }
    state_.step = t;
    return true;
}

const std::vector<std::string> &default_prompt_set() {
    static const std::vector<std::string> prompts = {"Video showing", "Video describes", "Video of", "Video shows"};
    return prompts;
}

HardPrompt make_hard_prompt(std::string_view text, const Tokenizer &tokenizer, std::span<const std::string> prompt_set) {
    if (std::find(prompt_set.begin(), prompt_set.end(), text) == prompt_set.end()) {
        throw ConfigError("hard prompt '" + std::string(text) + "' is not in the prompt set");
    }
    HardPrompt hard{std::string(text), tokenizer.encode(text)};
    if (hard.tokens.empty()) {
        throw ConfigError("hard prompt '" + hard.text + "' has no tokens");
    }
    return hard;
}

SoftPrompt init_soft_prompt(const HardPrompt &hard, std::size_t p, std::uint64_t seed, const CausalLm &lm,
                            double sigma) {
    if (p == 0) {
        throw ConfigError("init_soft_prompt: P must be >= 1");
    }
    if (hard.tokens.empty()) {
        throw ConfigError("init_soft_prompt: hard prompt has no tokens");
    }
    const std::size_t width = lm.embedding_width();
    Vector mean(width, 0.0);
    for (TokenId id : hard.tokens) {
        const Vector e = lm.token_embedding(id);
        for (std::size_t i = 0; i < width; ++i) {
            mean[i] += e[i];
        }
    }
    for (double &x : mean) {
        x /= static_cast<double>(hard.tokens.size());
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<Vector> rows(p, mean);
    for (auto &row : rows) {
        for (double &x : row) {
            x += sigma * noise(rng);
        }
    }
    return SoftPrompt(std::move(rows));
}

bool optimize_step(SoftPrompt &soft, const std::vector<Vector> &gradient, const AdamWOptions &options) {
    return soft.apply_update(gradient, options);
}

}  // namespace recap
