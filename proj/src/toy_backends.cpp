// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/toy_backends.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "recap/errors.hpp"

namespace recap {

namespace {

constexpr double kPositionScale = 0.5;
constexpr double kPeriodBias = 1.0;

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
double sigmoid(double x) {
    if (x >= 0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

DenseMatrix gaussian_matrix(std::mt19937_64 &rng, std::size_t rows, std::size_t cols, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    DenseMatrix m{rows, cols, Vector(rows * cols)};
    for (double &v : m.data) {
        v = dist(rng);
    }
    return m;
}

void add_scaled(Vector &acc, std::span<const double> x, double scale = 1.0) {
    for (std::size_t i = 0; i < acc.size(); ++i) {
        acc[i] += scale * x[i];
    }
}

void check_frame_dim(const Frame &frame, std::size_t dim) {
    if (frame.features.size() != dim) {
        throw ConfigError("frame '" + frame.id + "' has " + std::to_string(frame.features.size()) +
                          " features, backend expects " + std::to_string(dim));
    }
}

std::uint64_t role_checksum(std::string_view role, std::uint64_t seed, std::size_t dim) {
    return Fnv1a().str(role).u64(seed).u64(dim).digest();
}

}  // namespace

HashTextEmbedder::HashTextEmbedder(std::uint64_t seed, std::size_t dim) : seed_(seed), dim_(dim) {
    if (dim == 0) {
        throw ConfigError("hash embedder: dimension must be positive");
    }
}

Vector HashTextEmbedder::feature_vector(std::string_view feature) const {
    std::uint64_t state = Fnv1a().u64(seed_).str(feature).digest();
    Vector v(dim_);
    for (double &x : v) {
        const std::uint64_t bits = splitmix64(state) >> 11;
        x = static_cast<double>(bits) * 0x1.0p-52 - 1.0;
    }
    return v;
}

EmbeddingVector HashTextEmbedder::embed(std::string_view text) const {
    auto words = normalized_words(text);
    if (words.empty()) {
        words.emplace_back("<empty>");
    }
    Vector acc(dim_, 0.0);
    for (const auto &w : words) {
        add_scaled(acc, feature_vector(w));
    }
    return EmbeddingVector::normalized(std::move(acc));
}

EmbeddingVector ToyVideoEncoder::encode_frames(std::span<const Frame> frames) const {
    if (frames.empty()) {
        throw InputError("video encoder: empty frame list");
    }
    Vector acc(text_.dim(), 0.0);
    for (const auto &f : frames) {
        check_frame_dim(f, text_.dim());
        add_scaled(acc, EmbeddingVector::normalized(f.features).values());
    }
    return EmbeddingVector::normalized(std::move(acc));
}

std::uint64_t ToyVideoEncoder::parameter_checksum() const {
    return role_checksum("toy-video", text_.seed(), text_.dim());
}

EmbeddingVector ToyImageTextScorer::embed_image(const Frame &frame) const {
    check_frame_dim(frame, text_.dim());
    return EmbeddingVector::normalized(frame.features);
}

std::uint64_t ToyImageTextScorer::parameter_checksum() const {
    return role_checksum("toy-image-text", text_.seed(), text_.dim());
}

double ToySentenceScorer::similarity(std::string_view a, std::string_view b) const {
    if (is_blank(a) || is_blank(b)) {
        throw InputError("sentence similarity: empty text");
    }
    return std::clamp(text_.embed(a).dot(text_.embed(b)), -1.0, 1.0);
}

std::vector<double> ToySentenceScorer::similarity_matrix(std::span<const std::string> a,
                                                         std::span<const std::string> b) const {
    auto embed_all = [this](std::span<const std::string> texts) {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto &t : texts) {
            if (is_blank(t)) {
                throw InputError("sentence similarity: empty text");
            }
            out.push_back(text_.embed(t));
        }
        return out;
    };
    const auto ea = embed_all(a);
    const auto eb = embed_all(b);
    std::vector<double> out;
    out.reserve(ea.size() * eb.size());
    for (const auto &x : ea) {
        for (const auto &y : eb) {
            out.push_back(std::clamp(x.dot(y), -1.0, 1.0));
        }
    }
    return out;
}

std::uint64_t ToySentenceScorer::parameter_checksum() const {
    return role_checksum("toy-sentence", text_.seed(), text_.dim());
}

Vector DenseMatrix::apply(std::span<const double> x) const {
    Vector y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double *w = data.data() + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            acc += w[c] * x[c];
        }
        y[r] = acc;
    }
    return y;
}

Vector DenseMatrix::apply_transposed(std::span<const double> y) const {
    Vector x(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double *w = data.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            x[c] += w[c] * y[r];
        }
    }
    return x;
}

struct ToyCausalLm::Activations {
    std::vector<Vector> x;  // inputs with positions added
    std::vector<Vector> k, v, fk;
    std::vector<double> a;
    Vector q, fq, h, r;
    double a_sum = 0.0;
    Vector logits;
};

ToyCausalLm::ToyCausalLm(std::size_t width, std::vector<std::string> vocabulary)
    : width_(width), tokenizer_(std::move(vocabulary)) {
    if (width == 0) {
        throw ConfigError("toy lm: width must be positive");
    }
}

ToyCausalLm::ToyCausalLm(std::uint64_t seed, std::size_t width, std::vector<std::string> vocabulary)
    : ToyCausalLm(width, std::move(vocabulary)) {
    std::mt19937_64 rng(seed);
    const double s = 1.0 / std::sqrt(static_cast<double>(width));
    const std::size_t vocab = tokenizer_.size();
    embeddings_ = gaussian_matrix(rng, vocab, width, s);
    wq_ = gaussian_matrix(rng, width, width, s);
    wk_ = gaussian_matrix(rng, width, width, s);
    wv_ = gaussian_matrix(rng, width, width, s);
    wo_ = gaussian_matrix(rng, width, width, s);
    std::normal_distribution<double> bias_dist(0.0, 0.5);
    bias_.resize(vocab);
    for (double &b : bias_) {
        b = bias_dist(rng);
    }
    bias_[static_cast<std::size_t>(tokenizer_.id_of("."))] += kPeriodBias;
}

ToyCausalLm ToyCausalLm::uniform(std::size_t width, std::vector<std::string> vocabulary) {
    ToyCausalLm lm(width, std::move(vocabulary));
    const std::size_t vocab = lm.tokenizer_.size();
    lm.embeddings_ = DenseMatrix{vocab, width, Vector(vocab * width, 0.1)};
    std::mt19937_64 rng(0);
    const double s = 1.0 / std::sqrt(static_cast<double>(width));
    lm.wq_ = gaussian_matrix(rng, width, width, s);
    lm.wk_ = gaussian_matrix(rng, width, width, s);
    lm.wv_ = gaussian_matrix(rng, width, width, s);
    lm.wo_ = gaussian_matrix(rng, width, width, s);
    lm.bias_.assign(vocab, 0.0);
    return lm;
}

Vector ToyCausalLm::token_embedding(TokenId id) const {
    if (!tokenizer_.contains(id)) {
        throw InputError("toy lm: invalid token id " + std::to_string(id));
    }
    const auto row = embeddings_.row(static_cast<std::size_t>(id));
    return {row.begin(), row.end()};
}

ToyCausalLm::Activations ToyCausalLm::forward(std::span<const Vector> prefix, std::span<const TokenId> tokens) const {
    check_inputs(prefix, tokens);
    Activations act;
    const std::size_t total = prefix.size() + tokens.size();
    act.x.reserve(total);
    for (const auto &p : prefix) {
        act.x.push_back(p);
    }
    for (TokenId id : tokens) {
        act.x.push_back(token_embedding(id));
    }
    for (std::size_t t = 0; t < total; ++t) {
        for (std::size_t i = 0; i < width_; ++i) {
            const double freq = std::pow(10000.0, -static_cast<double>(i - i % 2) / static_cast<double>(width_));
            const double angle = static_cast<double>(t) * freq;
            act.x[t][i] += kPositionScale * (i % 2 == 0 ? std::sin(angle) : std::cos(angle));
        }
    }
    const Vector &last = act.x.back();
    act.q = wq_.apply(last);
    act.fq.resize(width_);
    std::transform(act.q.begin(), act.q.end(), act.fq.begin(), softplus);

    act.h.assign(width_, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        act.k.push_back(wk_.apply(act.x[t]));
        act.v.push_back(wv_.apply(act.x[t]));
        Vector fk(width_);
        std::transform(act.k[t].begin(), act.k[t].end(), fk.begin(), softplus);
        act.a.push_back(dot(act.fq, fk));
        act.fk.push_back(std::move(fk));
        act.a_sum += act.a[t];
        add_scaled(act.h, act.v[t], act.a[t]);
    }
    for (double &x : act.h) {
        x /= act.a_sum;
    }
    act.r = last;
    add_scaled(act.r, wo_.apply(act.h));

    act.logits = embeddings_.apply(act.r);
    for (std::size_t v = 0; v < act.logits.size(); ++v) {
        act.logits[v] = logit_scale_ * act.logits[v] + bias_[v];
    }
    return act;
}

Vector ToyCausalLm::next_logits(std::span<const Vector> prefix, std::span<const TokenId> tokens) const {
    return forward(prefix, tokens).logits;
}

std::vector<Vector> ToyCausalLm::prefix_gradient(std::span<const Vector> prefix, std::span<const TokenId> tokens,
                                                 std::span<const double> grad_logits) const {
    if (grad_logits.size() != tokenizer_.size()) {
        throw ConfigError("toy lm: gradient length does not match vocabulary");
    }
    const Activations act = forward(prefix, tokens);
    const std::size_t total = act.x.size();
    const std::size_t last = total - 1;
    std::vector<Vector> gx(total, Vector(width_, 0.0));

    Vector gr = embeddings_.apply_transposed(grad_logits);
    for (double &g : gr) {
        g *= logit_scale_;
    }
    add_scaled(gx[last], gr);
    const Vector gh = wo_.apply_transposed(gr);

    Vector gfq(width_, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        double ga = 0.0;
        for (std::size_t i = 0; i < width_; ++i) {
            ga += gh[i] * (act.v[t][i] - act.h[i]);
        }
        ga /= act.a_sum;

        Vector gv(gh);
        for (double &g : gv) {
            g *= act.a[t] / act.a_sum;
        }
        add_scaled(gx[t], wv_.apply_transposed(gv));

        Vector gk(width_);
        for (std::size_t i = 0; i < width_; ++i) {
            gk[i] = ga * act.fq[i] * sigmoid(act.k[t][i]);
        }
        add_scaled(gx[t], wk_.apply_transposed(gk));
        add_scaled(gfq, act.fk[t], ga);
    }
    Vector gq(width_);
    for (std::size_t i = 0; i < width_; ++i) {
        gq[i] = gfq[i] * sigmoid(act.q[i]);
    }
    add_scaled(gx[last], wq_.apply_transposed(gq));

    gx.resize(prefix.size());
    return gx;
}

std::uint64_t ToyCausalLm::parameter_checksum() const {
    Fnv1a h;
    h.str("toy-lm").u64(width_).f64(logit_scale_);
    for (const auto &word : tokenizer_.vocabulary()) {
        h.str(word);
    }
    for (const DenseMatrix *m : {&embeddings_, &wq_, &wk_, &wv_, &wo_}) {
        h.u64(m->rows).u64(m->cols).f64s(m->data);
    }
    h.f64s(bias_);
    return h.digest();
}

BackendSuite make_toy_backends(const ToyBackendOptions &options) {
    const std::uint64_t vision_seed = Fnv1a().u64(options.seed).str("vision").digest();
    const std::uint64_t sentence_seed = Fnv1a().u64(options.seed).str("sentence").digest();
    const std::uint64_t lm_seed = Fnv1a().u64(options.seed).str("lm").digest();
    BackendSuite suite;
    suite.video_encoder = std::make_shared<ToyVideoEncoder>(vision_seed, options.vision_dim);
    suite.image_text = std::make_shared<ToyImageTextScorer>(vision_seed, options.vision_dim);
    suite.sentence = std::make_shared<ToySentenceScorer>(sentence_seed, options.sentence_dim);
    suite.lm = std::make_shared<ToyCausalLm>(lm_seed, options.lm_width, default_toy_vocabulary());
    return suite;
}

}  // namespace recap
