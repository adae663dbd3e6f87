// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "recap/errors.hpp"

namespace recap {

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ConfigError("dot: dimension mismatch " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double log_sum_exp(std::span<const double> x) {
    if (x.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double m = *std::max_element(x.begin(), x.end());
    double acc = 0.0;
    for (double v : x) {
        acc += std::exp(v - m);
    }
    return m + std::log(acc);
}

Vector softmax(std::span<const double> logits) {
    Vector out(logits.size());
    if (logits.empty()) {
        return out;
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        total += out[i];
    }
    for (double &v : out) {
        v /= total;
    }
    return out;
}

bool is_distribution(std::span<const double> p, double tolerance) {
    if (p.empty()) {
        return false;
    }
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            return false;
        }
        total += v;
    }
    return std::abs(total - 1.0) <= tolerance;
}

EmbeddingVector EmbeddingVector::normalized(Vector raw) {
    if (raw.empty()) {
        throw InputError("embedding: empty vector");
    }
    if (!all_finite(raw)) {
        throw InputError("embedding: non-finite value");
    }
    const double norm = l2_norm(raw);
    if (norm == 0.0) {
        throw InputError("embedding: zero vector cannot be normalized");
    }
    for (double &v : raw) {
        v /= norm;
    }
    return EmbeddingVector(std::move(raw));
}

EmbeddingVector EmbeddingVector::from_unit(Vector unit) {
    if (unit.empty() || !all_finite(unit) || std::abs(l2_norm(unit) - 1.0) > 1e-9) {
        throw InputError("embedding: expected a finite unit vector");
    }
    return EmbeddingVector(std::move(unit));
}

double EmbeddingVector::dot(const EmbeddingVector &other) const { return recap::dot(values_, other.values_); }

TokenDistribution TokenDistribution::from_logits(std::span<const double> logits) {
    if (logits.empty()) {
        throw InputError("token distribution: empty vocabulary");
    }
    if (!all_finite(logits)) {
        throw InputError("token distribution: non-finite logits");
    }
    return TokenDistribution(softmax(logits));
}

TokenDistribution TokenDistribution::from_probabilities(Vector probabilities) {
    if (!is_distribution(probabilities)) {
        throw InputError("token distribution: entries must be >= 0 and sum to 1");
    }
    return TokenDistribution(std::move(probabilities));
}

Fnv1a &Fnv1a::bytes(const void *data, std::size_t size) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < size; ++i) {
        state_ ^= p[i];
        state_ *= 0x100000001b3ULL;
    }
    return *this;
}

Fnv1a &Fnv1a::str(std::string_view s) {
    u64(s.size());
    return bytes(s.data(), s.size());
}

Fnv1a &Fnv1a::u64(std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) {
        buf[i] = static_cast<unsigned char>(v >> (8 * i));
    }
    return bytes(buf, 8);
}

Fnv1a &Fnv1a::f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }

Fnv1a &Fnv1a::f64s(std::span<const double> v) {
    u64(v.size());
    for (double x : v) {
        f64(x);
    }
    return *this;
}

std::uint64_t fnv1a(std::string_view s) {
    Fnv1a h;
    h.bytes(s.data(), s.size());
    return h.digest();
}

std::uint64_t splitmix64(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace recap
