// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace recap {

using TokenId = std::int32_t;
using Vector = std::vector<double>;

/// Unit-normalized dense vector in a backend's semantic space.
class EmbeddingVector {
  public:
    EmbeddingVector() = default;

    /// L2-normalizes `raw`. Throws InputError on an empty, zero or non-finite vector.
    static EmbeddingVector normalized(Vector raw);
    /// Keeps `unit` bit-for-bit; throws InputError unless it is finite with norm 1 (1e-9).
    static EmbeddingVector from_unit(Vector unit);

    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::size_t dim() const { return values_.size(); }
    [[nodiscard]] double dot(const EmbeddingVector &other) const;

    friend bool operator==(const EmbeddingVector &, const EmbeddingVector &) = default;

  private:
    explicit EmbeddingVector(Vector values) : values_(std::move(values)) {}
    Vector values_;
};

/// Next-token probabilities over the full vocabulary.
class TokenDistribution {
  public:
    TokenDistribution() = default;

    static TokenDistribution from_logits(std::span<const double> logits);
    /// Validates non-negativity and unit mass (1e-6).
    static TokenDistribution from_probabilities(Vector probabilities);

    [[nodiscard]] std::span<const double> probabilities() const { return probs_; }
    [[nodiscard]] std::size_t vocab_size() const { return probs_.size(); }
    [[nodiscard]] double operator[](TokenId id) const { return probs_.at(static_cast<std::size_t>(id)); }

  private:
    explicit TokenDistribution(Vector p) : probs_(std::move(p)) {}
    Vector probs_;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);
double log_sum_exp(std::span<const double> x);
Vector softmax(std::span<const double> logits);
bool all_finite(std::span<const double> v);

/// True when entries are >= 0 and sum to 1 within `tolerance`.
bool is_distribution(std::span<const double> p, double tolerance = 1e-6);

/// Order-sensitive 64-bit FNV-1a; stable across processes and platforms.
class Fnv1a {
  public:
    Fnv1a &bytes(const void *data, std::size_t size);
    Fnv1a &str(std::string_view s);
    Fnv1a &u64(std::uint64_t v);
    Fnv1a &f64(double v);
    Fnv1a &f64s(std::span<const double> v);
    [[nodiscard]] std::uint64_t digest() const { return state_; }

  private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fnv1a(std::string_view s);

/// splitmix64 step; used to derive seeded pseudo-random streams from hashes.
std::uint64_t splitmix64(std::uint64_t &state);

}  // namespace recap
