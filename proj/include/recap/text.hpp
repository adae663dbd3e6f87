// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "recap/embedding.hpp"

namespace recap {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
bool is_blank(std::string_view s);

/// Lowercases, removes ASCII punctuation, splits on whitespace. This is the
/// single tokenization used by the caption metrics and word sampling.
std::vector<std::string> normalized_words(std::string_view text);

std::vector<std::string> split(std::string_view s, char sep);

/// Whitespace + punctuation tokenizer over a fixed vocabulary. Id 0 is `<unk>`.
class Tokenizer {
  public:
    explicit Tokenizer(std::vector<std::string> vocabulary);

    [[nodiscard]] std::vector<TokenId> encode(std::string_view text) const;
    [[nodiscard]] std::string decode(std::span<const TokenId> tokens) const;
    [[nodiscard]] const std::string &token_text(TokenId id) const;
    [[nodiscard]] TokenId id_of(std::string_view word) const;  ///< unk_id() when absent
    [[nodiscard]] std::size_t size() const { return vocab_.size(); }
    [[nodiscard]] const std::vector<std::string> &vocabulary() const { return vocab_; }
    [[nodiscard]] bool contains(TokenId id) const { return id >= 0 && static_cast<std::size_t>(id) < vocab_.size(); }

    static constexpr TokenId unk_id() { return 0; }

  private:
    std::vector<std::string> vocab_;
    std::vector<std::pair<std::string, TokenId>> sorted_;
};

/// The bundled vocabulary used by the toy language model.
const std::vector<std::string> &default_toy_vocabulary();

}  // namespace recap
