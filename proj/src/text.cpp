// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/text.hpp"

#include <algorithm>
#include <cctype>

#include "recap/errors.hpp"

namespace recap {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char &c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

std::vector<std::string> normalized_words(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    for (char c : text) {
        if (is_space(c)) {
            if (!current.empty()) {
                words.push_back(std::move(current));
                current.clear();
            }
        } else if (!is_punct(c)) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (!current.empty()) {
        words.push_back(std::move(current));
    }
    return words;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

Tokenizer::Tokenizer(std::vector<std::string> vocabulary) : vocab_(std::move(vocabulary)) {
    if (vocab_.empty() || vocab_.front() != "<unk>") {
        throw ConfigError("tokenizer: vocabulary must start with <unk>");
    }
    sorted_.reserve(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        sorted_.emplace_back(vocab_[i], static_cast<TokenId>(i));
    }
    std::sort(sorted_.begin(), sorted_.end());
    const auto dup = std::adjacent_find(sorted_.begin(), sorted_.end(),
                                        [](const auto &a, const auto &b) { return a.first == b.first; });
    if (dup != sorted_.end()) {
        throw ConfigError("tokenizer: duplicate vocabulary entry '" + dup->first + "'");
    }
}

TokenId Tokenizer::id_of(std::string_view word) const {
    const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), word,
                                     [](const auto &entry, std::string_view w) { return entry.first < w; });
    if (it != sorted_.end() && it->first == word) {
        return it->second;
    }
    return unk_id();
}

std::vector<TokenId> Tokenizer::encode(std::string_view text) const {
    std::vector<TokenId> ids;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            ids.push_back(id_of(word));
            word.clear();
        }
    };
    for (char c : text) {
        if (is_space(c)) {
            flush();
        } else if (is_punct(c) && c != '\'') {
            flush();
            ids.push_back(id_of(std::string_view(&c, 1)));
        } else {
            word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    flush();
    return ids;
}

const std::string &Tokenizer::token_text(TokenId id) const {
    if (!contains(id)) {
        throw InputError("tokenizer: token id " + std::to_string(id) + " out of range");
    }
    return vocab_[static_cast<std::size_t>(id)];
}

std::string Tokenizer::decode(std::span<const TokenId> tokens) const {
    std::string out;
    for (TokenId id : tokens) {
        const std::string &t = token_text(id);
        const bool attach = t.size() == 1 && is_punct(t[0]);
        if (!out.empty() && !attach) {
            out.push_back(' ');
        }
        out += t;
    }
    return out;
}

const std::vector<std::string> &default_toy_vocabulary() {
    static const std::vector<std::string> vocab = {
        "<unk>", ".", ",",
        // function words
        "a", "an", "the", "is", "are", "was", "of", "in", "on", "with", "and", "to", "at", "by", "for", "from",
        "into", "while", "his", "her", "their", "its", "some", "two", "three", "someone", "there", "it", "up",
        "down", "out", "over", "near", "inside", "outside", "together", "very", "small", "big", "young", "old",
        "red", "white", "black", "blue", "green", "little", "large",
        // prompt words
        "video", "showing", "shows", "describes",
        // nouns
        "man", "woman", "person", "people", "boy", "girl", "boys", "girls", "men", "women", "child", "children",
        "cat", "dog", "kitten", "puppy", "horse", "bird", "fish", "ball", "toy", "bread", "loaf", "knife",
        "kitchen", "food", "table", "tennis", "ping", "pong", "court", "guitar", "song", "stage", "music",
        "car", "road", "street", "park", "grass", "field", "water", "pool", "beach", "sea", "river", "boat",
        "game", "soccer", "basketball", "team", "player", "players", "crowd", "room", "house", "tree",
        "snow", "mountain", "bike", "bicycle", "computer", "phone", "camera", "book", "paper", "news",
        "reporter", "cartoon", "character", "show", "baby", "vegetables", "onion", "pan", "egg", "meat",
        "dance", "dancer", "singer", "band", "piano", "cook", "chef", "recipe", "makeup", "hair", "face",
        // verbs
        "cutting", "cuts", "cut", "slices", "slicing", "slice", "playing", "plays", "play", "singing", "sings",
        "sing", "running", "runs", "run", "jumping", "jumps", "jump", "cooking", "cooks", "talking", "talks",
        "talk", "walking", "walks", "walk", "driving", "drives", "drive", "swimming", "swims", "swim",
        "dancing", "dances", "riding", "rides", "ride", "eating", "eats", "eat", "reading", "reads",
        "writing", "writes", "sitting", "sits", "standing", "stands", "holding", "holds", "throwing",
        "throws", "catching", "catches", "chasing", "chases", "mixing", "mixes", "frying", "fries",
        "performing", "performs", "watching", "watches", "looking", "looks", "explaining", "explains",
        "putting", "puts", "applying", "applies", "shown", "being", "has", "have", "doing", "does",
    };
    return vocab;
}

}  // namespace recap
