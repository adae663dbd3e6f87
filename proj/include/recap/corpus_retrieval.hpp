// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recap/backends.hpp"
#include "recap/embedding.hpp"

namespace recap {

inline constexpr std::size_t kDefaultRetrievedSentences = 15;
inline constexpr std::size_t kDefaultFrequentWords = 5;

/// Immutable sentence-embedding index over a text corpus.
struct CorpusIndex {
    std::string corpus_id;
    std::vector<std::string> sentences;
    std::vector<EmbeddingVector> embeddings;  ///< one row per sentence
    std::size_t skipped_empty = 0;            ///< blank corpus lines dropped at build time

    [[nodiscard]] std::size_t size() const { return sentences.size(); }
    [[nodiscard]] std::size_t dim() const { return embeddings.empty() ? 0 : embeddings.front().dim(); }
};

/// Embeds every non-blank sentence in corpus order. Throws InputError on an
/// empty corpus (or one that is entirely blank).
CorpusIndex build_index(std::span<const std::string> corpus, const TextEncoder &encoder, std::string corpus_id);

/// Plain text (one sentence per line) or JSON lines with a "text" field.
std::vector<std::string> load_corpus_file(const std::filesystem::path &path);

/// Directory layout: meta.json {corpus_id, D, count}, embeddings.f32, sentences.txt.
void save_index(const CorpusIndex &index, const std::filesystem::path &dir);
CorpusIndex load_index(const std::filesystem::path &dir);
bool is_index_directory(const std::filesystem::path &path);

struct ScoredSentence {
    std::string text;
    double score = 0.0;
    std::size_t row = 0;  ///< position in the index
};

/// Top min(K, |index|) sentences by dot product, descending; ties keep corpus order.
std::vector<ScoredSentence> retrieve(const EmbeddingVector &query, const CorpusIndex &index, std::size_t k);

enum class PosTag { noun, verb, other };

class PosTagger {
  public:
    virtual ~PosTagger() = default;
    /// `word` is lowercase with punctuation removed.
    [[nodiscard]] virtual PosTag tag(std::string_view word) const = 0;
};

/// Bundled noun/verb word lists plus suffix heuristics. Unknown words that
/// match no heuristic are tagged `other`.
class LexiconTagger final : public PosTagger {
  public:
    [[nodiscard]] PosTag tag(std::string_view word) const override;
};

const PosTagger &default_tagger();

/// Light suffix stripper: -s, -es, -ies, -ing, -ed, undoing a doubled final consonant.
std::string light_stem(std::string_view word);

struct WordCount {
    std::string word;
    std::size_t count = 0;

    friend bool operator==(const WordCount &, const WordCount &) = default;
};

/// Counts stem-folded noun/verb occurrences across `sentences` and returns the
/// top `limit` by count (ties: lexicographic on the stem). Each entry reports
/// its most frequent surface form.
std::vector<WordCount> sample_high_frequency_words(std::span<const std::string> sentences, std::size_t limit,
                                                   const PosTagger &tagger = default_tagger());

/// Retrieved sentences and frequent words attached to one video.
struct RetrievalContext {
    std::vector<ScoredSentence> sentences;
    std::vector<WordCount> words;

    [[nodiscard]] std::vector<std::string> sentence_texts() const;
    [[nodiscard]] std::vector<std::string> word_texts() const;
};

RetrievalContext build_retrieval_context(const EmbeddingVector &video, const CorpusIndex &index, std::size_t k,
                                         std::size_t l, const PosTagger &tagger = default_tagger());

}  // namespace recap
