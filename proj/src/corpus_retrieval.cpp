// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/corpus_retrieval.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "recap/errors.hpp"
#include "recap/text.hpp"
#include "recap/vector_blob.hpp"

namespace recap {

namespace fs = std::filesystem;
using json = nlohmann::json;

CorpusIndex build_index(std::span<const std::string> corpus, const TextEncoder &encoder, std::string corpus_id) {
    if (corpus.empty()) {
        throw InputError("build_index: empty corpus");
    }
    CorpusIndex index;
    index.corpus_id = std::move(corpus_id);
    for (const auto &sentence : corpus) {
        if (is_blank(sentence)) {
            ++index.skipped_empty;
            continue;
        }
        index.sentences.emplace_back(trim(sentence));
        index.embeddings.push_back(encoder.encode_text(index.sentences.back()));
    }
    if (index.sentences.empty()) {
        throw InputError("build_index: corpus contains only blank sentences");
    }
    return index;
}

std::vector<std::string> load_corpus_file(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open corpus '" + path.string() + "'");
    }
    std::vector<std::string> lines;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto t = trim(line);
        if (!t.empty() && t.front() == '{') {
            try {
                std::string text = json::parse(t).at("text").get<std::string>();
                // Index directories store one sentence per line.
                std::replace(text.begin(), text.end(), '\n', ' ');
                std::replace(text.begin(), text.end(), '\r', ' ');
                lines.push_back(std::move(text));
            } catch (const json::exception &e) {
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
            }
        } else {
            lines.push_back(line);
        }
    }
    return lines;
}

bool is_index_directory(const fs::path &path) { return fs::is_directory(path) && fs::exists(path / "meta.json"); }

void save_index(const CorpusIndex &index, const fs::path &dir) {
    fs::create_directories(dir);
    std::vector<Vector> rows;
    rows.reserve(index.size());
    for (const auto &e : index.embeddings) {
        rows.emplace_back(e.values().begin(), e.values().end());
    }
    write_vector_blob(dir / "embeddings.f32", rows);
    std::ofstream sentences(dir / "sentences.txt", std::ios::trunc);
    for (const auto &s : index.sentences) {
        sentences << s << '\n';
    }
    const json meta = {{"corpus_id", index.corpus_id}, {"D", index.dim()}, {"count", index.size()}};
    std::ofstream(dir / "meta.json", std::ios::trunc) << meta.dump(2) << '\n';
}

CorpusIndex load_index(const fs::path &dir) {
    std::ifstream meta_in(dir / "meta.json");
    if (!meta_in) {
        throw DataError("index directory '" + dir.string() + "' has no meta.json");
    }
    CorpusIndex index;
    std::size_t dim = 0;
    std::size_t count = 0;
    try {
        const json meta = json::parse(meta_in);
        index.corpus_id = meta.at("corpus_id").get<std::string>();
        dim = meta.at("D").get<std::size_t>();
        count = meta.at("count").get<std::size_t>();
    } catch (const json::exception &e) {
        throw DataError("malformed meta.json in '" + dir.string() + "': " + e.what());
    }
    const auto rows = read_vector_blob(dir / "embeddings.f32");
    std::ifstream sin(dir / "sentences.txt");
    std::string line;
    while (std::getline(sin, line)) {
        index.sentences.push_back(line);
    }
    if (rows.size() != count || index.sentences.size() != count) {
        throw DataError("index '" + dir.string() + "': count mismatch between meta, embeddings and sentences");
    }
    for (const auto &r : rows) {
        if (r.size() != dim) {
            throw DataError("index '" + dir.string() + "': embedding dimension mismatch");
        }
        index.embeddings.push_back(EmbeddingVector::normalized(r));
    }
    return index;
}

std::vector<ScoredSentence> retrieve(const EmbeddingVector &query, const CorpusIndex &index, std::size_t k) {
    if (k == 0) {
        throw InputError("retrieve: K must be >= 1");
    }
    if (index.size() == 0) {
        throw InputError("retrieve: empty index");
    }
    if (query.dim() != index.dim()) {
        throw ConfigError("retrieve: query dimension " + std::to_string(query.dim()) + " vs index dimension " +
                          std::to_string(index.dim()));
    }
    std::vector<double> scores(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        scores[i] = query.dot(index.embeddings[i]);
    }
    std::vector<std::size_t> order(index.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t take = std::min(k, index.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); });
    std::vector<ScoredSentence> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.push_back({index.sentences[order[i]], scores[order[i]], order[i]});
    }
    return out;
}

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool has_vowel(std::string_view s) { return std::any_of(s.begin(), s.end(), is_vowel); }

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string undo_doubling(std::string base) {
    const std::size_t n = base.size();
    if (n >= 3 && base[n - 1] == base[n - 2] && !is_vowel(base[n - 1]) && base[n - 1] != 'l' && base[n - 1] != 's' &&
        base[n - 1] != 'z') {
        base.pop_back();
    }
    return base;
}

const std::set<std::string, std::less<>> &stopwords() {
    static const std::set<std::string, std::less<>> words = {
        "a", "an", "the", "is", "are", "was", "were", "be", "been", "being", "am", "of", "in", "on", "with",
        "and", "or", "to", "at", "by", "for", "from", "into", "while", "his", "her", "their", "its", "some",
        "someone", "there", "it", "up", "down", "out", "over", "near", "inside", "outside", "together", "very",
        "this", "that", "these", "those", "he", "she", "they", "we", "you", "i", "has", "have", "had", "does",
        "do", "did", "doing", "not", "as", "but", "so", "then", "than", "who", "what", "which", "about",
    };
    return words;
}

const std::set<std::string, std::less<>> &noun_lexicon() {
    static const std::set<std::string, std::less<>> words = {
        "man", "men", "woman", "women", "person", "people", "boy", "girl", "child", "children", "baby", "kid",
        "cat", "dog", "kitten", "puppy", "horse", "bird", "fish", "animal", "ball", "toy", "bread", "loaf",
        "knife", "kitchen", "food", "table", "tennis", "ping", "pong", "court", "guitar", "song", "stage",
        "music", "car", "road", "street", "park", "grass", "field", "water", "pool", "beach", "sea", "river",
        "boat", "game", "soccer", "basketball", "football", "team", "player", "crowd", "room", "house", "tree",
        "snow", "mountain", "bike", "bicycle", "computer", "phone", "camera", "book", "paper", "news",
        "reporter", "cartoon", "character", "show", "vegetable", "onion", "pan", "egg", "meat", "dance",
        "dancer", "singer", "band", "piano", "cook", "chef", "recipe", "makeup", "hair", "face", "video",
        "movie", "film", "scene", "interview", "class", "student", "teacher", "lady", "guy", "player",
    };
    return words;
}

const std::set<std::string, std::less<>> &verb_lexicon() {
    static const std::set<std::string, std::less<>> words = {
        "cut", "slice", "chop", "play", "sing", "run", "jump", "cook", "talk", "walk", "drive", "swim",
        "dance", "ride", "eat", "read", "write", "sit", "stand", "hold", "throw", "catch", "chase", "mix",
        "fry", "perform", "watch", "look", "explain", "put", "apply", "show", "make", "take", "give", "go",
        "come", "fall", "fight", "kick", "hit", "climb", "fly", "draw", "paint", "pour", "wash", "open",
        "close", "pet", "feed", "film", "record", "speak", "say", "tell", "use", "shown", "ran", "sang",
        "drove", "swam", "rode", "ate", "sat", "stood", "held", "threw", "caught", "made", "took", "gave",
        "went", "came", "fell", "fought", "flew", "drew", "spoke", "said", "told",
    };
    return words;
}

bool lexicon_has(const std::set<std::string, std::less<>> &lex, std::string_view word) {
    return lex.contains(word) || lex.contains(light_stem(word));
}

}  // namespace

std::string light_stem(std::string_view word) {
    std::string w(word);
    if (w.size() >= 5 && ends_with(w, "ing")) {
        std::string base = w.substr(0, w.size() - 3);
        if (base.size() >= 2 && has_vowel(base)) {
            return undo_doubling(std::move(base));
        }
        return w;
    }
    if (w.size() >= 4 && ends_with(w, "ed")) {
        std::string base = w.substr(0, w.size() - 2);
        if (base.size() >= 3 && has_vowel(base)) {
            return undo_doubling(std::move(base));
        }
        return w;
    }
    if (w.size() >= 5 && ends_with(w, "ies")) {
        return w.substr(0, w.size() - 3) + "y";
    }
    if (ends_with(w, "sses") || ends_with(w, "xes") || ends_with(w, "ches") || ends_with(w, "shes") ||
        ends_with(w, "zes")) {
        return w.substr(0, w.size() - 2);
    }
    if (w.size() >= 4 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is")) {
        return w.substr(0, w.size() - 1);
    }
    return w;
}

PosTag LexiconTagger::tag(std::string_view word) const {
    if (word.empty() || stopwords().contains(word)) {
        return PosTag::other;
    }
    if (lexicon_has(verb_lexicon(), word)) {
        return PosTag::verb;
    }
    if (lexicon_has(noun_lexicon(), word)) {
        return PosTag::noun;
    }
    if (word.size() >= 5 && ends_with(word, "ing")) {
        return PosTag::verb;
    }
    for (std::string_view suffix : {"tion", "sion", "ment", "ness", "ity", "ist", "ism", "er", "or"}) {
        if (word.size() > suffix.size() + 2 && ends_with(word, suffix)) {
            return PosTag::noun;
        }
    }
    return PosTag::other;
}

const PosTagger &default_tagger() {
    static const LexiconTagger tagger;
    return tagger;
}

std::vector<WordCount> sample_high_frequency_words(std::span<const std::string> sentences, std::size_t limit,
                                                   const PosTagger &tagger) {
    struct Entry {
        std::size_t count = 0;
        std::map<std::string, std::size_t> variants;
    };
    std::map<std::string, Entry> by_stem;
    for (const auto &sentence : sentences) {
        for (auto &word : normalized_words(sentence)) {
            if (tagger.tag(word) == PosTag::other) {
                continue;
            }
            auto &entry = by_stem[light_stem(word)];
            ++entry.count;
            ++entry.variants[word];
        }
    }
    std::vector<std::pair<std::string, const Entry *>> ranked;
    ranked.reserve(by_stem.size());
    for (const auto &[stem, entry] : by_stem) {
        ranked.emplace_back(stem, &entry);
    }
    // by_stem iterates lexicographically, so a stable sort on count keeps stem order for ties.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto &a, const auto &b) { return a.second->count > b.second->count; });
    std::vector<WordCount> out;
    for (std::size_t i = 0; i < std::min(limit, ranked.size()); ++i) {
        const auto &variants = ranked[i].second->variants;
        const auto best = std::min_element(variants.begin(), variants.end(), [](const auto &a, const auto &b) {
            if (a.second != b.second) {
                return a.second > b.second;
            }
            if (a.first.size() != b.first.size()) {
                return a.first.size() < b.first.size();
            }
            return a.first < b.first;
        });
        out.push_back({best->first, ranked[i].second->count});
    }
    return out;
}

std::vector<std::string> RetrievalContext::sentence_texts() const {
    std::vector<std::string> out;
    out.reserve(sentences.size());
    for (const auto &s : sentences) {
        out.push_back(s.text);
    }
    return out;
}

std::vector<std::string> RetrievalContext::word_texts() const {
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const auto &w : words) {
        out.push_back(w.word);
    }
    return out;
}

RetrievalContext build_retrieval_context(const EmbeddingVector &video, const CorpusIndex &index, std::size_t k,
                                         std::size_t l, const PosTagger &tagger) {
    RetrievalContext ctx;
    ctx.sentences = retrieve(video, index, k);
    const auto texts = ctx.sentence_texts();
    ctx.words = sample_high_frequency_words(texts, l, tagger);
    return ctx;
}

}  // namespace recap
