#pragma once

// Short-text ingestion: normalization, filtering, vocabulary and nBOW vectors.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "etm/embeddings.hpp"

namespace etm {

using TokenId = std::uint32_t;

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyCorpusError : public CorpusError {
public:
    using CorpusError::CorpusError;
};

class Vocabulary {
public:
    /// Returns the id of `word`, inserting it if new.
    TokenId intern(const std::string& word) {
        auto [it, inserted] = index_.try_emplace(word, static_cast<TokenId>(words_.size()));
        if (inserted) words_.push_back(word);
        return it->second;
    }

    std::optional<TokenId> find(std::string_view word) const {
        auto it = index_.find(std::string(word));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& word(TokenId id) const { return words_.at(id); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    std::size_t size() const noexcept { return words_.size(); }

    bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

private:
    std::unordered_map<std::string, TokenId> index_;
    std::vector<std::string> words_;
};

struct ShortText {
    std::size_t id = 0;
    std::vector<TokenId> tokens;
    std::optional<int> gold_label;
    std::size_t source_line = 0;  // 1-based line in the raw input

    bool operator==(const ShortText&) const = default;
};

struct Corpus {
    std::vector<ShortText> texts;
    Vocabulary vocabulary;
    std::vector<std::size_t> dropped_lines;  // 1-based raw lines that became empty

    std::size_t doc_count() const noexcept { return texts.size(); }
    std::size_t vocab_size() const noexcept { return vocabulary.size(); }
    std::size_t token_count() const {
        std::size_t n = 0;
        for (const auto& t : texts) n += t.tokens.size();
        return n;
    }
    bool has_labels() const {
        return !texts.empty() && std::all_of(texts.begin(), texts.end(), [](const ShortText& t) {
            return t.gold_label.has_value();
        });
    }

    bool operator==(const Corpus& other) const {
        return texts == other.texts && vocabulary == other.vocabulary;
    }
};

struct PreprocessOptions {
    std::size_t min_len = 3;
    std::size_t max_len = 20;
    std::size_t min_freq = 3;
};

/// Lowercases ASCII letters and deletes every byte outside [a-z0-9] and
/// whitespace. Multi-byte UTF-8 sequences are removed entirely.
inline std::string normalize_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (unsigned char c : raw) {
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            out.push_back(static_cast<char>(c));
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            out.push_back(' ');
        }
    }
    return out;
}

inline std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> tokens;
    std::istringstream in(normalize_text(raw));
    std::string tok;
    while (in >> tok) tokens.push_back(std::move(tok));
    return tokens;
}

/// Runs the preprocessing pipeline over raw lines. `labels`, when given, is
/// aligned with `raw_lines`; labels of dropped lines are discarded with them.
inline Corpus preprocess(const std::vector<std::string>& raw_lines, const WordSet& stopwords,
                         const PreprocessOptions& opts = {},
                         const std::optional<std::vector<int>>& labels = std::nullopt) {
    if (raw_lines.empty()) throw CorpusError("no input lines");
    if (labels && labels->size() != raw_lines.size()) {
        throw CorpusError("label count " + std::to_string(labels->size()) + " does not match line count " +
                          std::to_string(raw_lines.size()));
    }
    WordSet stop;
    for (const auto& s : stopwords) {
        for (auto& t : tokenize(s)) stop.insert(std::move(t));
    }

    std::vector<std::vector<std::string>> docs;
    docs.reserve(raw_lines.size());
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& line : raw_lines) {
        auto toks = tokenize(line);
        std::erase_if(toks, [&](const std::string& t) {
            return stop.contains(t) || t.size() < opts.min_len || t.size() > opts.max_len;
        });
        for (const auto& t : toks) ++freq[t];
        docs.push_back(std::move(toks));
    }

    Corpus corpus;
    for (std::size_t line = 0; line < docs.size(); ++line) {
        ShortText text;
        for (const auto& t : docs[line]) {
            if (freq[t] >= opts.min_freq) text.tokens.push_back(corpus.vocabulary.intern(t));
        }
        if (text.tokens.empty()) {
            corpus.dropped_lines.push_back(line + 1);
            continue;
        }
        text.id = corpus.texts.size();
        text.source_line = line + 1;
        if (labels) text.gold_label = (*labels)[line];
        corpus.texts.push_back(std::move(text));
    }
    if (corpus.texts.empty()) throw EmptyCorpusError("empty corpus: every document is empty after preprocessing");
    return corpus;
}

/// Total occurrences of each vocabulary token across the corpus.
inline std::vector<std::size_t> term_frequencies(const Corpus& corpus) {
    std::vector<std::size_t> freq(corpus.vocab_size(), 0);
    for (const auto& t : corpus.texts) {
        for (TokenId w : t.tokens) ++freq[w];
    }
    return freq;
}

/// Sparse normalized bag of words, entries sorted by token id.
struct NBowVector {
    std::vector<std::pair<TokenId, double>> entries;

    std::size_t size() const noexcept { return entries.size(); }
    bool empty() const noexcept { return entries.empty(); }
    double weight(TokenId token) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), token,
                                   [](const auto& e, TokenId t) { return e.first < t; });
        return (it != entries.end() && it->first == token) ? it->second : 0.0;
    }
    bool operator==(const NBowVector&) const = default;
};

inline NBowVector nbow(const std::vector<TokenId>& tokens) {
    std::map<TokenId, std::size_t> counts;
    for (TokenId t : tokens) ++counts[t];
    NBowVector v;
    v.entries.reserve(counts.size());
    const double total = static_cast<double>(tokens.size());
    for (const auto& [t, c] : counts) v.entries.emplace_back(t, static_cast<double>(c) / total);
    return v;
}

inline NBowVector nbow(const Corpus& corpus, std::size_t text_id) {
    if (text_id >= corpus.texts.size()) throw CorpusError("invalid text id " + std::to_string(text_id));
    return nbow(corpus.texts[text_id].tokens);
}

// ---------------------------------------------------------------------------
// File I/O

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

inline WordSet read_stopwords(const std::string& path) {
    WordSet stop;
    for (const auto& line : read_lines(path)) {
        for (auto& t : tokenize(line)) stop.insert(std::move(t));
    }
    return stop;
}

inline std::vector<int> read_labels(const std::string& path) {
    std::vector<int> labels;
    std::size_t line_no = 0;
    for (const auto& line : read_lines(path)) {
        ++line_no;
        std::istringstream in(line);
        int v = 0;
        std::string rest;
        if (!(in >> v) || (in >> rest)) {
            throw CorpusError("label file line " + std::to_string(line_no) + ": expected one integer");
        }
        labels.push_back(v);
    }
    return labels;
}

/// Corpus artifact: `vocab.txt` holds one word per line (line index = id);
/// `corpus.tsv` holds "source_line<TAB>label-or-dash<TAB>space separated ids".
inline void save_corpus(const Corpus& corpus, const std::string& vocab_path, const std::string& corpus_path) {
    std::ofstream vocab(vocab_path, std::ios::binary);
    if (!vocab) throw std::runtime_error("cannot write '" + vocab_path + "'");
    for (const auto& w : corpus.vocabulary.words()) vocab << w << '\n';

    std::ofstream out(corpus_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + corpus_path + "'");
    for (const auto& t : corpus.texts) {
        out << t.source_line << '\t';
        if (t.gold_label) {
            out << *t.gold_label;
        } else {
            out << '-';
        }
        out << '\t';
        for (std::size_t i = 0; i < t.tokens.size(); ++i) {
            if (i) out << ' ';
            out << t.tokens[i];
        }
        out << '\n';
    }
    if (!vocab || !out) throw std::runtime_error("write failed for corpus artifact");
}

inline Corpus load_corpus(const std::string& vocab_path, const std::string& corpus_path) {
    Corpus corpus;
    for (const auto& w : read_lines(vocab_path)) {
        if (w.empty()) continue;
        corpus.vocabulary.intern(w);
    }
    std::size_t line_no = 0;
    for (const auto& line : read_lines(corpus_path)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) {
            throw CorpusError(corpus_path + " line " + std::to_string(line_no) + ": expected three tab-separated fields");
        }
        ShortText text;
        text.id = corpus.texts.size();
        text.source_line = std::stoul(line.substr(0, tab1));
        const auto label = line.substr(tab1 + 1, tab2 - tab1 - 1);
        if (label != "-") text.gold_label = std::stoi(label);
        std::istringstream ids(line.substr(tab2 + 1));
        std::uint64_t id = 0;
        while (ids >> id) {
            if (id >= corpus.vocabulary.size()) {
                throw CorpusError(corpus_path + " line " + std::to_string(line_no) + ": token id out of range");
            }
            text.tokens.push_back(static_cast<TokenId>(id));
        }
        if (text.tokens.empty()) {
            throw CorpusError(corpus_path + " line " + std::to_string(line_no) + ": empty text");
        }
        corpus.texts.push_back(std::move(text));
    }
    if (corpus.texts.empty()) throw EmptyCorpusError("empty corpus artifact '" + corpus_path + "'");
    return corpus;
}

}  // namespace etm
