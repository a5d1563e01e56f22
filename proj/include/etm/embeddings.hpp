#pragma once

// Pretrained word vectors in the plain-text "word v1 v2 ... vd" format and
// the cosine distance between them.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace etm {

class EmbeddingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

using WordSet = std::unordered_set<std::string>;

class EmbeddingTable {
public:
    EmbeddingTable() = default;

    /// Builds a table from explicit rows. Throws EmbeddingError on ragged
    /// rows, zero vectors or duplicate words.
    EmbeddingTable(std::vector<std::string> words, const std::vector<std::vector<double>>& rows) {
        if (words.size() != rows.size()) throw EmbeddingError("embedding table: words/rows size mismatch");
        if (words.empty()) throw EmbeddingError("embedding table: no rows");
        dim_ = rows.front().size();
        if (dim_ == 0) throw EmbeddingError("embedding table: zero dimension");
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != dim_) throw EmbeddingError("embedding table: ragged row for '" + words[r] + "'");
            if (!append(words[r], rows[r])) throw EmbeddingError("embedding table: duplicate word '" + words[r] + "'");
        }
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return words_.size(); }
    bool contains(std::string_view word) const { return index_.contains(std::string(word)); }

    std::optional<std::size_t> find(std::string_view word) const {
        auto it = index_.find(std::string(word));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t row_of(std::string_view word) const {
        auto row = find(word);
        if (!row) throw LookupError("word not in embedding vocabulary: '" + std::string(word) + "'");
        return *row;
    }

    const std::string& word(std::size_t row) const { return words_.at(row); }
    std::span<const double> vector(std::size_t row) const { return {values_.data() + row * dim_, dim_}; }
    double norm(std::size_t row) const { return norms_[row]; }

    /// Cosine distance 1 - cos(u, v) between two rows, clamped to [0, 2].
    double row_distance(std::size_t a, std::size_t b) const {
        if (a == b) return 0.0;
        const double* x = values_.data() + a * dim_;
        const double* y = values_.data() + b * dim_;
        double dot = 0.0;
        for (std::size_t d = 0; d < dim_; ++d) dot += x[d] * y[d];
        double dist = 1.0 - dot / (norms_[a] * norms_[b]);
        if (dist < 0.0) dist = 0.0;
        if (dist > 2.0) dist = 2.0;
        return dist;
    }

    double distance(std::string_view u, std::string_view v) const { return row_distance(row_of(u), row_of(v)); }

    /// Parses the text format. Line numbers in errors are 1-based.
    static EmbeddingTable parse(std::istream& in, const std::optional<WordSet>& restrict_vocab = std::nullopt) {
        EmbeddingTable table;
        std::string line;
        std::size_t line_no = 0;
        std::vector<double> row;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::istringstream fields(line);
            std::string word;
            if (!(fields >> word)) continue;  // blank line

            row.clear();
            std::string tok;
            while (fields >> tok) {
                double value = 0.0;
                const char* first = tok.data();
                const char* last = tok.data() + tok.size();
                auto [ptr, ec] = std::from_chars(first, last, value);
                if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
                    throw EmbeddingError("embedding file line " + std::to_string(line_no) + ": unparseable number '" +
                                         tok + "'");
                }
                row.push_back(value);
            }
            if (row.empty()) {
                throw EmbeddingError("embedding file line " + std::to_string(line_no) + ": no vector values");
            }
            if (table.dim_ == 0) table.dim_ = row.size();
            if (row.size() != table.dim_) {
                throw EmbeddingError("embedding file line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(table.dim_) + " values, found " + std::to_string(row.size()));
            }
            if (restrict_vocab && !restrict_vocab->contains(word)) continue;
            double sq = 0.0;
            for (double v : row) sq += v * v;
            if (!(sq > 0.0)) {
                throw EmbeddingError("embedding file line " + std::to_string(line_no) + ": zero vector for '" + word +
                                     "'");
            }
            table.append(word, row);  // duplicates keep the first occurrence
        }
        if (table.words_.empty()) throw EmbeddingError("embedding table is empty after vocabulary restriction");
        return table;
    }

private:
    bool append(const std::string& word, std::span<const double> row) {
        if (index_.contains(word)) return false;
        double sq = 0.0;
        for (double v : row) sq += v * v;
        if (!(sq > 0.0)) throw EmbeddingError("zero vector for '" + word + "'");
        index_.emplace(word, words_.size());
        words_.push_back(word);
        values_.insert(values_.end(), row.begin(), row.end());
        norms_.push_back(std::sqrt(sq));
        return true;
    }

    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> words_;
    std::vector<double> values_;
    std::vector<double> norms_;
};

inline EmbeddingTable load_embeddings(const std::string& path,
                                      const std::optional<WordSet>& restrict_vocab = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw EmbeddingError("cannot open embedding file '" + path + "'");
    return EmbeddingTable::parse(in, restrict_vocab);
}

inline double word_distance(const EmbeddingTable& table, std::string_view u, std::string_view v) {
    return table.distance(u, v);
}

/// Maps a dense token-id vocabulary onto embedding rows. Tokens without a
/// vector stay in the vocabulary but have no row.
class TokenEmbeddings {
public:
    TokenEmbeddings(const EmbeddingTable& table, std::span<const std::string> words) : table_(&table) {
        rows_.reserve(words.size());
        for (const auto& w : words) rows_.push_back(table.find(w));
    }

    const EmbeddingTable& table() const noexcept { return *table_; }
    std::size_t vocab_size() const noexcept { return rows_.size(); }
    bool embedded(std::size_t token) const { return token < rows_.size() && rows_[token].has_value(); }
    std::optional<std::size_t> row(std::size_t token) const {
        return token < rows_.size() ? rows_[token] : std::nullopt;
    }

    /// Cosine distance between two embedded tokens.
    double distance(std::size_t a, std::size_t b) const { return table_->row_distance(*rows_.at(a), *rows_.at(b)); }

    std::size_t embedded_count() const {
        std::size_t n = 0;
        for (const auto& r : rows_) n += r.has_value();
        return n;
    }

private:
    const EmbeddingTable* table_;
    std::vector<std::optional<std::size_t>> rows_;
};

}  // namespace etm
