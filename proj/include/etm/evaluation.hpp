#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "etm/corpus.hpp"
#include "etm/topic_model.hpp"

namespace etm {

class ContingencyTable {
public:
    ContingencyTable(const std::vector<int>& pred, const std::vector<int>& gold) {
        if (pred.size() != gold.size()) {
            throw std::invalid_argument("prediction and gold label counts differ (" + std::to_string(pred.size()) +
                                        " vs " + std::to_string(gold.size()) + ")");
        }
        if (pred.empty()) throw std::invalid_argument("cannot compare empty partitions");
        std::map<int, std::size_t> rows;
        std::map<int, std::size_t> cols;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            rows.try_emplace(pred[i], rows.size());
            cols.try_emplace(gold[i], cols.size());
        }
        num_rows_ = rows.size();
        num_cols_ = cols.size();
        counts_.assign(num_rows_ * num_cols_, 0);
        row_sums_.assign(num_rows_, 0);
        col_sums_.assign(num_cols_, 0);
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const auto r = rows[pred[i]];
            const auto c = cols[gold[i]];
            ++counts_[r * num_cols_ + c];
            ++row_sums_[r];
            ++col_sums_[c];
        }
        total_ = pred.size();
    }

    std::size_t rows() const noexcept { return num_rows_; }
    std::size_t cols() const noexcept { return num_cols_; }
    std::size_t count(std::size_t r, std::size_t c) const { return counts_[r * num_cols_ + c]; }
    std::size_t row_sum(std::size_t r) const { return row_sums_[r]; }
    std::size_t col_sum(std::size_t c) const { return col_sums_[c]; }
    std::size_t total() const noexcept { return total_; }

private:
    std::size_t num_rows_ = 0;
    std::size_t num_cols_ = 0;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> row_sums_;
    std::vector<std::size_t> col_sums_;
    std::size_t total_ = 0;
};

/// NMI = I(pred; gold) / sqrt(H(pred) H(gold)), natural logs. When either
/// entropy is zero: 1 if both partitions are a single cluster, else 0.
inline double nmi(const std::vector<int>& pred, const std::vector<int>& gold) {
    const ContingencyTable table(pred, gold);
    const double n = static_cast<double>(table.total());
    auto entropy = [n](auto sum_of, std::size_t count) {
        double h = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double p = static_cast<double>(sum_of(i)) / n;
            if (p > 0.0) h -= p * std::log(p);
        }
        return h;
    };
    const double h_pred = entropy([&](std::size_t r) { return table.row_sum(r); }, table.rows());
    const double h_gold = entropy([&](std::size_t c) { return table.col_sum(c); }, table.cols());
    if (table.rows() == 1 || table.cols() == 1) return (table.rows() == 1 && table.cols() == 1) ? 1.0 : 0.0;

    double mi = 0.0;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.cols(); ++c) {
            const auto nrc = table.count(r, c);
            if (nrc == 0) continue;
            const double joint = static_cast<double>(nrc) / n;
            mi += joint * std::log(joint * n * n /
                                   (static_cast<double>(table.row_sum(r)) * static_cast<double>(table.col_sum(c))));
        }
    }
    const double value = mi / std::sqrt(h_pred * h_gold);
    return std::clamp(value, 0.0, 1.0);
}

/// Map-keyed variant; both maps must cover the same text ids.
inline double nmi(const std::map<std::size_t, int>& pred, const std::map<std::size_t, int>& gold) {
    if (pred.size() != gold.size()) throw std::invalid_argument("prediction and gold cover different texts");
    std::vector<int> p;
    std::vector<int> g;
    auto it = gold.begin();
    for (const auto& [id, label] : pred) {
        if (it->first != id) throw std::invalid_argument("text id " + std::to_string(id) + " missing from gold labels");
        p.push_back(label);
        g.push_back(it->second);
        ++it;
    }
    return nmi(p, g);
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation; 0 for a single value
};

inline MeanStd mean_std(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

inline std::string format_fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

/// Topic report: one line per topic, "k<TAB>word<TAB>phi<TAB>word<TAB>phi...".
inline void write_topic_report(std::ostream& out, const TopicEstimates& e, const Vocabulary& vocab,
                               std::size_t n_words = 10) {
    char buf[64];
    for (std::size_t k = 0; k < e.phi.rows(); ++k) {
        out << k;
        for (const auto& rw : top_words(e, vocab, k, n_words)) {
            std::snprintf(buf, sizeof buf, "%.8f", rw.weight);
            out << '\t' << rw.word << '\t' << buf;
        }
        out << '\n';
    }
}

inline void export_topics(const TopicEstimates& e, const Vocabulary& vocab, std::size_t n_words,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write topic report '" + path + "'");
    write_topic_report(out, e, vocab, n_words);
    out.flush();
    if (!out) throw std::runtime_error("write failed for topic report '" + path + "'");
}

/// Reads a topic report back into per-topic ranked word lists.
inline std::vector<std::vector<RankedWord>> parse_topic_report(std::istream& in) {
    std::vector<std::vector<RankedWord>> topics;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() % 2 != 1 || std::stoul(fields[0]) != topics.size()) {
            throw std::runtime_error("malformed topic report line for topic " + std::to_string(topics.size()));
        }
        std::vector<RankedWord> words;
        for (std::size_t f = 1; f + 1 < fields.size(); f += 2) words.push_back({fields[f], std::stod(fields[f + 1])});
        topics.push_back(std::move(words));
    }
    return topics;
}

}  // namespace etm
