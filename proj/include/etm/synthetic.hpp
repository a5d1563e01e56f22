#pragma once

// Planted-model corpora: documents drawn from known topic-word and
// document-topic distributions (the plain LDA generative path), plus a
// labeled short-text dataset with class-clustered word vectors.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "etm/clustering.hpp"
#include "etm/corpus.hpp"
#include "etm/embeddings.hpp"
#include "etm/matrix.hpp"
#include "etm/random.hpp"
#include "etm/topic_model.hpp"

namespace etm {

inline double standard_normal(Rng& rng) {
    // Box-Muller; the second variate is discarded to keep draws stateless
    double u1 = uniform_real(rng);
    while (u1 <= 0.0) u1 = uniform_real(rng);
    const double u2 = uniform_real(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Gamma(shape, 1) by Marsaglia-Tsang; shapes below 1 use the u^(1/a) boost.
inline double sample_gamma(double shape, Rng& rng) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be > 0");
    if (shape < 1.0) {
        double u = uniform_real(rng);
        while (u <= 0.0) u = uniform_real(rng);
        return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = standard_normal(rng);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = uniform_real(rng);
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

/// `rows` independent draws from a symmetric Dirichlet(alpha) over `cols` entries.
inline Matrix dirichlet_rows(std::size_t rows, std::size_t cols, double alpha, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        double total = 0.0;
        for (;;) {
            total = 0.0;
            for (std::size_t c = 0; c < cols; ++c) total += m(r, c) = sample_gamma(alpha, rng);
            if (total > 0.0) break;  // all-underflow draw; redraw the row
        }
        for (std::size_t c = 0; c < cols; ++c) m(r, c) /= total;
    }
    return m;
}

inline void require_row_stochastic(const Matrix& m, const char* name) {
    if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument(std::string(name) + " is empty");
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double sum = 0.0;
        for (double x : m.row(r)) {
            if (!(x >= 0.0) || !std::isfinite(x)) {
                throw std::invalid_argument(std::string(name) + " row " + std::to_string(r) + " has a negative entry");
            }
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument(std::string(name) + " row " + std::to_string(r) + " sums to " +
                                        std::to_string(sum));
        }
    }
}

/// Synthetic vocabulary word for id w, e.g. "w0042".
inline std::string synthetic_word(std::size_t w) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "w%04zu", w);
    return buf;
}

struct SyntheticCorpus {
    PseudoTextSet pseudo_texts;  // identity: text l is pseudo-text l
    Corpus corpus;               // vocabulary id w is synthetic_word(w)
    std::vector<std::vector<Topic>> planted_z;
};

/// Draws document l with doc_lengths[l] tokens: z ~ theta_l, w ~ phi_z.
inline SyntheticCorpus generate_synthetic(const ModelParams& params, const std::vector<std::size_t>& doc_lengths,
                                          const Matrix& planted_phi, const Matrix& planted_theta,
                                          std::uint64_t seed) {
    require_row_stochastic(planted_phi, "planted phi");
    require_row_stochastic(planted_theta, "planted theta");
    const std::size_t K = planted_phi.rows();
    const std::size_t V = planted_phi.cols();
    const std::size_t L = doc_lengths.size();
    if (K != params.num_topics) throw std::invalid_argument("planted phi has " + std::to_string(K) + " rows, K is " +
                                                            std::to_string(params.num_topics));
    if (planted_theta.rows() != L || planted_theta.cols() != K) {
        throw std::invalid_argument("planted theta must be L x K");
    }

    Rng rng(seed);
    SyntheticCorpus out;
    for (std::size_t w = 0; w < V; ++w) out.corpus.vocabulary.intern(synthetic_word(w));
    out.planted_z.resize(L);
    std::vector<std::size_t> identity(L);
    for (std::size_t l = 0; l < L; ++l) {
        identity[l] = l;
        ShortText text;
        text.id = l;
        text.source_line = l + 1;
        for (std::size_t i = 0; i < doc_lengths[l]; ++i) {
            const auto k = sample_discrete(planted_theta.row(l), rng);
            const auto w = sample_discrete(planted_phi.row(k), rng);
            out.planted_z[l].push_back(static_cast<Topic>(k));
            text.tokens.push_back(static_cast<TokenId>(w));
        }
        out.corpus.texts.push_back(std::move(text));
    }
    out.pseudo_texts = PseudoTextSet(std::max<std::size_t>(L, 1), std::move(identity));
    return out;
}

inline SyntheticCorpus generate_synthetic(const ModelParams& params, std::size_t L, std::size_t doc_len,
                                          const Matrix& planted_phi, const Matrix& planted_theta,
                                          std::uint64_t seed) {
    return generate_synthetic(params, std::vector<std::size_t>(L, doc_len), planted_phi, planted_theta, seed);
}

/// K topics over V words; topic k puts Zipf(skew) mass on `support` words
/// starting at k*V/K, plus the first `overlap` words of the next block.
inline Matrix block_zipf_phi(std::size_t K, std::size_t V, std::size_t support, std::size_t overlap = 0,
                             double skew = 1.0) {
    if (K == 0 || V < K) throw std::invalid_argument("block_zipf_phi: need 1 <= K <= V");
    const std::size_t block = V / K;
    if (support == 0 || support > block) throw std::invalid_argument("block_zipf_phi: support must fit in a block");
    Matrix phi(K, V);
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < support; ++j) idx.push_back(k * block + j);
        for (std::size_t j = 0; j < overlap; ++j) idx.push_back(((k + 1) % K) * block + j);
        double total = 0.0;
        for (std::size_t r = 0; r < idx.size(); ++r) total += 1.0 / std::pow(static_cast<double>(r + 1), skew);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            phi(k, idx[r]) += 1.0 / std::pow(static_cast<double>(r + 1), skew) / total;
        }
    }
    return phi;
}

struct PlantedShortTextOptions {
    std::size_t num_classes = 5;
    std::size_t num_texts = 1000;
    std::size_t words_per_class = 40;
    std::size_t min_tokens = 4;
    std::size_t max_tokens = 10;
    double dominance = 0.9;  // probability a token comes from the text's own class
    double zipf_skew = 0.8;
    std::size_t embedding_dim = 16;
    double embedding_noise = 0.1;  // per-component std dev around a unit class center
    std::uint64_t seed = 1;
};

/// Raw lines, labels and word vectors for a labeled short-text dataset.
struct PlantedShortTexts {
    std::vector<std::string> lines;
    std::vector<int> labels;
    std::vector<std::string> words;
    std::vector<std::vector<double>> vectors;
    Matrix phi;  // classes x words

    EmbeddingTable embeddings() const { return EmbeddingTable(words, vectors); }
};

/// Text i belongs to class i mod C; every token is drawn from its class's
/// topic with probability `dominance`, otherwise from a uniformly chosen
/// other class.
inline PlantedShortTexts generate_planted_short_texts(const PlantedShortTextOptions& opt) {
    const std::size_t C = opt.num_classes;
    if (C == 0 || opt.words_per_class == 0 || opt.min_tokens == 0 || opt.max_tokens < opt.min_tokens) {
        throw std::invalid_argument("invalid planted short-text options");
    }
    const std::size_t V = C * opt.words_per_class;
    PlantedShortTexts out;
    out.phi = block_zipf_phi(C, V, opt.words_per_class, 0, opt.zipf_skew);
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t j = 0; j < opt.words_per_class; ++j) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "c%zuw%03zu", c, j);
            out.words.emplace_back(buf);
        }
    }

    Rng rng(opt.seed);
    std::vector<std::vector<double>> centers(C, std::vector<double>(opt.embedding_dim));
    for (auto& center : centers) {
        double norm = 0.0;
        for (double& x : center) {
            x = standard_normal(rng);
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (double& x : center) x /= norm;
    }
    for (std::size_t w = 0; w < V; ++w) {
        std::vector<double> v = centers[w / opt.words_per_class];
        for (double& x : v) x += opt.embedding_noise * standard_normal(rng);
        out.vectors.push_back(std::move(v));
    }

    for (std::size_t i = 0; i < opt.num_texts; ++i) {
        const std::size_t c = i % C;
        const std::size_t len =
            opt.min_tokens + static_cast<std::size_t>(uniform_index(rng, opt.max_tokens - opt.min_tokens + 1));
        std::string line;
        for (std::size_t t = 0; t < len; ++t) {
            std::size_t topic = c;
            if (C > 1 && uniform_real(rng) >= opt.dominance) {
                topic = (c + 1 + static_cast<std::size_t>(uniform_index(rng, C - 1))) % C;
            }
            const auto w = sample_discrete(out.phi.row(topic), rng);
            if (!line.empty()) line.push_back(' ');
            line += out.words[w];
        }
        out.lines.push_back(std::move(line));
        out.labels.push_back(static_cast<int>(c));
    }
    return out;
}

}  // namespace etm
