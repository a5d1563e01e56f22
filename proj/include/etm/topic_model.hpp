#pragma once

// MRF-regularized LDA over pseudo-texts. Tokens whose words are close in
// embedding space are linked inside each pseudo-text, and the collapsed
// Gibbs conditional of each token is tilted toward the topics its linked
// tokens currently hold.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "etm/clustering.hpp"
#include "etm/corpus.hpp"
#include "etm/embeddings.hpp"
#include "etm/matrix.hpp"
#include "etm/random.hpp"

namespace etm {

using Topic = std::uint32_t;

struct ModelParams {
    std::size_t num_topics = 10;
    double alpha = 0.1;
    double beta = 0.1;
    double lambda = 1.0;
    double corr_threshold = 0.4;
    std::size_t iterations = 1000;
    std::size_t burn_in = 0;  // only used when averaging estimates
    bool average_estimates = false;
    std::uint64_t seed = 1;

    void validate() const {
        if (num_topics < 1) throw std::invalid_argument("K must be >= 1");
        if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
        if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
        if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
        if (!(corr_threshold >= 0.0 && corr_threshold <= 2.0)) {
            throw std::invalid_argument("correlation threshold must be in [0, 2]");
        }
        if (average_estimates && burn_in >= iterations) {
            throw std::invalid_argument("burn-in must be smaller than the iteration count when averaging");
        }
    }
};

/// Token sequences of the pseudo-texts over a vocabulary of `vocab_size`.
struct PseudoCorpus {
    std::vector<std::vector<TokenId>> docs;
    std::size_t vocab_size = 0;
};

/// Concatenates member texts (ascending text id) into one document per
/// pseudo-text. Empty pseudo-texts yield empty documents.
inline PseudoCorpus build_pseudo_corpus(const PseudoTextSet& set, const Corpus& corpus) {
    if (set.num_texts() != corpus.doc_count()) {
        throw std::invalid_argument("assignment covers " + std::to_string(set.num_texts()) + " texts, corpus has " +
                                    std::to_string(corpus.doc_count()));
    }
    PseudoCorpus pc;
    pc.vocab_size = corpus.vocab_size();
    pc.docs.resize(set.num_pseudo());
    for (std::size_t l = 0; l < set.num_pseudo(); ++l) {
        for (std::size_t t : set.members(l)) {
            const auto& toks = corpus.texts[t].tokens;
            pc.docs[l].insert(pc.docs[l].end(), toks.begin(), toks.end());
        }
    }
    return pc;
}

class NeighborSets;
inline NeighborSets build_neighbors(const PseudoCorpus& pc, const TokenEmbeddings& space, double corr_threshold);

/// Per pseudo-text, per token position: the other positions whose words lie
/// strictly closer than the correlation threshold. Stored as CSR.
class NeighborSets {
public:
    NeighborSets() = default;

    std::size_t num_docs() const noexcept { return doc_offsets_.empty() ? 0 : doc_offsets_.size() - 1; }
    std::size_t doc_length(std::size_t l) const { return doc_offsets_[l + 1] - doc_offsets_[l]; }

    std::span<const std::uint32_t> neighbors(std::size_t l, std::size_t i) const {
        const std::size_t slot = doc_offsets_[l] + i;
        return {adjacency_.data() + row_offsets_[slot], row_offsets_[slot + 1] - row_offsets_[slot]};
    }

    /// |P_l|, the number of undirected edges in pseudo-text l.
    std::size_t edge_count(std::size_t l) const { return edges_[l]; }

    std::size_t total_edges() const { return std::accumulate(edges_.begin(), edges_.end(), std::size_t{0}); }

    /// Builds from explicit per-document adjacency lists (symmetrized).
    static NeighborSets from_lists(const std::vector<std::vector<std::vector<std::uint32_t>>>& lists) {
        NeighborSets ns;
        ns.doc_offsets_.push_back(0);
        ns.row_offsets_.push_back(0);
        for (const auto& doc : lists) {
            std::vector<std::vector<std::uint32_t>> sym(doc.size());
            for (std::size_t i = 0; i < doc.size(); ++i) {
                for (std::uint32_t j : doc[i]) {
                    if (j == i || j >= doc.size()) continue;
                    sym[i].push_back(j);
                    sym[j].push_back(static_cast<std::uint32_t>(i));
                }
            }
            std::size_t twice_edges = 0;
            for (auto& row : sym) {
                std::sort(row.begin(), row.end());
                row.erase(std::unique(row.begin(), row.end()), row.end());
                ns.adjacency_.insert(ns.adjacency_.end(), row.begin(), row.end());
                ns.row_offsets_.push_back(ns.adjacency_.size());
                twice_edges += row.size();
            }
            ns.edges_.push_back(twice_edges / 2);
            ns.doc_offsets_.push_back(ns.doc_offsets_.back() + doc.size());
        }
        return ns;
    }

private:
    friend NeighborSets build_neighbors(const PseudoCorpus&, const TokenEmbeddings&, double);

    std::vector<std::size_t> doc_offsets_;  // position slot of first token per doc
    std::vector<std::size_t> row_offsets_;  // adjacency offset per position slot
    std::vector<std::uint32_t> adjacency_;
    std::vector<std::size_t> edges_;
};

inline NeighborSets build_neighbors(const PseudoCorpus& pc, const TokenEmbeddings& space, double corr_threshold) {
    NeighborSets ns;
    ns.doc_offsets_.push_back(0);
    ns.row_offsets_.push_back(0);
    std::unordered_map<TokenId, std::size_t> local;
    std::vector<TokenId> types;
    std::vector<double> type_dist;
    std::vector<std::size_t> type_of;
    for (const auto& doc : pc.docs) {
        // distances between distinct embedded word types of this document
        local.clear();
        types.clear();
        type_of.assign(doc.size(), std::numeric_limits<std::size_t>::max());
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (!space.embedded(doc[i])) continue;
            auto [it, inserted] = local.try_emplace(doc[i], types.size());
            if (inserted) types.push_back(doc[i]);
            type_of[i] = it->second;
        }
        const std::size_t nt = types.size();
        type_dist.assign(nt * nt, 0.0);
        for (std::size_t a = 0; a < nt; ++a) {
            for (std::size_t b = 0; b < a; ++b) {
                const double d = space.distance(types[a], types[b]);
                type_dist[a * nt + b] = d;
                type_dist[b * nt + a] = d;
            }
        }
        std::size_t twice_edges = 0;
        for (std::size_t i = 0; i < doc.size(); ++i) {
            const std::size_t ti = type_of[i];
            if (ti != std::numeric_limits<std::size_t>::max()) {
                for (std::size_t j = 0; j < doc.size(); ++j) {
                    const std::size_t tj = type_of[j];
                    if (j == i || tj == std::numeric_limits<std::size_t>::max()) continue;
                    if (type_dist[ti * nt + tj] < corr_threshold) {
                        ns.adjacency_.push_back(static_cast<std::uint32_t>(j));
                        ++twice_edges;
                    }
                }
            }
            ns.row_offsets_.push_back(ns.adjacency_.size());
        }
        ns.edges_.push_back(twice_edges / 2);
        ns.doc_offsets_.push_back(ns.doc_offsets_.back() + doc.size());
    }
    return ns;
}

/// Topic assignments with the count tables they imply.
struct TopicModelState {
    std::size_t num_topics = 0;
    std::size_t vocab_size = 0;
    std::vector<std::vector<TokenId>> words;
    std::vector<std::vector<Topic>> z;
    std::vector<std::uint32_t> doc_topic;    // L x K
    std::vector<std::uint32_t> topic_word;   // K x V
    std::vector<std::uint32_t> topic_total;  // K

    std::size_t num_docs() const noexcept { return words.size(); }
    std::uint32_t n_lk(std::size_t l, std::size_t k) const { return doc_topic[l * num_topics + k]; }
    std::uint32_t n_kw(std::size_t k, std::size_t w) const { return topic_word[k * vocab_size + w]; }
    std::uint32_t n_k(std::size_t k) const { return topic_total[k]; }
    std::size_t n_l(std::size_t l) const { return words[l].size(); }

    /// Fresh state with the given assignments and counts tallied from them.
    static TopicModelState from_assignments(const PseudoCorpus& pc, std::size_t num_topics,
                                            std::vector<std::vector<Topic>> z) {
        TopicModelState s;
        s.num_topics = num_topics;
        s.vocab_size = pc.vocab_size;
        s.words = pc.docs;
        s.z = std::move(z);
        if (s.z.size() != s.words.size()) throw std::invalid_argument("assignment/document count mismatch");
        s.doc_topic.assign(s.words.size() * num_topics, 0);
        s.topic_word.assign(num_topics * s.vocab_size, 0);
        s.topic_total.assign(num_topics, 0);
        for (std::size_t l = 0; l < s.words.size(); ++l) {
            if (s.z[l].size() != s.words[l].size()) throw std::invalid_argument("assignment/document length mismatch");
            for (std::size_t i = 0; i < s.words[l].size(); ++i) {
                if (s.z[l][i] >= num_topics) throw std::invalid_argument("topic id out of range");
                if (s.words[l][i] >= s.vocab_size) throw std::invalid_argument("token id out of range");
                s.increment(l, i);
            }
        }
        return s;
    }

    void increment(std::size_t l, std::size_t i) {
        const Topic k = z[l][i];
        ++doc_topic[l * num_topics + k];
        ++topic_word[k * vocab_size + words[l][i]];
        ++topic_total[k];
    }
    void decrement(std::size_t l, std::size_t i) {
        const Topic k = z[l][i];
        --doc_topic[l * num_topics + k];
        --topic_word[k * vocab_size + words[l][i]];
        --topic_total[k];
    }

    /// True when the incremental tables equal a full recount from z.
    bool consistent() const {
        PseudoCorpus pc{words, vocab_size};
        const auto fresh = from_assignments(pc, num_topics, z);
        return fresh.doc_topic == doc_topic && fresh.topic_word == topic_word && fresh.topic_total == topic_total;
    }
};

/// Unnormalized conditional weights of each topic for token (l, i). The
/// token must already be decremented from the counts.
inline void gibbs_weights(const TopicModelState& s, const NeighborSets& ns, const ModelParams& p, std::size_t l,
                          std::size_t i, std::span<double> out) {
    const std::size_t K = s.num_topics;
    const TokenId w = s.words[l][i];
    const double vbeta = static_cast<double>(s.vocab_size) * p.beta;
    for (std::size_t k = 0; k < K; ++k) {
        out[k] = (s.n_lk(l, k) + p.alpha) * (s.n_kw(k, w) + p.beta) / (s.n_k(k) + vbeta);
    }
    const auto nbrs = ns.neighbors(l, i);
    if (nbrs.empty() || p.lambda == 0.0) return;
    thread_local std::vector<std::uint32_t> same;
    same.assign(K, 0);
    const auto& zl = s.z[l];
    for (std::uint32_t j : nbrs) ++same[zl[j]];
    const double size = static_cast<double>(nbrs.size());
    for (std::size_t k = 0; k < K; ++k) {
        if (same[k]) out[k] *= std::exp(p.lambda * (static_cast<double>(same[k]) / size));
    }
}

/// Normalized conditional distribution over topics for token (l, i), which
/// must be decremented from the counts.
inline std::vector<double> gibbs_conditional(const TopicModelState& s, const NeighborSets& ns, const ModelParams& p,
                                             std::size_t l, std::size_t i) {
    std::vector<double> w(s.num_topics);
    gibbs_weights(s, ns, p, l, i, w);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= total;
    return w;
}

/// Called after every sweep with the 0-based sweep index.
using SweepObserver = std::function<void(std::size_t, const TopicModelState&)>;

inline TopicModelState init_state(const PseudoCorpus& pc, const ModelParams& p, Rng& rng) {
    std::vector<std::vector<Topic>> z(pc.docs.size());
    for (std::size_t l = 0; l < pc.docs.size(); ++l) {
        z[l].resize(pc.docs[l].size());
        for (auto& t : z[l]) t = static_cast<Topic>(uniform_index(rng, p.num_topics));
    }
    return TopicModelState::from_assignments(pc, p.num_topics, std::move(z));
}

inline void gibbs_sweep(TopicModelState& s, const NeighborSets& ns, const ModelParams& p, Rng& rng,
                        std::vector<double>& weights) {
    for (std::size_t l = 0; l < s.num_docs(); ++l) {
        for (std::size_t i = 0; i < s.words[l].size(); ++i) {
            s.decrement(l, i);
            gibbs_weights(s, ns, p, l, i, weights);
            s.z[l][i] = static_cast<Topic>(sample_discrete(weights, rng));
            s.increment(l, i);
        }
    }
}

inline TopicModelState run_gibbs(const PseudoCorpus& pc, const NeighborSets& ns, const ModelParams& p,
                                 const SweepObserver& observer = {}) {
    p.validate();
    if (ns.num_docs() != pc.docs.size()) throw std::invalid_argument("neighbor sets do not match the pseudo-texts");
    Rng rng(p.seed);
    auto state = init_state(pc, p, rng);
    std::vector<double> weights(p.num_topics);
    for (std::size_t sweep = 0; sweep < p.iterations; ++sweep) {
        gibbs_sweep(state, ns, p, rng, weights);
        if (observer) observer(sweep, state);
    }
    return state;
}

struct TopicEstimates {
    Matrix phi;    // K x V
    Matrix theta;  // L x K
};

inline TopicEstimates estimate(const TopicModelState& s, const ModelParams& p) {
    const std::size_t K = s.num_topics;
    const std::size_t V = s.vocab_size;
    const std::size_t L = s.num_docs();
    TopicEstimates e{Matrix(K, V), Matrix(L, K)};
    const double vbeta = static_cast<double>(V) * p.beta;
    for (std::size_t k = 0; k < K; ++k) {
        const double denom = s.n_k(k) + vbeta;
        for (std::size_t w = 0; w < V; ++w) e.phi(k, w) = (s.n_kw(k, w) + p.beta) / denom;
    }
    const double kalpha = static_cast<double>(K) * p.alpha;
    for (std::size_t l = 0; l < L; ++l) {
        const double denom = static_cast<double>(s.n_l(l)) + kalpha;
        for (std::size_t k = 0; k < K; ++k) e.theta(l, k) = (s.n_lk(l, k) + p.alpha) / denom;
    }
    return e;
}

/// Running mean of per-sweep estimates.
class EstimateAccumulator {
public:
    void add(const TopicEstimates& e) {
        if (samples_ == 0) {
            sum_ = e;
        } else {
            for (std::size_t r = 0; r < e.phi.rows(); ++r)
                for (std::size_t c = 0; c < e.phi.cols(); ++c) sum_.phi(r, c) += e.phi(r, c);
            for (std::size_t r = 0; r < e.theta.rows(); ++r)
                for (std::size_t c = 0; c < e.theta.cols(); ++c) sum_.theta(r, c) += e.theta(r, c);
        }
        ++samples_;
    }
    std::size_t samples() const noexcept { return samples_; }
    TopicEstimates mean() const {
        if (samples_ == 0) throw std::logic_error("no samples accumulated");
        TopicEstimates m = sum_;
        const double inv = 1.0 / static_cast<double>(samples_);
        for (std::size_t r = 0; r < m.phi.rows(); ++r)
            for (double& x : m.phi.row(r)) x *= inv;
        for (std::size_t r = 0; r < m.theta.rows(); ++r)
            for (double& x : m.theta.row(r)) x *= inv;
        return m;
    }

private:
    TopicEstimates sum_;
    std::size_t samples_ = 0;
};

struct TrainedModel {
    TopicModelState state;
    TopicEstimates estimates;
};

/// Runs the sampler and estimates phi/theta, from the final state or, when
/// `average_estimates` is set, as the mean over sweeps after burn-in.
inline TrainedModel train(const PseudoCorpus& pc, const NeighborSets& ns, const ModelParams& p,
                          const SweepObserver& observer = {}) {
    EstimateAccumulator acc;
    auto state = run_gibbs(pc, ns, p, [&](std::size_t sweep, const TopicModelState& s) {
        if (p.average_estimates && sweep >= p.burn_in) acc.add(estimate(s, p));
        if (observer) observer(sweep, s);
    });
    auto est = p.average_estimates ? acc.mean() : estimate(state, p);
    return {std::move(state), std::move(est)};
}

struct TextAssignment {
    Topic topic = 0;
    std::vector<double> scores;  // normalized over topics
};

/// argmax_k prod_j phi_k(w_j), evaluated in log space. Tokens outside the
/// model vocabulary are skipped.
inline TextAssignment assign_short_text(std::span<const TokenId> tokens, const TopicEstimates& e) {
    const std::size_t K = e.phi.rows();
    const std::size_t V = e.phi.cols();
    std::vector<double> logp(K, 0.0);
    std::size_t used = 0;
    for (TokenId w : tokens) {
        if (w >= V) continue;
        ++used;
        for (std::size_t k = 0; k < K; ++k) logp[k] += std::log(e.phi(k, w));
    }
    if (used == 0) throw std::invalid_argument("cannot assign a topic to a text with no in-vocabulary tokens");
    TextAssignment out;
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k) {
        if (logp[k] > logp[best]) best = k;
    }
    out.topic = static_cast<Topic>(best);
    out.scores.resize(K);
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        out.scores[k] = std::exp(logp[k] - logp[best]);
        total += out.scores[k];
    }
    for (double& x : out.scores) x /= total;
    return out;
}

inline TextAssignment assign_short_text(const ShortText& text, const TopicEstimates& e) {
    return assign_short_text(std::span<const TokenId>(text.tokens), e);
}

struct RankedWord {
    std::string word;
    double weight = 0.0;
};

/// The n highest-probability words of topic k; ties broken lexicographically.
inline std::vector<RankedWord> top_words(const TopicEstimates& e, const Vocabulary& vocab, std::size_t k,
                                         std::size_t n = 10) {
    if (k >= e.phi.rows()) throw std::out_of_range("topic id " + std::to_string(k) + " out of range");
    if (vocab.size() != e.phi.cols()) throw std::invalid_argument("vocabulary size does not match phi");
    std::vector<std::size_t> order(e.phi.cols());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto row = e.phi.row(k);
    auto better = [&](std::size_t a, std::size_t b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return vocab.word(static_cast<TokenId>(a)) < vocab.word(static_cast<TokenId>(b));
    };
    n = std::min(n, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), better);
    std::vector<RankedWord> out;
    out.reserve(n);
    for (std::size_t r = 0; r < n; ++r) out.push_back({vocab.word(static_cast<TokenId>(order[r])), row[order[r]]});
    return out;
}

}  // namespace etm
