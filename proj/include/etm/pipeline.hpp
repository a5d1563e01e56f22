#pragma once

// End-to-end run: cluster short texts into pseudo-texts, train the topic
// model on them and assign a topic to every short text.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "etm/clustering.hpp"
#include "etm/corpus.hpp"
#include "etm/distance.hpp"
#include "etm/embeddings.hpp"
#include "etm/topic_model.hpp"

namespace etm {

struct PipelineOptions {
    ModelParams params;
    std::size_t num_pseudo = 0;  // 0: default_L(n)
    std::size_t cluster_iters = 100;
    DistanceBackend backend = DistanceBackend::SymmetricRelaxed;
    double undefined_distance = 2.0;
};

struct PipelineResult {
    PseudoTextSet pseudo_texts;
    TrainedModel model;
    std::vector<int> predicted;  // topic per short text
};

inline std::vector<int> assign_corpus(const Corpus& corpus, const TopicEstimates& e) {
    std::vector<int> out;
    out.reserve(corpus.doc_count());
    for (const auto& t : corpus.texts) out.push_back(static_cast<int>(assign_short_text(t, e).topic));
    return out;
}

/// One seed drives both stages: clustering uses `seed`, the sampler `seed`
/// as well (each stage owns its own generator).
inline PipelineResult run_pipeline(const Corpus& corpus, const TokenEmbeddings& space, PipelineOptions opts,
                                   std::uint64_t seed, const SweepObserver& observer = {}) {
    opts.params.seed = seed;
    opts.params.validate();
    ClusterOptions copts;
    copts.num_pseudo = opts.num_pseudo ? opts.num_pseudo : default_L(corpus.doc_count());
    copts.max_iters = opts.cluster_iters;
    copts.seed = seed;
    PipelineResult r;
    r.pseudo_texts = cluster(corpus, space, copts, opts.backend, opts.undefined_distance);
    const auto pc = build_pseudo_corpus(r.pseudo_texts, corpus);
    const auto ns = build_neighbors(pc, space, opts.params.corr_threshold);
    r.model = train(pc, ns, opts.params, observer);
    r.predicted = assign_corpus(corpus, r.model.estimates);
    return r;
}

}  // namespace etm
