// etm: short-text topic modeling pipeline.
//
//   etm synth       write a planted labeled short-text dataset
//   etm preprocess  raw lines -> vocab.txt + corpus.tsv
//   etm cluster     corpus -> assignment.tsv (pseudo-texts)
//   etm train       corpus + assignment -> model.json
//   etm report      model.json -> topics.tsv, text_topics.tsv, NMI

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "etm.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitError = 1;
constexpr int kExitMissingInput = 2;
constexpr int kExitEmptyCorpus = 3;

struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    std::string corpus;
    std::string labels;
    std::string stopwords;
    std::string embeddings;
    std::string out_dir = "etm_out";
    std::size_t num_topics = 10;
    std::size_t num_pseudo = 0;
    double alpha = 0.1;
    double beta = 0.1;
    double lambda = 1.0;
    double corr_threshold = 0.4;
    std::size_t cluster_iters = 100;
    std::size_t gibbs_iters = 1000;
    std::size_t burn_in = 0;
    bool average_estimates = false;
    std::uint64_t seed = 1;
    std::size_t runs = 1;
    std::string distance = "relaxed-symmetric";
    std::size_t min_len = 3;
    std::size_t max_len = 20;
    std::size_t min_freq = 3;
    std::size_t top_words = 10;
    std::size_t log_every = 100;

    etm::ModelParams model_params() const {
        etm::ModelParams p;
        p.num_topics = num_topics;
        p.alpha = alpha;
        p.beta = beta;
        p.lambda = lambda;
        p.corr_threshold = corr_threshold;
        p.iterations = gibbs_iters;
        p.burn_in = burn_in;
        p.average_estimates = average_estimates;
        p.seed = seed;
        return p;
    }
};

std::string artifact(const PipelineConfig& c, const char* name) { return (fs::path(c.out_dir) / name).string(); }

void require_file(const std::string& path, const std::string& what, const std::string& hint = {}) {
    if (path.empty()) throw MissingInput(what + " path not given" + hint);
    if (!fs::is_regular_file(path)) throw MissingInput(what + " not found: " + path + hint);
}

etm::Corpus load_corpus_artifact(const PipelineConfig& c) {
    const auto vocab = artifact(c, "vocab.txt");
    const auto corpus = artifact(c, "corpus.tsv");
    const std::string hint = "; run `etm preprocess` first";
    require_file(vocab, "vocabulary file", hint);
    require_file(corpus, "corpus artifact", hint);
    return etm::load_corpus(vocab, corpus);
}

etm::EmbeddingTable load_restricted_embeddings(const PipelineConfig& c, const etm::Corpus& corpus) {
    require_file(c.embeddings, "embedding file");
    const auto& words = corpus.vocabulary.words();
    return etm::load_embeddings(c.embeddings, etm::WordSet(words.begin(), words.end()));
}

int cmd_preprocess(const PipelineConfig& c) {
    require_file(c.corpus, "corpus file");
    std::optional<std::vector<int>> labels;
    if (!c.labels.empty()) {
        require_file(c.labels, "label file");
        labels = etm::read_labels(c.labels);
    }
    etm::WordSet stop;
    if (!c.stopwords.empty()) {
        require_file(c.stopwords, "stopword file");
        stop = etm::read_stopwords(c.stopwords);
    }
    etm::PreprocessOptions opts{c.min_len, c.max_len, c.min_freq};
    const auto corpus = etm::preprocess(etm::read_lines(c.corpus), stop, opts, labels);
    fs::create_directories(c.out_dir);
    etm::save_corpus(corpus, artifact(c, "vocab.txt"), artifact(c, "corpus.tsv"));

    std::cout << "texts: " << corpus.doc_count() << "\n"
              << "vocabulary: " << corpus.vocab_size() << "\n"
              << "tokens: " << corpus.token_count() << "\n"
              << "dropped: " << corpus.dropped_lines.size() << "\n";
    if (!corpus.dropped_lines.empty()) {
        std::cerr << "warning: dropped empty lines:";
        for (auto line : corpus.dropped_lines) std::cerr << ' ' << line;
        std::cerr << '\n';
    }
    return 0;
}

int cmd_cluster(const PipelineConfig& c) {
    const auto corpus = load_corpus_artifact(c);
    const auto table = load_restricted_embeddings(c, corpus);
    const etm::TokenEmbeddings space(table, corpus.vocabulary.words());

    etm::ClusterOptions opts;
    opts.num_pseudo = c.num_pseudo ? c.num_pseudo : etm::default_L(corpus.doc_count());
    opts.max_iters = c.cluster_iters;
    opts.seed = c.seed;
    std::cerr << "clustering " << corpus.doc_count() << " texts into L=" << opts.num_pseudo << " pseudo-texts"
              << (c.num_pseudo ? "" : " (n/50 rule)") << ", " << space.embedded_count() << "/" << corpus.vocab_size()
              << " words embedded\n";
    const auto set = etm::cluster(corpus, space, opts, etm::parse_backend(c.distance));
    etm::save_assignment(set, artifact(c, "assignment.tsv"));
    std::cout << "L: " << set.num_pseudo() << "\n";
    return 0;
}

int cmd_train(const PipelineConfig& c) {
    const auto corpus = load_corpus_artifact(c);
    const auto assignment_path = artifact(c, "assignment.tsv");
    require_file(assignment_path, "assignment file", "; run `etm cluster` first");
    const auto set = etm::load_assignment(assignment_path);
    const auto table = load_restricted_embeddings(c, corpus);
    const etm::TokenEmbeddings space(table, corpus.vocabulary.words());

    const auto params = c.model_params();
    params.validate();
    const auto pc = etm::build_pseudo_corpus(set, corpus);
    const auto ns = etm::build_neighbors(pc, space, params.corr_threshold);
    std::cerr << "training K=" << params.num_topics << " on L=" << set.num_pseudo() << " pseudo-texts, "
              << ns.total_edges() << " correlation edges\n";
    auto model = etm::train(pc, ns, params, [&](std::size_t sweep, const etm::TopicModelState&) {
        if (c.log_every && ((sweep + 1) % c.log_every == 0 || sweep + 1 == params.iterations)) {
            std::cerr << "sweep " << (sweep + 1) << "/" << params.iterations << "\n";
        }
    });

    etm::ModelDump dump{params, corpus.vocabulary.words(), set, std::move(model.estimates), std::move(model.state.z)};
    etm::save_model(dump, artifact(c, "model.json"));
    std::cout << "model: " << artifact(c, "model.json") << "\n";
    return 0;
}

int cmd_report(const PipelineConfig& c) {
    const auto model_path = artifact(c, "model.json");
    require_file(model_path, "model dump", "; run `etm train` first");
    const auto dump = etm::load_model(model_path);
    const auto corpus = load_corpus_artifact(c);
    if (corpus.vocabulary.words() != dump.vocabulary) {
        throw std::runtime_error("model vocabulary does not match the corpus artifact");
    }

    etm::export_topics(dump.estimates, corpus.vocabulary, c.top_words, artifact(c, "topics.tsv"));
    etm::write_topic_report(std::cout, dump.estimates, corpus.vocabulary, c.top_words);
    {
        std::ofstream out(artifact(c, "text_topics.tsv"), std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + artifact(c, "text_topics.tsv"));
        for (const auto& t : corpus.texts) out << t.id << '\t' << etm::assign_short_text(t, dump.estimates).topic << '\n';
    }

    if (!corpus.has_labels()) {
        std::cout << "NMI: n/a\n";
        return 0;
    }
    if (c.runs < 1) throw std::invalid_argument("--runs must be >= 1");
    const auto table = load_restricted_embeddings(c, corpus);
    const etm::TokenEmbeddings space(table, corpus.vocabulary.words());
    std::vector<int> gold;
    for (const auto& t : corpus.texts) gold.push_back(*t.gold_label);

    etm::PipelineOptions opts;
    opts.params = dump.params;
    opts.num_pseudo = dump.pseudo_texts.num_pseudo();
    opts.cluster_iters = c.cluster_iters;
    opts.backend = etm::parse_backend(c.distance);
    std::vector<double> scores;
    for (std::size_t r = 0; r < c.runs; ++r) {
        const auto run_seed = c.seed + r;
        const auto result = etm::run_pipeline(corpus, space, opts, run_seed);
        scores.push_back(etm::nmi(result.predicted, gold));
        std::cout << "run " << r << " seed " << run_seed << " NMI " << etm::format_fixed4(scores.back()) << "\n";
    }
    const auto summary = etm::mean_std(scores);
    std::cout << "NMI: " << etm::format_fixed4(summary.mean) << " +/- " << etm::format_fixed4(summary.std) << "\n";
    return 0;
}

struct SynthConfig {
    std::string out_dir = "etm_synth";
    std::size_t num_texts = 1000;
    std::size_t classes = 5;
    std::size_t words_per_class = 40;
    std::size_t min_tokens = 4;
    std::size_t max_tokens = 10;
    double dominance = 0.9;
    std::size_t dim = 16;
    std::uint64_t seed = 1;
};

int cmd_synth(const SynthConfig& s) {
    etm::PlantedShortTextOptions opt;
    opt.num_classes = s.classes;
    opt.num_texts = s.num_texts;
    opt.words_per_class = s.words_per_class;
    opt.min_tokens = s.min_tokens;
    opt.max_tokens = s.max_tokens;
    opt.dominance = s.dominance;
    opt.embedding_dim = s.dim;
    opt.seed = s.seed;
    const auto data = etm::generate_planted_short_texts(opt);

    fs::create_directories(s.out_dir);
    auto open = [&](const char* name) {
        std::ofstream out(fs::path(s.out_dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error(std::string("cannot write ") + name);
        return out;
    };
    {
        auto out = open("corpus.txt");
        for (const auto& line : data.lines) out << line << '\n';
    }
    {
        auto out = open("labels.txt");
        for (int l : data.labels) out << l << '\n';
    }
    {
        auto out = open("embeddings.txt");
        char buf[64];
        for (std::size_t w = 0; w < data.words.size(); ++w) {
            out << data.words[w];
            for (double x : data.vectors[w]) {
                std::snprintf(buf, sizeof buf, " %.17g", x);
                out << buf;
            }
            out << '\n';
        }
    }
    open("stopwords.txt");
    std::cout << "wrote " << data.lines.size() << " texts, " << data.words.size() << " words to " << s.out_dir << "\n";
    return 0;
}

void add_model_flags(CLI::App* cmd, PipelineConfig& c) {
    cmd->add_option("--num-topics,-K", c.num_topics, "number of topics K")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", c.alpha, "document-topic Dirichlet prior");
    cmd->add_option("--beta", c.beta, "topic-word Dirichlet prior");
    cmd->add_option("--lambda", c.lambda, "MRF strength (0 = plain LDA)");
    cmd->add_option("--corr-threshold", c.corr_threshold, "cosine distance below which words are correlated")
        ->check(CLI::Range(0.0, 2.0));
    cmd->add_option("--gibbs-iters", c.gibbs_iters, "Gibbs sweeps");
    cmd->add_option("--burn-in", c.burn_in, "sweeps skipped before averaging estimates");
    cmd->add_flag("--average-estimates", c.average_estimates, "average phi/theta over post-burn-in sweeps");
    cmd->add_option("--log-every", c.log_every, "progress interval in sweeps (0 = silent)");
}

void add_cluster_flags(CLI::App* cmd, PipelineConfig& c) {
    cmd->add_option("--num-pseudo,-L", c.num_pseudo, "number of pseudo-texts (default n/50)");
    cmd->add_option("--cluster-iters", c.cluster_iters, "maximum reassignment sweeps");
    cmd->add_option("--distance", c.distance, "text distance")
        ->check(CLI::IsMember({"relaxed-symmetric", "relaxed", "exact"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Embedding-based short-text topic modeling"};
    app.require_subcommand(1);
    PipelineConfig c;
    SynthConfig s;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out-dir,-o", c.out_dir, "artifact directory");
        cmd->add_option("--seed", c.seed, "random seed");
    };

    auto* pre = app.add_subcommand("preprocess", "normalize and filter raw short texts");
    add_common(pre);
    pre->add_option("--corpus", c.corpus, "raw corpus, one text per line")->required();
    pre->add_option("--labels", c.labels, "optional integer label per line");
    pre->add_option("--stopwords", c.stopwords, "stopword file");
    pre->add_option("--min-len", c.min_len, "minimum token length");
    pre->add_option("--max-len", c.max_len, "maximum token length");
    pre->add_option("--min-freq", c.min_freq, "minimum corpus frequency");

    auto* clu = app.add_subcommand("cluster", "aggregate short texts into pseudo-texts");
    add_common(clu);
    clu->add_option("--embeddings", c.embeddings, "word vector file")->required();
    add_cluster_flags(clu, c);

    auto* tr = app.add_subcommand("train", "run the MRF-regularized Gibbs sampler");
    add_common(tr);
    tr->add_option("--embeddings", c.embeddings, "word vector file")->required();
    add_model_flags(tr, c);

    auto* rep = app.add_subcommand("report", "topic report, per-text topics and NMI");
    add_common(rep);
    rep->add_option("--embeddings", c.embeddings, "word vector file (needed for NMI runs)");
    rep->add_option("--top-words", c.top_words, "words per topic")->check(CLI::PositiveNumber);
    rep->add_option("--runs", c.runs, "end-to-end runs for NMI mean/std")->check(CLI::PositiveNumber);
    add_cluster_flags(rep, c);

    auto* syn = app.add_subcommand("synth", "generate a planted labeled short-text dataset");
    syn->add_option("--out-dir,-o", s.out_dir, "output directory");
    syn->add_option("--num-texts", s.num_texts, "number of short texts");
    syn->add_option("--classes", s.classes, "planted classes/topics");
    syn->add_option("--words-per-class", s.words_per_class, "vocabulary block per class");
    syn->add_option("--min-tokens", s.min_tokens, "minimum tokens per text");
    syn->add_option("--max-tokens", s.max_tokens, "maximum tokens per text");
    syn->add_option("--dominance", s.dominance, "probability a token comes from the text's class");
    syn->add_option("--dim", s.dim, "embedding dimension");
    syn->add_option("--seed", s.seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*pre) return cmd_preprocess(c);
        if (*clu) return cmd_cluster(c);
        if (*tr) return cmd_train(c);
        if (*rep) return cmd_report(c);
        if (*syn) return cmd_synth(s);
    } catch (const MissingInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const etm::EmptyCorpusError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEmptyCorpus;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
