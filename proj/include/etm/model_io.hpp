#pragma once

// JSON model dump: parameters, vocabulary, pseudo-text assignment, phi,
// theta and the final topic assignments z.

#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "etm/clustering.hpp"
#include "etm/corpus.hpp"
#include "etm/matrix.hpp"
#include "etm/topic_model.hpp"

namespace etm {

inline constexpr int kModelFormatVersion = 1;

struct ModelDump {
    ModelParams params;
    std::vector<std::string> vocabulary;
    PseudoTextSet pseudo_texts;
    TopicEstimates estimates;
    std::vector<std::vector<Topic>> z;
};

inline nlohmann::json params_to_json(const ModelParams& p) {
    return {{"num_topics", p.num_topics},         {"alpha", p.alpha},
            {"beta", p.beta},                     {"lambda", p.lambda},
            {"corr_threshold", p.corr_threshold}, {"iterations", p.iterations},
            {"burn_in", p.burn_in},               {"average_estimates", p.average_estimates},
            {"seed", p.seed}};
}

inline ModelParams params_from_json(const nlohmann::json& j) {
    ModelParams p;
    p.num_topics = j.at("num_topics").get<std::size_t>();
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    p.lambda = j.at("lambda").get<double>();
    p.corr_threshold = j.at("corr_threshold").get<double>();
    p.iterations = j.at("iterations").get<std::size_t>();
    p.burn_in = j.at("burn_in").get<std::size_t>();
    p.average_estimates = j.at("average_estimates").get<bool>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

inline nlohmann::json model_to_json(const ModelDump& m) {
    nlohmann::json j;
    j["format"] = "etm-model";
    j["version"] = kModelFormatVersion;
    j["params"] = params_to_json(m.params);
    j["vocabulary"] = m.vocabulary;
    j["num_pseudo_texts"] = m.pseudo_texts.num_pseudo();
    j["assignment"] = m.pseudo_texts.assignment();
    j["phi"] = m.estimates.phi.to_rows();
    j["theta"] = m.estimates.theta.to_rows();
    j["z"] = m.z;
    return j;
}

inline ModelDump model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "etm-model") throw std::runtime_error("not an etm model dump");
    if (j.at("version").get<int>() != kModelFormatVersion) throw std::runtime_error("unsupported model dump version");
    ModelDump m;
    m.params = params_from_json(j.at("params"));
    m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    m.pseudo_texts = PseudoTextSet(j.at("num_pseudo_texts").get<std::size_t>(),
                                   j.at("assignment").get<std::vector<std::size_t>>());
    m.estimates.phi = Matrix::from_rows(j.at("phi").get<std::vector<std::vector<double>>>());
    m.estimates.theta = Matrix::from_rows(j.at("theta").get<std::vector<std::vector<double>>>());
    m.z = j.at("z").get<std::vector<std::vector<Topic>>>();
    if (m.estimates.phi.rows() != m.params.num_topics || m.estimates.phi.cols() != m.vocabulary.size()) {
        throw std::runtime_error("model dump: phi shape does not match K x V");
    }
    if (m.estimates.theta.rows() != m.pseudo_texts.num_pseudo()) {
        throw std::runtime_error("model dump: theta shape does not match L x K");
    }
    return m;
}

inline void save_model(const ModelDump& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model dump '" + path + "'");
    out << model_to_json(m).dump(1) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write failed for model dump '" + path + "'");
}

inline ModelDump load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model dump '" + path + "'");
    return model_from_json(nlohmann::json::parse(in));
}

}  // namespace etm
