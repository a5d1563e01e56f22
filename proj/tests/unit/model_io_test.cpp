#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "etm/model_io.hpp"

namespace {

etm::ModelDump sample_dump() {
    etm::ModelDump m;
    m.params.num_topics = 2;
    m.params.alpha = 0.05;
    m.params.beta = 0.01;
    m.params.lambda = 0.7;
    m.params.corr_threshold = 0.35;
    m.params.iterations = 12;
    m.params.burn_in = 4;
    m.params.average_estimates = true;
    m.params.seed = 1234567890123ULL;
    m.vocabulary = {"alpha", "beta", "gamma"};
    m.pseudo_texts = etm::PseudoTextSet(2, {1, 0, 1});
    m.estimates.phi = etm::Matrix::from_rows({{0.1, 0.2, 0.7}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}});
    m.estimates.theta = etm::Matrix::from_rows({{0.25, 0.75}, {0.6, 0.4}});
    m.z = {{0, 1, 1}, {1, 0}};
    return m;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(ModelIo, RoundTripIsExact) {
    const auto m = sample_dump();
    const auto dir = std::filesystem::temp_directory_path() / "etm_model_io";
    std::filesystem::create_directories(dir);
    const auto a = (dir / "a.json").string();
    const auto b = (dir / "b.json").string();
    etm::save_model(m, a);
    const auto back = etm::load_model(a);
    EXPECT_EQ(back.params.num_topics, 2u);
    EXPECT_EQ(back.params.alpha, 0.05);
    EXPECT_EQ(back.params.seed, 1234567890123ULL);
    EXPECT_TRUE(back.params.average_estimates);
    EXPECT_EQ(back.vocabulary, m.vocabulary);
    EXPECT_EQ(back.pseudo_texts, m.pseudo_texts);
    EXPECT_EQ(back.estimates.phi, m.estimates.phi);
    EXPECT_EQ(back.estimates.theta, m.estimates.theta);
    EXPECT_EQ(back.z, m.z);
    etm::save_model(back, b);
    EXPECT_EQ(slurp(a), slurp(b));
    std::filesystem::remove_all(dir);
}

TEST(ModelIo, RejectsMalformedDumps) {
    auto j = etm::model_to_json(sample_dump());
    auto wrong_format = j;
    wrong_format["format"] = "other";
    EXPECT_THROW(etm::model_from_json(wrong_format), std::runtime_error);
    auto wrong_shape = j;
    wrong_shape["vocabulary"].push_back("delta");
    EXPECT_THROW(etm::model_from_json(wrong_shape), std::runtime_error);
    auto missing = j;
    missing.erase("theta");
    EXPECT_ANY_THROW(etm::model_from_json(missing));
    EXPECT_THROW(etm::load_model("/nonexistent/model.json"), std::runtime_error);
}
