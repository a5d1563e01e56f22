#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("etm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    CliRun run_etm(const std::string& args) const {
        const auto out = dir_ / "stdout.txt";
        const auto err = dir_ / "stderr.txt";
        const std::string cmd = std::string("\"") + ETM_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                                err.string() + "\"";
        const int status = std::system(cmd.c_str());
        CliRun r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    std::string p(const std::string& name) const { return (dir_ / name).string(); }

    /// synth + preprocess into `out`; returns the preprocess run.
    CliRun prepare(const std::string& out, std::size_t num_texts, bool with_labels = true) const {
        const auto s = run_etm("synth --out-dir " + p("data") + " --num-texts " + std::to_string(num_texts) + " --seed 3");
        EXPECT_EQ(s.code, 0) << s.err;
        std::string args = "preprocess --corpus " + p("data/corpus.txt") + " --stopwords " + p("data/stopwords.txt") +
                           " --out-dir " + p(out);
        if (with_labels) args += " --labels " + p("data/labels.txt");
        return run_etm(args);
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, FullPipelineProducesArtifacts) {
    ASSERT_EQ(prepare("run", 100).code, 0);
    const std::string emb = " --embeddings " + p("data/embeddings.txt");

    const auto c = run_etm("cluster --out-dir " + p("run") + emb + " --seed 5");
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_NE(c.err.find("L=2 pseudo-texts (n/50 rule)"), std::string::npos) << c.err;
    EXPECT_TRUE(fs::exists(p("run/assignment.tsv")));

    const auto t = run_etm("train --out-dir " + p("run") + emb + " -K 5 --gibbs-iters 50 --log-every 25 --seed 5");
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_NE(t.err.find("sweep 50/50"), std::string::npos);
    EXPECT_TRUE(fs::exists(p("run/model.json")));

    const auto r = run_etm("report --out-dir " + p("run") + emb + " --runs 2 --top-words 4 --seed 5");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("run 1 seed 6 NMI "), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("NMI: "), std::string::npos);
    EXPECT_NE(r.out.find(" +/- "), std::string::npos);

    const auto topics = slurp(p("run/topics.tsv"));
    EXPECT_EQ(std::count(topics.begin(), topics.end(), '\n'), 5);
    const auto text_topics = slurp(p("run/text_topics.tsv"));
    EXPECT_EQ(std::count(text_topics.begin(), text_topics.end(), '\n'), 100);
}

TEST_F(CliTest, ExplicitPseudoTextCountOverridesDefault) {
    ASSERT_EQ(prepare("run", 100).code, 0);
    const auto c = run_etm("cluster --out-dir " + p("run") + " --embeddings " + p("data/embeddings.txt") + " -L 7");
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_NE(c.out.find("L: 7"), std::string::npos);
    EXPECT_EQ(c.err.find("n/50 rule"), std::string::npos);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
    ASSERT_EQ(prepare("run", 100).code, 0);
    const std::string emb = " --embeddings " + p("data/embeddings.txt");
    std::string models[2];
    std::string reports[2];
    for (int i = 0; i < 2; ++i) {
        ASSERT_EQ(run_etm("cluster --out-dir " + p("run") + emb + " --seed 9").code, 0);
        ASSERT_EQ(run_etm("train --out-dir " + p("run") + emb + " -K 5 --gibbs-iters 30 --seed 9").code, 0);
        const auto r = run_etm("report --out-dir " + p("run") + emb + " --seed 9");
        ASSERT_EQ(r.code, 0) << r.err;
        models[i] = slurp(p("run/model.json"));
        reports[i] = r.out;
    }
    EXPECT_EQ(models[0], models[1]);
    EXPECT_EQ(reports[0], reports[1]);
    EXPECT_NE(reports[0].find("+/- 0.0000"), std::string::npos) << reports[0];
}

TEST_F(CliTest, NmiNotAvailableWithoutLabels) {
    ASSERT_EQ(prepare("run", 60, false).code, 0);
    const std::string emb = " --embeddings " + p("data/embeddings.txt");
    ASSERT_EQ(run_etm("cluster --out-dir " + p("run") + emb).code, 0);
    ASSERT_EQ(run_etm("train --out-dir " + p("run") + emb + " -K 3 --gibbs-iters 10").code, 0);
    const auto r = run_etm("report --out-dir " + p("run"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("NMI: n/a"), std::string::npos);
}

TEST_F(CliTest, MissingCorpusExitsWithInputError) {
    const auto r = run_etm("preprocess --corpus " + p("nope.txt") + " --out-dir " + p("run"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("nope.txt"), std::string::npos);
}

TEST_F(CliTest, AllStopwordCorpusExitsWithEmptyCorpusError) {
    std::ofstream(p("corpus.txt")) << "the and\nthe\n";
    std::ofstream(p("stop.txt")) << "the\nand\n";
    const auto r = run_etm("preprocess --corpus " + p("corpus.txt") + " --stopwords " + p("stop.txt") + " --out-dir " +
                       p("run"));
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(CliTest, TrainWithoutAssignmentNamesTheMissingStep) {
    ASSERT_EQ(prepare("run", 60).code, 0);
    const auto r = run_etm("train --out-dir " + p("run") + " --embeddings " + p("data/embeddings.txt"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("assignment"), std::string::npos);
    EXPECT_NE(r.err.find("etm cluster"), std::string::npos);
}

TEST_F(CliTest, MalformedEmbeddingsReportLine) {
    ASSERT_EQ(prepare("run", 60).code, 0);
    std::ofstream(p("bad.txt")) << "c0w000 1 0\nc0w001 1 x\n";
    const auto r = run_etm("cluster --out-dir " + p("run") + " --embeddings " + p("bad.txt"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}
