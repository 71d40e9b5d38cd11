#include "cli.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace fs = std::filesystem;
using astref::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args, const std::string& stdin_text = "") {
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    const int code = run(args, in, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("astref_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
        write("good.mpy", "import os\n\ndef f(a):\n    if a > 1:\n        os.path(a)\n    return a\n");
        write("broken.mpy", "def f(:\n    x = 1\n");
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, MetricsJson) {
    const Result r = call({"metrics", path("good.mpy"), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("per_function").at("f").at("cyclomatic"), 2);
    EXPECT_EQ(j.at("module").at("coupling"), 1);
    EXPECT_EQ(j.at("flat_features").size(), 35u);
    EXPECT_EQ(j.at("seed"), 42);
    EXPECT_NE(r.err.find("seed=42"), std::string::npos);
}

TEST_F(CliTest, MetricsCsvFollowsFeatureLayout) {
    const Result r = call({"metrics", path("good.mpy"), "--format", "csv"});
    ASSERT_EQ(r.code, 0);
    const std::string header = r.out.substr(0, r.out.find('\n'));
    EXPECT_EQ(std::count(header.begin(), header.end(), ','), 34);
    EXPECT_EQ(header.substr(0, header.find(',')), "count_Module");
}

TEST_F(CliTest, ParseErrorExitsTwoWithPosition) {
    const Result r = call({"parse", path("broken.mpy")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("1:7"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, UsageAndDataErrors) {
    EXPECT_EQ(call({}).code, 1);
    EXPECT_EQ(call({"metrics", path("good.mpy"), "--bogus"}).code, 1);
    EXPECT_EQ(call({"train", "--model", "svm"}).code, 1);
    EXPECT_EQ(call({"metrics", path("missing.mpy")}).code, 3);
    EXPECT_EQ(call({"eval"}, "{\"version\":\"1\"}").code, 3);
    EXPECT_EQ(call({"--help"}).code, 0);
}

TEST_F(CliTest, ParseGraphRulesOutputs) {
    Result r = call({"parse", path("good.mpy"), "--format", "json"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out).at("kind"), "Module");
    r = call({"parse", "-"}, "x = 1\n");
    EXPECT_EQ(r.out, "x = 1\n");
    r = call({"graph", path("good.mpy")});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out).at("version"), "1");
    r = call({"graph", path("good.mpy"), "--format", "dot"});
    EXPECT_EQ(r.out.rfind("digraph", 0), 0u);
    r = call({"rules", path("good.mpy"), "--format", "json"});
    EXPECT_EQ(nlohmann::json::parse(r.out).at("refactor"), 0);
}

TEST_F(CliTest, EndToEndPipeline) {
    const Result synth = call({"synth", "--n", "40", "--seed", "3"});
    ASSERT_EQ(synth.code, 0) << synth.err;
    const Result built = call({"corpus", "build", "--seed", "3"}, synth.out);
    ASSERT_EQ(built.code, 0) << built.err;
    EXPECT_NE(built.err.find("ingested 40"), std::string::npos);
    const Result tree = call({"train", "--model", "dtree", "--seed", "3"}, built.out);
    ASSERT_EQ(tree.code, 0) << tree.err;
    const Result gnn = call({"train", "--model", "gnn", "--epochs", "2", "--units", "8", "--layers", "2", "--seed", "3"},
                            tree.out);
    ASSERT_EQ(gnn.code, 0) << gnn.err;
    const auto manifest = nlohmann::json::parse(gnn.out);
    EXPECT_TRUE(manifest.at("models").contains("dtree"));
    EXPECT_TRUE(manifest.at("models").contains("gnn"));

    const Result eval = call({"eval", "--format", "json", "--pr-out", path("pr.csv")}, gnn.out);
    ASSERT_EQ(eval.code, 0) << eval.err;
    const auto report = nlohmann::json::parse(eval.out);
    EXPECT_EQ(report.at("seed"), 3);
    EXPECT_EQ(report.at("models").size(), 4u);
    EXPECT_TRUE(fs::exists(path("pr.csv")));
    EXPECT_EQ(call({"eval", "--format", "json", "--pr-out", path("pr.csv")}, gnn.out).out, eval.out);

    write("manifest.json", gnn.out);
    const Result s = call({"suggest", path("good.mpy"), "--model", path("manifest.json"), "--format", "json"});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_TRUE(nlohmann::json::parse(s.out).contains("eligible"));
}

TEST_F(CliTest, StagesInheritUpstreamSeed) {
    const Result synth = call({"synth", "--n", "30", "--seed", "7"});
    const Result built = call({"corpus", "build"}, synth.out);
    ASSERT_EQ(built.code, 0) << built.err;
    EXPECT_EQ(built.err.rfind("seed=7\n", 0), 0u);
    EXPECT_EQ(nlohmann::json::parse(built.out).at("seed"), 7);
    const Result tree = call({"train", "--model", "dtree"}, built.out);
    EXPECT_EQ(tree.err.rfind("seed=7\n", 0), 0u);
    const Result over = call({"corpus", "build", "--seed", "8"}, synth.out);
    EXPECT_EQ(nlohmann::json::parse(over.out).at("seed"), 8);
}

TEST_F(CliTest, CorpusFromDirectory) {
    write("labels.json", R"({"good.mpy": {"label": 0}, "broken.mpy": {"label": 0}})");
    const Result r = call({"corpus", "build", "--in", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("provenance").at("ingested"), 2);
    EXPECT_EQ(j.at("provenance").at("parse_failed"), 1);
}

TEST_F(CliTest, VizWritesFiles) {
    Result r = call({"viz", path("good.mpy"), "--split", "1", "--out", path("v.html")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream html(path("v.html"));
    const std::string text((std::istreambuf_iterator<char>(html)), {});
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n') > 0, true);
    EXPECT_NE(text.find("<svg"), std::string::npos);
    r = call({"viz", path("good.mpy"), "--out", path("v.dot")});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(fs::exists(path("v.dot")));
    EXPECT_EQ(call({"viz", path("good.mpy"), "--split", "0", "--out", path("x.dot")}).code, 3);
}
