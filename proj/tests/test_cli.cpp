// Runs the built CLI as a subprocess.

#include <json.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path& scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("fewzeros_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string spec(const std::string& name) { return std::string(FEWZEROS_SPECS) + "/" + name; }

int run(const std::string& args) {
    const std::string cmd = std::string(FEWZEROS_CLI) + " " + args + " >" + (scratch() / "stdout").string() + " 2>" +
                            (scratch() / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json stdout_json() { return Json::parse(slurp(scratch() / "stdout")); }

}  // namespace

TEST(Cli, BoundValues) {
    ASSERT_EQ(run("bound --spec " + spec("circuit_2d.json")), 0);
    auto j = stdout_json();
    EXPECT_DOUBLE_EQ(j["lifted"].get<double>(), 2.25);
    EXPECT_DOUBLE_EQ(j["unmixed"].get<double>(), 0.75);
    ASSERT_EQ(run("bound --spec " + spec("binomial_pair.json")), 0);
    EXPECT_DOUBLE_EQ(stdout_json()["lifted"].get<double>(), 0.25);
    ASSERT_EQ(run("bound --spec " + spec("single_monomial.json") + " --format csv"), 0);
    EXPECT_NE(slurp(scratch() / "stdout").find("lifted,0"), std::string::npos);
}

TEST(Cli, ExitCodesForBadInput) {
    EXPECT_EQ(run("bound --spec /nonexistent.json"), 1);
    EXPECT_NE(slurp(scratch() / "stderr").find("cannot open"), std::string::npos);
    const auto bad = scratch() / "bad.json";
    std::ofstream(bad) << R"({"n":1,"equations":[{"support":[[0],["1/0"]],"variances":[1,1]}]})";
    EXPECT_EQ(run("bound --spec " + bad.string()), 1);
    EXPECT_NE(slurp(scratch() / "stderr").find("equations[0].support[1][0]"), std::string::npos);
    EXPECT_EQ(run("experiment --spec " + spec("binomial_pair.json") + " --trials 0"), 1);
    EXPECT_EQ(run("rice --mode univariate --spec " + spec("circuit_2d.json")), 1);
    EXPECT_NE(slurp(scratch() / "stderr").find("n = 1"), std::string::npos);
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, SpecRoundTrip) {
    for (const auto& entry : fs::directory_iterator(FEWZEROS_SPECS)) {
        const auto once = scratch() / "once.json", twice = scratch() / "twice.json";
        ASSERT_EQ(run("spec --spec " + entry.path().string() + " --out " + once.string()), 0) << entry.path();
        ASSERT_EQ(run("spec --spec " + once.string() + " --out " + twice.string()), 0);
        EXPECT_EQ(slurp(once), slurp(twice)) << entry.path();
    }
}

TEST(Cli, CsvIsByteIdenticalAcrossThreads) {
    const auto a = scratch() / "a.csv", b = scratch() / "b.csv";
    const std::string common = "experiment --spec " + spec("trinomials_t33.json") +
                               " --trials 400 --seed 9 --format csv --no-timing --out ";
    ASSERT_EQ(run(common + a.string() + " --threads 1"), 0);
    ASSERT_EQ(run(common + b.string() + " --threads 2"), 0);
    const auto ca = slurp(a);
    EXPECT_EQ(ca, slurp(b));
    EXPECT_EQ(ca.substr(0, ca.find('\n')), "trial,count,certified,seconds");
    EXPECT_TRUE(fs::exists(a.string() + ".summary.json"));
    const auto summary = Json::parse(slurp(a.string() + ".summary.json"));
    EXPECT_EQ(summary["monte_carlo"]["trials"], 400);
    EXPECT_EQ(summary["wall_seconds"], 0.0);
}

TEST(Cli, ExperimentJsonReport) {
    ASSERT_EQ(run("experiment --spec " + spec("univariate_0to4.json") + " --trials 3000 --seed 4"), 0);
    const auto j = stdout_json();
    EXPECT_EQ(j["per_trial"].size(), 3000u);
    EXPECT_TRUE(j["rice"]["agrees_within_3se"].get<bool>());
    EXPECT_TRUE(j["mean_minus_3se_le_lifted"].get<bool>());
}

TEST(Cli, RiceModes) {
    ASSERT_EQ(run("rice --mode univariate --spec " + spec("univariate_0_9.json")), 0);
    EXPECT_NEAR(stdout_json()["value"].get<double>(), 0.5, 1e-7);
    ASSERT_EQ(run("rice --mode binomial --n 2 --trials 20000 --quad-tol 1e-12"), 0);
    const auto j = stdout_json();
    EXPECT_DOUBLE_EQ(j["closed_form"].get<double>(), 0.0625);
    EXPECT_NEAR(j["quadrature"]["value"].get<double>(), 0.0625, 1e-10);
    EXPECT_NEAR(j["monte_carlo"]["value"].get<double>(), 0.0625, 4 * j["monte_carlo"]["stderr"].get<double>());
}

TEST(Cli, CellsForBinomialPair) {
    ASSERT_EQ(run("cells --spec " + spec("binomial_pair.json")), 0);
    const auto j = stdout_json();
    EXPECT_EQ(j["vertex_count"], 4);
    EXPECT_TRUE(j["cover_check"]["ok"].get<bool>());
}
