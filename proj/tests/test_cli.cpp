#include <gtest/gtest.h>

#include <algorithm>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_commands.hpp"

using namespace pathdist;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("pathdist_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }

    std::string write(const std::string& name, const std::string& text) const {
        const fs::path file = path_ / name;
        std::ofstream(file) << text;
        return file.string();
    }
    std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

struct CommandResult {
    int code;
    std::string out;
    std::string err;
};

CommandResult compute(const cli::ComputeConfig& config) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::cmd_compute(config, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(CliCompute, PrintsDeltaAndSqrt) {
    TempDir dir;
    cli::ComputeConfig config;
    config.first_path = dir.write("a.nwk", "(A:1,B:2,C:3);\n");
    config.second_path = dir.write("b.nwk", "(A:2,B:1,C:3);\n");
    config.print_sqrt = true;
    const CommandResult run = compute(config);
    EXPECT_EQ(run.code, cli::kOk);
    EXPECT_EQ(run.out, "delta=2\nsqrt_delta=1.4142135623730951\n");
    config.method = Method::quadratic;
    EXPECT_EQ(compute(config).out, run.out);
}

TEST(CliCompute, OutputIsDeterministic) {
    TempDir dir;
    auto [t1, t2] = testkit::random_tree_pair(300, 5, testkit::LengthMode::real);
    cli::ComputeConfig config;
    config.first_path = dir.write("a.nwk", write_newick(t1));
    config.second_path = dir.write("b.nwk", write_newick(t2));
    EXPECT_EQ(compute(config).out, compute(config).out);
}

TEST(CliCompute, TopologyOnly) {
    TempDir dir;
    cli::ComputeConfig config;
    config.first_path = dir.write("a.nwk", "((A:9,B:9):9,(C:9,D:9):9);");
    config.second_path = dir.write("b.nwk", "((A:1,C:1):1,(B:1,D:1):1);");
    config.topology_only = true;
    EXPECT_EQ(compute(config).out, "delta=4\n");
}

TEST(CliCompute, InputErrorsExitTwo) {
    TempDir dir;
    cli::ComputeConfig config;
    config.first_path = dir.write("a.nwk", "((A:1,B:2);");
    config.second_path = dir.write("b.nwk", "(A:2,B:1,C:3);");
    CommandResult run = compute(config);
    EXPECT_EQ(run.code, cli::kInputError);
    EXPECT_NE(run.err.find("a.nwk: line 1, column"), std::string::npos) << run.err;
    EXPECT_TRUE(run.out.empty());

    config.first_path = dir.write("c.nwk", "(A:1,B:2,D:3);");
    run = compute(config);
    EXPECT_EQ(run.code, cli::kInputError);
    EXPECT_NE(run.err.find("{C,D}"), std::string::npos) << run.err;

    config.first_path = dir.path("missing.nwk");
    EXPECT_EQ(compute(config).code, cli::kInputError);
}

TEST(CliVerify, PassesOnDefaultsSubset) {
    cli::VerifyConfig config;
    config.trials = 25;
    config.max_n = 40;
    std::ostringstream out;
    std::ostringstream err;
    EXPECT_EQ(cli::cmd_verify(config, out, err), cli::kOk) << err.str();
    EXPECT_NE(out.str().find("inner_product_oracle: 25/25"), std::string::npos);
    EXPECT_EQ(out.str().substr(out.str().size() - 5), "PASS\n");
}

TEST(CliVerify, InjectedFaultFailsWithReproducer) {
    cli::VerifyConfig config;
    config.trials = 5;
    config.max_n = 12;
    config.inject_fault = true;
    std::ostringstream out;
    std::ostringstream err;
    EXPECT_EQ(cli::cmd_verify(config, out, err), cli::kVerificationFailure);
    EXPECT_NE(out.str().find("fast_equals_quadratic_exact: 0/5"), std::string::npos) << out.str();
    EXPECT_NE(err.str().find("reproduce: verify --seed 1 --trials 1"), std::string::npos) << err.str();
    EXPECT_NE(err.str().find("tree1 (integer lengths): ("), std::string::npos);
}

TEST(CliVerify, RejectsBadRanges) {
    std::ostringstream out;
    std::ostringstream err;
    cli::VerifyConfig config;
    config.min_n = 3;
    EXPECT_EQ(cli::cmd_verify(config, out, err), cli::kInputError);
    config.min_n = 10;
    config.max_n = 9;
    EXPECT_EQ(cli::cmd_verify(config, out, err), cli::kInputError);
    config.max_n = 10;
    config.trials = 0;
    EXPECT_EQ(cli::cmd_verify(config, out, err), cli::kInputError);
}

TEST(CliBench, WritesCsv) {
    TempDir dir;
    cli::BenchConfig config;
    config.sizes = {100, 200};
    config.csv_path = dir.path("bench.csv");
    std::ostringstream out;
    std::ostringstream err;
    ASSERT_EQ(cli::cmd_bench(config, out, err), cli::kOk);
    std::ifstream in(config.csv_path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        lines.push_back(line);
    }
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0], "n,method,millis,touched_nodes");
    EXPECT_EQ(lines[1].rfind("100,fast,", 0), 0u);
    EXPECT_EQ(lines[2].rfind("100,quadratic,", 0), 0u);
    EXPECT_EQ(lines[2].substr(lines[2].size() - 2), ",0");
    EXPECT_EQ(lines[3].rfind("200,fast,", 0), 0u);
}

TEST(CliBench, SkipsQuadraticAboveCutoff) {
    cli::BenchConfig config;
    config.sizes = {cli::kQuadraticCutoff + 1};
    std::ostringstream out;
    std::ostringstream err;
    ASSERT_EQ(cli::cmd_bench(config, out, err), cli::kOk);
    EXPECT_EQ(out.str().find("quadratic"), std::string::npos);
}

TEST(CliBench, FastMillisScaleQuasilinearly) {
    cli::BenchConfig config;
    config.sizes = {1000, 2000, 4000};
    std::ostringstream err;
    // Minimum over repeats damps scheduler noise.
    std::vector<double> best(3, 1e300);
    for (int repeat = 0; repeat < 5; ++repeat) {
        std::ostringstream out;
        ASSERT_EQ(cli::cmd_bench(config, out, err), cli::kOk);
        std::istringstream rows(out.str());
        std::string line;
        std::getline(rows, line);
        int row = 0;
        int fast = 0;
        while (std::getline(rows, line)) {
            ++row;
            if (line.find(",fast,") != std::string::npos) {
                const auto first = line.find(',', line.find(',') + 1);
                best[fast] = std::min(best[fast], std::stod(line.substr(first + 1)));
                ++fast;
            }
        }
        EXPECT_LE(row, 6);
    }
    EXPECT_LE(best[1] / best[0], 2.6);
    EXPECT_LE(best[2] / best[1], 2.6);
}

TEST(CliBench, RejectsBadSizes) {
    std::ostringstream out;
    std::ostringstream err;
    cli::BenchConfig config;
    EXPECT_EQ(cli::cmd_bench(config, out, err), cli::kInputError);
    config.sizes = {200, 100};
    EXPECT_EQ(cli::cmd_bench(config, out, err), cli::kInputError);
    config.sizes = {3};
    EXPECT_EQ(cli::cmd_bench(config, out, err), cli::kInputError);
}
