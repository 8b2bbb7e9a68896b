#include "commands.hpp"

#include "chaosres/report.hpp"
#include "chaosres/tensor_io.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace chaosres;
using chaosres::cli::run;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    Outcome o;
    o.code = run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

std::string temp_file(const std::string& name, const std::string& contents) {
    const auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream(path) << contents;
    return path;
}

}  // namespace

TEST(CliProfile, Identity) {
    const auto o = call({"profile", "--identity", "4"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto j = Json::parse(o.out);
    EXPECT_DOUBLE_EQ(j["frobenius"].get<double>(), 2.0);
    EXPECT_NEAR(j["stable_rank"].get<double>(), 4.0, 1e-9);
}

TEST(CliProfile, DegreeThreeBlockFile) {
    const std::string path = std::string(CHAOSRES_TEST_DATA) + "/block3.json";
    const auto o = call({"profile", "--file", path});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_DOUBLE_EQ(Json::parse(o.out)["frobenius_sq"].get<double>(), 16.0);
}

TEST(CliProfile, GammaTable) {
    const auto o = call({"profile", "--block", "n=4", "w=2", "d=2", "--gamma"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_DOUBLE_EQ(Json::parse(o.out)["gamma"]["aggregate"].get<double>(), 8.0);
}

TEST(CliProfile, MalformedFileNamesTheEntry) {
    const auto path = temp_file("chaosres_bad.json", R"({"dims":[2,2],"entries":[{"idx":[1,1],"val":1},{"idx":[1,9],"val":2}]})");
    const auto o = call({"profile", "--file", path});
    EXPECT_EQ(o.code, cli::exit_parse);
    EXPECT_NE(o.err.find("entries[1]"), std::string::npos) << o.err;
}

TEST(CliProfile, UsageErrors) {
    EXPECT_EQ(call({"profile"}).code, cli::exit_usage);
    EXPECT_EQ(call({"profile", "--identity", "3", "--block", "n=4", "w=2", "d=2"}).code, cli::exit_usage);
    EXPECT_EQ(call({"nonsense"}).code, cli::exit_usage);
    EXPECT_EQ(call({"profile", "--random", "d=3", "n=3", "colour=red"}).code, cli::exit_parse);
}

TEST(CliCertify, IdentityRowsAreMonotone) {
    const auto o = call({"certify", "--identity", "16", "--r", "1..8"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto lines = csv_lines(o.out);
    ASSERT_EQ(lines.size(), 9u);
    const auto header = lines[0];
    std::size_t total_col = 0, col = 0;
    for (std::size_t p = 0, q; p <= header.size(); p = q + 1, ++col) {
        q = header.find(',', p);
        if (q == std::string::npos) q = header.size();
        if (header.substr(p, q - p) == "total") total_col = col;
    }
    double prev = -1.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream row(lines[i]);
        std::string cell;
        for (std::size_t c = 0; c <= total_col; ++c) std::getline(row, cell, ',');
        const double v = std::stod(cell);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(CliCertify, ClosedFormMatchesMaterialized) {
    const auto closed = call({"certify", "--block", "n=64", "w=4", "d=3", "--r", "1..4", "--closed-form", "--format", "json"});
    const auto direct = call({"certify", "--block", "n=64", "w=4", "d=3", "--r", "1..4", "--format", "json"});
    ASSERT_EQ(closed.code, 0) << closed.err;
    ASSERT_EQ(direct.code, 0) << direct.err;
    const auto a = Json::parse(closed.out), b = Json::parse(direct.out);
    ASSERT_EQ(a.size(), 4u);
    ASSERT_EQ(b.size(), 4u);
    for (std::size_t row = 0; row < 4; ++row)
        for (auto it = b[row]["terms"].begin(); it != b[row]["terms"].end(); ++it) {
            const double x = a[row]["terms"][it.key()].get<double>(), y = it.value().get<double>();
            EXPECT_LE(std::abs(x - y), 1e-12 * std::max(1.0, std::abs(y))) << it.key();
        }
}

TEST(CliCertify, QuadraticDiagonalIsAnError) {
    const auto o = call({"certify", "--file", std::string(CHAOSRES_TEST_DATA) + "/diagonal.json", "--quadratic"});
    EXPECT_NE(o.code, 0);
    EXPECT_NE(o.err.find("degenerate"), std::string::npos) << o.err;
}

TEST(CliCertify, RangeBeyondNIsUsageError) {
    EXPECT_EQ(call({"certify", "--identity", "4", "--r", "1..9"}).code, cli::exit_usage);
    EXPECT_EQ(call({"certify", "--identity", "4", "--c1", "-1"}).code, cli::exit_usage);
}

TEST(CliEmpirical, IdentityRowAndDeterminism) {
    const std::vector<std::string> args{"empirical", "--identity", "4", "--x", "0", "--trials", "2000", "--seed", "7"};
    const auto a = call(args), b = call(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto lines = csv_lines(a.out);
    ASSERT_GE(lines.size(), 2u);
    EXPECT_EQ(lines[0], "r,estimate,stderr");
    std::istringstream row(lines[1]);
    std::string r, est, se;
    std::getline(row, r, ',');
    std::getline(row, est, ',');
    std::getline(row, se, ',');
    EXPECT_EQ(r, "0");
    EXPECT_NEAR(std::stod(est), 0.375, 4 * std::stod(se));
}

TEST(CliEmpirical, OutputIndependentOfThreads) {
    const std::vector<std::string> base{"empirical", "--random", "d=3", "n=3", "seed=2", "--x", "1", "--trials", "300", "--seed", "5"};
    auto one = base, four = base;
    one.insert(one.end(), {"--threads", "1"});
    four.insert(four.end(), {"--threads", "4"});
    EXPECT_EQ(call(one).out, call(four).out);
}

TEST(CliEmpirical, ZeroTrialsIsUsageError) {
    EXPECT_EQ(call({"empirical", "--identity", "4", "--x", "0", "--trials", "0"}).code, cli::exit_usage);
}

TEST(CliEmpirical, GuardMessageNamesBudget) {
    const auto o = call({"empirical", "--random", "d=3", "n=10", "seed=1", "--x", "0", "--trials", "2"});
    EXPECT_EQ(o.code, cli::exit_guard);
    EXPECT_FALSE(o.err.empty());
}

TEST(CliVerify, Suites) {
    const auto g = call({"verify", "--identity", "6", "--suite", "gamma"});
    EXPECT_EQ(g.code, 0) << g.out << g.err;
    EXPECT_NE(g.out.find("[PASS]"), std::string::npos);
    EXPECT_EQ(call({"verify", "--random", "d=3", "n=3", "seed=1", "--suite", "radius"}).code, 0);
    EXPECT_EQ(call({"verify", "--identity", "8", "--suite", "concentration", "--trials", "300"}).code, 0);
    EXPECT_EQ(call({"verify", "--block", "n=8", "w=2", "d=2", "--suite", "decoupling", "--trials", "20"}).code, 0);
    const auto refused = call({"verify", "--random", "d=3", "n=9", "seed=1", "--suite", "gamma"});
    EXPECT_EQ(refused.code, cli::exit_guard);
    EXPECT_FALSE(refused.err.empty());
    EXPECT_EQ(call({"verify", "--identity", "4", "--suite", "everything"}).code, cli::exit_usage);
}

TEST(CliOutput, WritesToFile) {
    const auto path = (std::filesystem::temp_directory_path() / "chaosres_cli_out.json").string();
    ASSERT_EQ(call({"profile", "--identity", "3", "--out", path}).code, 0);
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_DOUBLE_EQ(Json::parse(buf.str())["frobenius"].get<double>(), std::sqrt(3.0));
    std::filesystem::remove(path);
}

TEST(Generators, BlockAndRandom) {
    const auto b = cli::block_tensor(6, 3, 3, 2.0);
    EXPECT_EQ(b.nnz(), 2u * 27u);
    EXPECT_EQ(b.at({0, 2, 1}), 2.0);
    EXPECT_EQ(b.at({0, 3, 1}), 0.0);
    const auto r1 = cli::random_tensor(3, 4, 0.3, 9), r2 = cli::random_tensor(3, 4, 0.3, 9);
    EXPECT_TRUE(r1 == r2);
    EXPECT_FALSE(r1.is_zero());
    EXPECT_TRUE(r1.has_integer_coefficients());
}
