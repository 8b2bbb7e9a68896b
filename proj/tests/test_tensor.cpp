#include "chaosres/errors.hpp"
#include "chaosres/rng.hpp"
#include "chaosres/tensor.hpp"
#include "chaosres/tensor_io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace chaosres;
namespace ts = testing_support;

namespace {

CoeffTensor identity(std::size_t n) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < n; ++i) e.push_back({{i, i}, 1.0});
    return CoeffTensor::from_entries({n, n}, e);
}

}  // namespace

TEST(Evaluate, IdentityAllOnes) {
    const auto f = identity(3);
    EXPECT_EQ(evaluate_chaos(f, SignEnsemble({{1, 1, 1}, {1, 1, 1}})), 3.0);
}

TEST(Evaluate, IdentityOneFlip) {
    const auto f = identity(3);
    EXPECT_EQ(evaluate_chaos(f, SignEnsemble({{1, 1, 1}, {-1, 1, 1}})), 1.0);
}

TEST(Evaluate, BlockTensorAllOnes) {
    const auto f = ts::block_oracle(4, 2, 3);
    EXPECT_EQ(f.nnz(), 16u);
    const std::vector<std::size_t> dims{4, 4, 4};
    EXPECT_EQ(evaluate_chaos(f, SignEnsemble::ones(dims)), 16.0);
}

TEST(Evaluate, DimensionMismatchThrows) {
    const auto f = identity(3);
    EXPECT_THROW((void)evaluate_chaos(f, SignEnsemble({{1, 1}, {1, 1}})), DimensionError);
    EXPECT_THROW((void)evaluate_chaos(f, SignEnsemble({{1, 1, 1}})), DimensionError);
}

TEST(Evaluate, MatchesDenseSummationOnRandomTensors) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::vector<std::size_t> dims{2 + seed % 3, 3, 1 + seed % 4};
        const auto f = ts::random_real_tensor(dims, 0.6, seed);
        const auto dense = ts::dense_of(f);
        for (std::uint64_t s = 0; s < 5; ++s) {
            const auto e = sample_ensemble(dims, seed * 100 + s);
            EXPECT_NEAR(evaluate_chaos(f, e), ts::brute_evaluate(dense, e), 1e-12);
        }
    }
}

TEST(Evaluate, SingleCoefficientIsSignedProduct) {
    const std::vector<std::size_t> dims{3, 2, 4};
    const Entry only{{2, 1, 3}, -2.5};
    const auto f = CoeffTensor::from_entries(dims, std::span(&only, 1));
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto e = sample_ensemble(dims, s);
        EXPECT_EQ(evaluate_chaos(f, e), -2.5 * e.at(0, 2) * e.at(1, 1) * e.at(2, 3));
    }
}

// Flipping (xi_p)_j changes f by -2 (xi_p)_j times the contraction of f with slot p fixed at j.
TEST(Evaluate, MultilinearityUnderSingleFlips) {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const std::size_t d = 2 + seed % 2;
        const std::size_t n = 2 + seed % 3;
        const std::vector<std::size_t> dims(d, n);
        const auto f = ts::random_integer_tensor(dims, 0.5, seed);
        const auto dense = ts::dense_of(f);
        const auto cube = ts::brute_cube(f);
        for (std::uint64_t m = 0; m < cube.size(); m += 7) {
            const auto e = SignEnsemble::from_mask(dims, m);
            const double base = evaluate_chaos(f, e);
            for (std::size_t p = 0; p < d; ++p)
                for (std::size_t j = 0; j < n; ++j) {
                    double contraction = 0.0;
                    for (std::size_t flat = 0; flat < dense.size(); ++flat) {
                        const auto t = dense.tuple(flat);
                        if (t[p] != j || dense.val[flat] == 0.0) continue;
                        double v = dense.val[flat];
                        for (std::size_t q = 0; q < d; ++q)
                            if (q != p) v *= e.at(q, t[q]);
                        contraction += v;
                    }
                    const double flipped = evaluate_chaos(f, e.flipped(p, j));
                    EXPECT_NEAR(flipped, base - 2.0 * e.at(p, j) * contraction, 1e-12);
                }
        }
    }
}

TEST(Evaluate, ScalarTensor) {
    const auto f = CoeffTensor::scalar(4.5);
    EXPECT_EQ(f.degree(), 0u);
    EXPECT_EQ(evaluate_chaos(f, SignEnsemble()), 4.5);
}

TEST(Tensor, DenseAndSparseStorageAgree) {
    const auto f = ts::random_real_tensor({3, 4, 2}, 0.5, 9);
    const auto g = f.with_storage(Storage::dense);
    EXPECT_EQ(g.storage(), Storage::dense);
    EXPECT_TRUE(f == g);
    const auto e = sample_ensemble(f.dims(), 3);
    EXPECT_DOUBLE_EQ(evaluate_chaos(f, e), evaluate_chaos(g, e));
    EXPECT_EQ(f.to_dense(), g.to_dense());
}

TEST(Tensor, DenseStorageRefusedAboveDegreeThree) {
    const auto f = ts::random_integer_tensor({2, 2, 2, 2}, 0.5, 1);
    EXPECT_THROW((void)f.with_storage(Storage::dense), DomainError);
}

TEST(Tensor, FromEntriesValidates) {
    const std::vector<Entry> dup{{{0, 0}, 1.0}, {{0, 0}, 2.0}};
    EXPECT_THROW((void)CoeffTensor::from_entries({2, 2}, dup), DomainError);
    const std::vector<Entry> out{{{2, 0}, 1.0}};
    EXPECT_THROW((void)CoeffTensor::from_entries({2, 2}, out), DomainError);
    const std::vector<Entry> zero{{{1, 1}, 0.0}};
    EXPECT_TRUE(CoeffTensor::from_entries({2, 2}, zero).is_zero());
}

TEST(Tensor, TransposeSwapsIndices) {
    const auto m = CoeffTensor::matrix({{1, 2, 0}, {0, 3, 4}});
    const auto t = m.transposed();
    EXPECT_EQ(t.dims(), (std::vector<std::size_t>{3, 2}));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m.at({i, j}), t.at({j, i}));
}

TEST(Hamming, Examples) {
    const SignEnsemble a({{1, 1}, {1, 1}});
    const SignEnsemble b({{-1, 1}, {1, -1}});
    EXPECT_EQ(hamming_distance(a, a), 0u);
    EXPECT_EQ(hamming_distance(a, b), 2u);
    EXPECT_THROW((void)hamming_distance(a, SignEnsemble({{1, 1, 1}, {1, 1}})), DimensionError);
}

TEST(Hamming, MetricAxioms) {
    const std::vector<std::size_t> dims{5, 3, 4};
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto a = sample_ensemble(dims, 3 * s);
        const auto b = sample_ensemble(dims, 3 * s + 1);
        const auto c = sample_ensemble(dims, 3 * s + 2);
        EXPECT_EQ(hamming_distance(a, b), hamming_distance(b, a));
        EXPECT_EQ(hamming_distance(a, b) == 0, a == b);
        EXPECT_LE(hamming_distance(a, c), hamming_distance(a, b) + hamming_distance(b, c));
        EXPECT_EQ(hamming_distance(a, b), static_cast<std::size_t>(std::popcount(a.mask() ^ b.mask())));
    }
}

TEST(Sampling, EnsembleIsDeterministic) {
    const std::vector<std::size_t> dims{2, 2, 2};
    EXPECT_EQ(sample_ensemble(dims, 42), sample_ensemble(dims, 42));
    EXPECT_NE(sample_ensemble(std::vector<std::size_t>{64}, 42), sample_ensemble(std::vector<std::size_t>{64}, 43));
    for (auto s : sample_ensemble(dims, 5).flattened()) EXPECT_TRUE(s == 1 || s == -1);
}

TEST(Sampling, EnsembleMeanNearZero) {
    const std::vector<std::size_t> dims{10000};
    const auto e = sample_ensemble(dims, 2024);
    double sum = 0.0;
    for (auto s : e.vector(0)) sum += s;
    EXPECT_LE(std::abs(sum / 1e4), 4.0 / std::sqrt(1e4));
}

TEST(Sampling, LazyFrequencies) {
    const std::size_t n = 100000;
    const auto v = sample_lazy(n, 77);
    std::size_t zeros = 0, plus = 0;
    for (auto x : v.entries()) {
        zeros += x == 0;
        plus += x == 1;
    }
    EXPECT_NEAR(static_cast<double>(zeros) / n, 0.5, 4.0 * std::sqrt(0.25 / n));
    EXPECT_NEAR(static_cast<double>(plus) / n, 0.25, 4.0 * std::sqrt(0.1875 / n));
    EXPECT_EQ(sample_lazy(1000, 3).entries().size(), 1000u);
}

// (xi - xi') / 2 for independent Rademacher pairs has the lazy law.
TEST(Sampling, HalfDifferenceMatchesLazyLaw) {
    const std::size_t n = 100000;
    const std::vector<std::size_t> dims{n};
    const auto a = sample_ensemble(dims, 11);
    const auto b = sample_ensemble(dims, 12);
    const auto lazy = sample_lazy(n, 13);
    double zero_pair = 0, plus_pair = 0, zero_lazy = 0, plus_lazy = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const int z = (a.at(0, j) - b.at(0, j)) / 2;
        zero_pair += z == 0;
        plus_pair += z == 1;
        zero_lazy += lazy[j] == 0;
        plus_lazy += lazy[j] == 1;
    }
    const double se0 = std::sqrt(2 * 0.25 / n), se1 = std::sqrt(2 * 0.1875 / n);
    EXPECT_NEAR(zero_pair / n, zero_lazy / n, 4 * se0);
    EXPECT_NEAR(plus_pair / n, plus_lazy / n, 4 * se1);
}

TEST(SignEnsemble, RejectsNonSigns) {
    EXPECT_THROW(SignEnsemble({{1, 0}}), DomainError);
    EXPECT_THROW(TernaryVector({2}), DomainError);
}

TEST(SignEnsemble, MaskRoundTrip) {
    const std::vector<std::size_t> dims{3, 5, 2};
    for (std::uint64_t m = 0; m < 1024; m += 37) EXPECT_EQ(SignEnsemble::from_mask(dims, m).mask(), m);
}

TEST(SlotSet, SubsetsAndLabels) {
    const auto subs = nonempty_subsets(3);
    ASSERT_EQ(subs.size(), 7u);
    EXPECT_EQ(subs.front().label(), "{1}");
    EXPECT_EQ(subs.back().label(), "{1,2,3}");
    EXPECT_EQ((SlotSet{0, 2}).size(), 2u);
}

TEST(TensorIo, ParsesSparseAndDenseForms) {
    const auto a = parse_tensor_json(R"({"dims":[2,2],"entries":[{"idx":[1,2],"val":3.5},{"idx":[2,1],"val":-1}]})");
    EXPECT_EQ(a.at({0, 1}), 3.5);
    EXPECT_EQ(a.at({1, 0}), -1.0);
    const auto b = parse_tensor_json(R"({"degree":2,"dims":[2,2],"dense":[0,3.5,-1,0]})");
    EXPECT_TRUE(a == b);
}

TEST(TensorIo, RoundTrip) {
    const auto f = ts::random_real_tensor({3, 2, 4}, 0.5, 5);
    EXPECT_TRUE(parse_tensor_json(tensor_to_json(f)) == f);
    const auto path = (std::filesystem::temp_directory_path() / "chaosres_roundtrip.json").string();
    write_tensor_file(f, path);
    EXPECT_TRUE(read_tensor_file(path) == f);
    std::filesystem::remove(path);
}

TEST(TensorIo, DiagnosticsNameTheOffendingField) {
    auto message = [](const char* text) {
        try {
            (void)parse_tensor_json(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message(R"({"dims":[2,2],"entries":[{"idx":[1,1],"val":1},{"idx":[3,1],"val":1}]})")
                  .find("entries[1].idx[0]"),
              std::string::npos);
    EXPECT_NE(message(R"({"dims":[2,0],"dense":[]})").find("dims[1]"), std::string::npos);
    EXPECT_NE(message(R"({"dims":[2,2],"entries":[{"idx":[1,1]}]})").find("entries[0]"), std::string::npos);
    EXPECT_NE(message(R"({"dims":[2,2],"dense":[1,2,3]})").find("expected"), std::string::npos);
    EXPECT_NE(message("{not json").find("malformed"), std::string::npos);
    EXPECT_THROW((void)read_tensor_file("/nonexistent/file.json"), ParseError);
}
