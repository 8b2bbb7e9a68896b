#include "chaosres/errors.hpp"
#include "chaosres/matrixisation.hpp"
#include "chaosres/norms.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace chaosres;
namespace ts = testing_support;

namespace {

// Per direction tuple on the slots of I: (sum of squares, value on e).
struct Restricted {
    double sq = 0.0;
    double value = 0.0;
};

std::map<std::vector<std::size_t>, Restricted> brute_restrictions(const CoeffTensor& f, SlotSet slots,
                                                                  const SignEnsemble& e) {
    const auto dense = ts::dense_of(f);
    std::map<std::vector<std::size_t>, Restricted> out;
    for (std::size_t flat = 0; flat < dense.size(); ++flat) {
        const auto t = dense.tuple(flat);
        std::vector<std::size_t> key;
        double v = dense.val[flat];
        for (std::size_t p = 0; p < t.size(); ++p) {
            if (slots.contains(p))
                key.push_back(t[p]);
            else
                v *= e.at(p, t[p]);
        }
        auto& r = out[key];
        r.sq += dense.val[flat] * dense.val[flat];
        r.value += v;
    }
    return out;
}

double brute_max_frobenius(const CoeffTensor& f, SlotSet slots) {
    const auto e = SignEnsemble::ones(f.dims());
    double best = 0.0;
    for (const auto& [key, r] : brute_restrictions(f, slots, e)) best = std::max(best, std::sqrt(r.sq));
    return best;
}

double brute_sup(const CoeffTensor& f, SlotSet slots, const SignEnsemble& e) {
    double best = 0.0;
    for (const auto& [key, r] : brute_restrictions(f, slots, e)) best = std::max(best, std::abs(r.value));
    return best;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> as_real(std::span<const Sign> v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Matrixise, BilinearSlotsGiveMatrixAndTranspose) {
    const auto m = CoeffTensor::matrix({{1, 0, 2}, {0, 3, 0}});
    const auto a1 = matrixise(m, 0);
    const auto a2 = matrixise(m, 1);
    EXPECT_EQ(a1.rows, 2u);
    EXPECT_EQ(a1.cols, 3u);
    EXPECT_EQ(a2.rows, 3u);
    EXPECT_EQ(a2.cols, 2u);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            std::vector<double> ej(3, 0.0), ei(2, 0.0);
            ej[j] = 1.0;
            ei[i] = 1.0;
            EXPECT_EQ(a1.multiply(ej)[i], m.at({i, j}));
            EXPECT_EQ(a2.multiply(ei)[j], m.at({i, j}));
        }
}

TEST(Matrixise, ColumnOrderIsRowMajorOverRemainingSlots) {
    const auto f = ts::random_integer_tensor({2, 3, 4}, 1.0, 3);
    const auto a = matrixise(f, 1);
    EXPECT_EQ(a.col_dims, (std::vector<std::size_t>{2, 4}));
    for (std::size_t row = 0; row < a.rows; ++row)
        for (std::size_t k = a.row_ptr[row]; k < a.row_ptr[row + 1]; ++k) {
            const auto t = a.column_tuple(a.col_idx[k]);
            EXPECT_EQ(a.col_idx[k], t[0] * 4u + t[1]);
            EXPECT_EQ(a.val[k], f.at({t[0], row, t[1]}));
        }
}

TEST(Matrixise, IdentityWithChaosOnRandomTensors) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t d = 2 + seed % 2, n = 2 + seed % 3;
        const std::vector<std::size_t> dims(d, n);
        const auto f = ts::random_real_tensor(dims, 0.5, seed);
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto e = sample_ensemble(dims, 1000 * seed + s);
            const double direct = evaluate_chaos(f, e);
            for (std::size_t i = 0; i < d; ++i) {
                const auto a = matrixise(f, i);
                const double via = dot(as_real(e.vector(i)), a.multiply(vectorize_without(e, i)));
                EXPECT_LE(std::abs(via - direct), 1e-12 * std::max(1.0, std::abs(direct)));
            }
        }
    }
}

TEST(Matrixise, GramTraceIsFrobeniusSquared) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::vector<std::size_t> dims{2 + seed % 3, 3, 1 + seed % 2};
        const auto f = ts::random_real_tensor(dims, 0.5, seed);
        double fro = 0.0;
        for (double v : f.values()) fro += v * v;
        for (std::size_t i = 0; i < dims.size(); ++i)
            EXPECT_LE(ts::rel_err(matrixise(f, i).gram_trace(), fro), 1e-12);
    }
}

TEST(Restrict, FixingTrailingSlotsLeavesAFiber) {
    const auto g = ts::random_real_tensor({3, 3, 3}, 0.8, 8);
    const std::vector<std::size_t> dirs{1, 2};
    const auto h = restrict_slots(g, SlotSet{1, 2}, dirs);
    ASSERT_EQ(h.degree(), 1u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(h.at({i}), g.at({i, 1, 2}));
}

TEST(Restrict, FixingAllSlotsIsolatesACoefficient) {
    const auto g = ts::random_real_tensor({3, 2, 4}, 0.8, 4);
    const std::vector<std::size_t> dirs{2, 1, 3};
    const auto h = restrict_slots(g, SlotSet::all(3), dirs);
    EXPECT_EQ(h.degree(), 0u);
    EXPECT_EQ(h.scalar_value(), g.at({2, 1, 3}));
}

TEST(Restrict, MiddleSlot) {
    const auto g = ts::random_real_tensor({2, 3, 2}, 0.9, 6);
    const std::vector<std::size_t> dirs{2};
    const auto h = restrict_slots(g, SlotSet{1}, dirs);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(h.at({i, k}), g.at({i, 2, k}));
    const std::vector<std::size_t> bad{3};
    EXPECT_THROW((void)restrict_slots(g, SlotSet{1}, bad), Error);
}

TEST(MaxRestriction, Examples) {
    EXPECT_DOUBLE_EQ(max_restriction_frobenius(ts::block_oracle(4, 2, 3), SlotSet{0}), 2.0);
    std::vector<Entry> e;
    for (std::size_t i = 0; i < 5; ++i) e.push_back({{i, i}, 1.0});
    EXPECT_EQ(max_restriction_frobenius(CoeffTensor::from_entries({5, 5}, e), SlotSet{0}), 1.0);
}

TEST(MaxRestriction, MatchesBruteForce) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::vector<std::size_t> dims{2 + seed % 3, 3, 4 - seed % 3};
        const auto f = ts::random_real_tensor(dims, 0.4, seed);
        for (auto s : nonempty_subsets(3))
            EXPECT_NEAR(max_restriction_frobenius(f, s), brute_max_frobenius(f, s), 1e-12) << s.label();
    }
}

TEST(MaxRestriction, BilinearCaseMatchesProfile) {
    const auto m = ts::random_real_tensor({5, 4}, 0.6, 31);
    const auto p = matrix_profile(m);
    EXPECT_NEAR(max_restriction_frobenius(m, SlotSet{0}), p.row_sup_l2, 1e-14);
    EXPECT_NEAR(max_restriction_frobenius(m, SlotSet{1}), p.col_sup_l2, 1e-14);
    EXPECT_EQ(max_restriction_frobenius(m, SlotSet{0, 1}), p.max_abs);
}

TEST(RestrictionSup, Examples) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < 4; ++i) e.push_back({{i, i}, 1.0});
    const auto id = CoeffTensor::from_entries({4, 4}, e);
    for (std::uint64_t s = 0; s < 10; ++s)
        EXPECT_EQ(restriction_sup_norm(id, SlotSet{0}, sample_ensemble(id.dims(), s)), 1.0);
    const auto f = ts::random_real_tensor({3, 3, 3}, 0.5, 2);
    double max_abs = 0.0;
    for (double v : f.values()) max_abs = std::max(max_abs, std::abs(v));
    for (std::uint64_t s = 0; s < 5; ++s)
        EXPECT_EQ(restriction_sup_norm(f, SlotSet::all(3), sample_ensemble(f.dims(), s)), max_abs);
}

TEST(RestrictionSup, MatchesBruteForce) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const std::vector<std::size_t> dims{3, 3, 3};
        const auto f = ts::random_real_tensor(dims, 0.5, seed);
        const auto e = sample_ensemble(dims, seed + 500);
        for (auto s : nonempty_subsets(3))
            EXPECT_NEAR(restriction_sup_norm(f, s, e), brute_sup(f, s, e), 1e-12) << s.label();
    }
}

TEST(ChaosVector, BilinearCounterparts) {
    const auto m = ts::random_real_tensor({3, 4}, 0.7, 12);
    const auto e = sample_ensemble(m.dims(), 4);
    EXPECT_EQ(chaos_restriction_vector(m, 0, e), multiply(m, as_real(e.vector(1))));
    const auto v2 = chaos_restriction_vector(m, 1, e);
    const auto ref = multiply_transposed(m, as_real(e.vector(0)));
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(v2[j], ref[j], 1e-14);
}

TEST(ChaosVector, IdentityNormIsDeterministic) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < 9; ++i) e.push_back({{i, i}, 1.0});
    const auto id = CoeffTensor::from_entries({9, 9}, e);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto v = chaos_restriction_vector(id, 0, sample_ensemble(id.dims(), s));
        EXPECT_DOUBLE_EQ(std::sqrt(dot(v, v)), 3.0);
    }
}

TEST(ChaosVector, MatchesMatrixisationProduct) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto f = ts::random_real_tensor({3, 4, 2}, 0.5, seed);
        const auto e = sample_ensemble(f.dims(), seed);
        for (std::size_t i = 0; i < 3; ++i) {
            const auto v = chaos_restriction_vector(f, i, e);
            const auto ref = matrixise(f, i).multiply(vectorize_without(e, i));
            for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(v[k], ref[k], 1e-12);
        }
    }
}
