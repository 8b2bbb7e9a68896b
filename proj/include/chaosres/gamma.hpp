#pragma once

#include "chaosres/parallel.hpp"
#include "chaosres/tensor.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace chaosres {

/// Unordered description of how two column tuples of A_i differ: for each
/// differing position (among the slots other than i) the unordered pair of
/// values. Stored as flattened (position, low, high) triples in position order.
struct SymDiffKey {
    std::vector<std::uint32_t> data;

    [[nodiscard]] std::size_t size() const { return data.size() / 3; }
    friend auto operator<=>(const SymDiffKey&, const SymDiffKey&) = default;
    friend bool operator==(const SymDiffKey&, const SymDiffKey&) = default;
};

/// How many ordered copies of each unordered key enter the sum of squares.
enum class GammaMultiplicity {
    derivative_tensor,  // k!, the Frobenius norm of the expected k-th derivative tensor
    relevant_tuples,    // (k/2)! * 2^{k/2}, one per ordered relevant tuple
};

struct GammaOptions {
    std::uint64_t max_pair_visits = 100'000'000;
    GammaMultiplicity multiplicity = GammaMultiplicity::derivative_tensor;
    Exec exec = Exec::parallel;
};

/// Multiplicity factor applied to the squared key sums at derivative order k.
[[nodiscard]] double gamma_multiplicity(std::size_t k, GammaMultiplicity m);

/// Gamma-norm of slot `slot` (0-based) at even order k, 2 <= k <= 2(d-1).
/// Requires a square tensor.
[[nodiscard]] double gamma_norm(const CoeffTensor& f, std::size_t slot, std::size_t k, const GammaOptions& opts = {});

/// Exhaustive oracle: Frobenius norm of E[grad^k |v_{f,slot}|^2] over all sign
/// assignments of the other slots. Refuses (GuardError) when those slots hold
/// more than max_coordinates coordinates.
[[nodiscard]] double gamma_oracle(const CoeffTensor& f, std::size_t slot, std::size_t k, Exec exec = Exec::parallel,
                                  std::size_t max_coordinates = 20);

struct GammaEntry {
    std::size_t slot = 0;  // 0-based
    std::size_t k = 0;
    double value = 0.0;
    double ratio = std::numeric_limits<double>::infinity();  // |f|_F^2 / value
};

struct GammaProfile {
    std::vector<GammaEntry> table;  // ordered by (slot, k)
    double aggregate = 0.0;
    double frobenius_sq = 0.0;

    /// Smallest ratio over even k for one slot (infinity when all Gamma vanish).
    [[nodiscard]] double min_ratio(std::size_t slot) const;
};

[[nodiscard]] GammaProfile gamma_profile(const CoeffTensor& f, const GammaOptions& opts = {});

/// Ordered column pairs sharing a row of A_slot, split by the number of
/// differing positions (index m counts pairs differing in m positions).
struct PairCensus {
    std::vector<std::uint64_t> by_differing_positions;
    std::uint64_t off_diagonal_products = 0;  // sum over rows of nnz_r (nnz_r - 1)
};

[[nodiscard]] PairCensus gamma_pair_census(const CoeffTensor& f, std::size_t slot, const GammaOptions& opts = {});

}  // namespace chaosres
