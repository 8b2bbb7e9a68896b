#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace chaosres {

using Index = std::uint32_t;
using Sign = std::int8_t;

enum class Storage { sparse, dense };

/// One coefficient given by a 0-based index tuple.
struct Entry {
    std::vector<std::size_t> idx;
    double val = 0.0;
};

/// A set of slots (tensor modes) stored as a bitmask; slots are 0-based.
class SlotSet {
public:
    constexpr SlotSet() = default;
    constexpr explicit SlotSet(std::uint32_t bits) : bits_(bits) {}
    SlotSet(std::initializer_list<std::size_t> slots);

    static constexpr SlotSet all(std::size_t degree) {
        return SlotSet(degree >= 32 ? ~0u : ((1u << degree) - 1u));
    }
    static constexpr SlotSet single(std::size_t slot) { return SlotSet(1u << slot); }

    [[nodiscard]] constexpr bool contains(std::size_t slot) const { return (bits_ >> slot) & 1u; }
    [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] constexpr std::uint32_t bits() const { return bits_; }
    [[nodiscard]] std::vector<std::size_t> slots() const;

    /// 1-based display form, e.g. "{1,3}".
    [[nodiscard]] std::string label() const;

    friend constexpr bool operator==(SlotSet, SlotSet) = default;

private:
    std::uint32_t bits_ = 0;
};

/// All nonempty subsets of [degree] in increasing bitmask order.
std::vector<SlotSet> nonempty_subsets(std::size_t degree);

/// d-mode real coefficient tensor. Nonzeros are kept as sorted COO
/// (lexicographic, last index fastest) in every storage mode; dense mode
/// additionally materializes the full row-major array for O(1) lookup and
/// is only available for degree <= 3. Degree 0 is a single scalar.
class CoeffTensor {
public:
    CoeffTensor();

    /// Builds from explicit entries. Zeros are dropped; duplicate indices and
    /// out-of-range indices throw DomainError.
    static CoeffTensor from_entries(std::vector<std::size_t> dims, std::span<const Entry> entries,
                                    Storage storage = Storage::sparse);
    /// Builds from a row-major array (last index fastest).
    static CoeffTensor from_dense(std::vector<std::size_t> dims, std::span<const double> values,
                                  Storage storage = Storage::dense);
    static CoeffTensor matrix(std::size_t rows, std::size_t cols, std::span<const double> row_major,
                              Storage storage = Storage::sparse);
    static CoeffTensor matrix(std::initializer_list<std::initializer_list<double>> rows);
    static CoeffTensor scalar(double value);

    [[nodiscard]] std::size_t degree() const { return dims_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& dims() const { return dims_; }
    [[nodiscard]] std::size_t dim(std::size_t slot) const { return dims_.at(slot); }
    [[nodiscard]] Storage storage() const { return storage_; }
    [[nodiscard]] std::size_t nnz() const { return val_.size(); }
    [[nodiscard]] bool is_zero() const { return val_.empty(); }
    /// All modes share one dimension.
    [[nodiscard]] bool is_square() const;
    /// Product of the dims (1 for degree 0), saturating at UINT64_MAX.
    [[nodiscard]] std::uint64_t total_size() const;
    [[nodiscard]] bool has_integer_coefficients() const;

    /// Index tuple of the e-th stored nonzero.
    [[nodiscard]] std::span<const Index> index(std::size_t e) const {
        return {idx_.data() + e * dims_.size(), dims_.size()};
    }
    [[nodiscard]] double value(std::size_t e) const { return val_[e]; }
    [[nodiscard]] std::span<const double> values() const { return val_; }

    /// Coefficient at a 0-based index tuple (0 when absent).
    [[nodiscard]] double at(std::span<const std::size_t> idx) const;
    [[nodiscard]] double at(std::initializer_list<std::size_t> idx) const;
    /// Value of a degree-0 tensor.
    [[nodiscard]] double scalar_value() const;

    [[nodiscard]] CoeffTensor scaled(double c) const;
    [[nodiscard]] CoeffTensor with_storage(Storage storage) const;
    /// Degree-2 transpose.
    [[nodiscard]] CoeffTensor transposed() const;
    /// Row-major dense copy of all coefficients.
    [[nodiscard]] std::vector<double> to_dense() const;

    friend bool operator==(const CoeffTensor& a, const CoeffTensor& b);

private:
    static CoeffTensor build(std::vector<std::size_t> dims, std::vector<Index> idx,
                             std::vector<double> val, Storage storage);
    void materialize_dense();

    std::vector<std::size_t> dims_;
    std::vector<Index> idx_;
    std::vector<double> val_;
    std::vector<double> dense_;
    Storage storage_ = Storage::sparse;
};

/// Tuple (xi_1, ..., xi_d) of sign vectors.
class SignEnsemble {
public:
    SignEnsemble() = default;
    /// Throws DomainError unless every entry is exactly +1 or -1.
    explicit SignEnsemble(std::vector<std::vector<Sign>> vectors);

    static SignEnsemble ones(std::span<const std::size_t> dims);
    /// Ensemble whose coordinate c (slot-major order) is -1 iff bit c of mask is set.
    static SignEnsemble from_mask(std::span<const std::size_t> dims, std::uint64_t mask);

    [[nodiscard]] std::size_t degree() const { return vectors_.size(); }
    [[nodiscard]] std::span<const Sign> vector(std::size_t slot) const { return vectors_.at(slot); }
    [[nodiscard]] Sign at(std::size_t slot, std::size_t j) const { return vectors_[slot][j]; }
    [[nodiscard]] std::vector<std::size_t> dims() const;
    /// Total coordinate count sum_i n_i.
    [[nodiscard]] std::size_t total_size() const;
    /// Inverse of from_mask; requires total_size() <= 64.
    [[nodiscard]] std::uint64_t mask() const;
    /// Flattened slot-major copy of all signs.
    [[nodiscard]] std::vector<Sign> flattened() const;

    [[nodiscard]] SignEnsemble flipped(std::size_t slot, std::size_t j) const;
    /// Drops the vectors of the given slots.
    [[nodiscard]] SignEnsemble without(SlotSet slots) const;

    friend bool operator==(const SignEnsemble&, const SignEnsemble&) = default;

private:
    std::vector<std::vector<Sign>> vectors_;
};

/// Vector with entries in {-1, 0, +1}.
class TernaryVector {
public:
    TernaryVector() = default;
    explicit TernaryVector(std::vector<std::int8_t> entries);

    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] std::int8_t operator[](std::size_t i) const { return entries_[i]; }
    [[nodiscard]] std::span<const std::int8_t> entries() const { return entries_; }

private:
    std::vector<std::int8_t> entries_;
};

/// Throws DimensionError unless the ensemble conforms to the tensor dims.
void require_conforming(const CoeffTensor& f, const SignEnsemble& e);

/// sum_i f_i (xi_1)_{i_1} ... (xi_d)_{i_d} over the stored nonzeros.
[[nodiscard]] double evaluate_chaos(const CoeffTensor& f, const SignEnsemble& e);

/// Number of differing coordinates across all d vectors.
[[nodiscard]] std::size_t hamming_distance(const SignEnsemble& a, const SignEnsemble& b);

/// Independent uniform signs; identical (dims, seed) give identical ensembles.
[[nodiscard]] SignEnsemble sample_ensemble(std::span<const std::size_t> dims, std::uint64_t seed);

/// i.i.d. lazy Rademacher entries: P(0) = 1/2, P(+1) = P(-1) = 1/4.
[[nodiscard]] TernaryVector sample_lazy(std::size_t n, std::uint64_t seed);

}  // namespace chaosres
