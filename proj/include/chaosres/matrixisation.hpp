#pragma once

#include "chaosres/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace chaosres {

/// Slot-i unfolding A_i of a tensor: n_i rows, prod_{p != i} n_p columns.
/// Columns enumerate the remaining slots row-major, last index fastest;
/// vectorize_without uses the same order. Stored as CSR with column
/// indices sorted within each row.
struct Matrixisation {
    std::size_t slot = 0;
    std::size_t rows = 0;
    std::uint64_t cols = 0;
    std::vector<std::size_t> col_dims;  // dims of the remaining slots, in slot order
    std::vector<std::size_t> row_ptr;
    std::vector<std::uint64_t> col_idx;
    std::vector<double> val;

    [[nodiscard]] std::size_t nnz() const { return val.size(); }
    /// Column of the full index tuple (the entry at position slot is ignored).
    [[nodiscard]] std::uint64_t column_of(std::span<const Index> idx) const;
    /// Remaining-slot index tuple of a column.
    [[nodiscard]] std::vector<Index> column_tuple(std::uint64_t col) const;
    /// A_i x for a dense x of length cols.
    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
    /// sum_j (A_i^T A_i)_{jj}, accumulated column by column.
    [[nodiscard]] double gram_trace() const;
};

[[nodiscard]] Matrixisation matrixise(const CoeffTensor& f, std::size_t slot);

/// Kronecker product of the ensemble's vectors other than slot, in the
/// matrixisation column order.
[[nodiscard]] std::vector<double> vectorize_without(const SignEnsemble& e, std::size_t slot);

/// Tensor of degree d - |I| obtained by fixing the slots in I to the given
/// directions (one per slot of I, in increasing slot order). I = all slots
/// yields a degree-0 tensor.
[[nodiscard]] CoeffTensor restrict_slots(const CoeffTensor& f, SlotSet slots, std::span<const std::size_t> directions);

/// max over directions of the Frobenius norm of the restriction to I.
[[nodiscard]] double max_restriction_frobenius(const CoeffTensor& f, SlotSet slots);

/// max over directions of |restriction evaluated on e|; e has full degree and
/// its vectors at slots in I are ignored.
[[nodiscard]] double restriction_sup_norm(const CoeffTensor& f, SlotSet slots, const SignEnsemble& e);

/// Entry k is f with slot fixed to k, evaluated on e's other vectors.
[[nodiscard]] std::vector<double> chaos_restriction_vector(const CoeffTensor& f, std::size_t slot,
                                                           const SignEnsemble& e);

}  // namespace chaosres
