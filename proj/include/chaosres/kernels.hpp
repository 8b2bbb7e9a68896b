#pragma once

// Enumeration kernels with an OpenMP implementation and a serial reference
// selected by Exec. Both produce identical results; tests compare them.

#include "chaosres/gamma.hpp"
#include "chaosres/matrixisation.hpp"
#include "chaosres/parallel.hpp"
#include "chaosres/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace chaosres::kernels {

/// f evaluated on every ensemble; entry m corresponds to SignEnsemble::from_mask(dims, m).
/// The serial path evaluates each ensemble directly; the parallel path walks
/// Gray-code blocks with incremental updates.
[[nodiscard]] std::vector<double> chaos_cube(const CoeffTensor& f, Exec exec);

/// |v_{f,slot}|_2^2 for every sign assignment of the other slots; bit c of
/// the index is the c-th coordinate of those slots in slot-major order.
[[nodiscard]] std::vector<double> restriction_norm_cube(const CoeffTensor& f, std::size_t slot, Exec exec);

struct SymDiffTable {
    std::vector<std::pair<SymDiffKey, double>> sums;  // sorted by key
    std::vector<std::uint64_t> pair_count;            // index m = differing positions
    std::uint64_t visits = 0;
};

/// Accumulates A[r,c1] * A[r,c2] over ordered pairs of distinct nonzero
/// columns in each row, keyed by how the column tuples differ. Rows are cut
/// into fixed-size chunks whose partial tables are merged in chunk order, so
/// the result does not depend on the number of workers.
[[nodiscard]] SymDiffTable accumulate_symdiff(const Matrixisation& a, std::uint64_t max_pair_visits, Exec exec);

/// max |f(Psi) - f(E)| over Psi obtained by flipping at most budget[p]
/// coordinates of slot p. Throws GuardError above max_evaluations.
[[nodiscard]] double max_flip_delta(const CoeffTensor& f, const SignEnsemble& e, std::span<const std::size_t> budget,
                                    std::uint64_t max_evaluations, Exec exec);

/// Number of flip patterns max_flip_delta would visit (saturating).
[[nodiscard]] std::uint64_t flip_pattern_count(std::span<const std::size_t> dims, std::span<const std::size_t> budget);

}  // namespace chaosres::kernels
