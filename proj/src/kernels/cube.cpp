#include "chaosres/errors.hpp"
#include "chaosres/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>

namespace chaosres::kernels {

namespace {

constexpr std::size_t max_cube_bits = 30;
constexpr std::size_t gray_block_bits = 10;

// Sign assignments over the coordinates of every slot except `fixed`
// (fixed = degree means no slot is held back).
struct CubeLayout {
    std::vector<std::size_t> coord_slot;
    std::vector<std::size_t> coord_pos;
    std::vector<std::size_t> offset;  // first coordinate of each slot, or npos for the fixed slot
    std::vector<std::vector<std::size_t>> touching;  // entries whose index hits each coordinate

    CubeLayout(const CoeffTensor& f, std::size_t fixed) : offset(f.degree(), SIZE_MAX) {
        for (std::size_t p = 0; p < f.degree(); ++p) {
            if (p == fixed) continue;
            offset[p] = coord_slot.size();
            for (std::size_t j = 0; j < f.dim(p); ++j) {
                coord_slot.push_back(p);
                coord_pos.push_back(j);
            }
        }
        if (coord_slot.size() > max_cube_bits) throw GuardError("cube enumeration over more than 30 coordinates");
        touching.resize(coord_slot.size());
        for (std::size_t e = 0; e < f.nnz(); ++e) {
            const auto idx = f.index(e);
            for (std::size_t p = 0; p < f.degree(); ++p)
                if (offset[p] != SIZE_MAX) touching[offset[p] + idx[p]].push_back(e);
        }
    }

    [[nodiscard]] std::size_t bits() const { return coord_slot.size(); }

    // Signed product of entry e under mask, excluding the fixed slot.
    [[nodiscard]] double product(const CoeffTensor& f, std::size_t e, std::uint64_t mask) const {
        const auto idx = f.index(e);
        double v = f.value(e);
        for (std::size_t p = 0; p < f.degree(); ++p)
            if (offset[p] != SIZE_MAX && ((mask >> (offset[p] + idx[p])) & 1u)) v = -v;
        return v;
    }
};

}  // namespace

std::vector<double> chaos_cube(const CoeffTensor& f, Exec exec) {
    const CubeLayout layout(f, f.degree());
    std::vector<double> out(std::size_t{1} << layout.bits());
    if (exec == Exec::serial) {
        for (std::uint64_t mask = 0; mask < out.size(); ++mask) {
            double value = 0.0;
            for (std::size_t e = 0; e < f.nnz(); ++e) value += layout.product(f, e, mask);
            out[mask] = value;
        }
        return out;
    }
    const std::size_t bits = layout.bits();
    const std::size_t block_bits = std::min(bits, gray_block_bits);
    const auto blocks = static_cast<std::int64_t>((std::uint64_t{1} << bits) >> block_bits);
    const std::uint64_t block = std::uint64_t{1} << block_bits;
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
        std::vector<double> prod(f.nnz());
        const std::uint64_t base = static_cast<std::uint64_t>(b) << block_bits;
        double value = 0.0;
        for (std::size_t e = 0; e < f.nnz(); ++e) {
            prod[e] = layout.product(f, e, base);
            value += prod[e];
        }
        out[base] = value;
        std::uint64_t mask = base;
        for (std::uint64_t t = 1; t < block; ++t) {
            const auto c = static_cast<std::size_t>(std::countr_zero(t));
            mask ^= std::uint64_t{1} << c;
            for (auto e : layout.touching[c]) {
                value -= 2.0 * prod[e];
                prod[e] = -prod[e];
            }
            out[mask] = value;
        }
    }
    return out;
}

std::vector<double> restriction_norm_cube(const CoeffTensor& f, std::size_t slot, Exec exec) {
    if (slot >= f.degree()) throw DomainError("slot out of range");
    const CubeLayout layout(f, slot);
    const std::size_t bits = layout.bits();
    std::vector<double> out(std::size_t{1} << bits);
    const std::size_t rows = f.dim(slot);
    auto sq = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return s;
    };

    if (exec == Exec::serial) {
        std::vector<double> v(rows);
        for (std::uint64_t mask = 0; mask < out.size(); ++mask) {
            std::fill(v.begin(), v.end(), 0.0);
            for (std::size_t e = 0; e < f.nnz(); ++e) v[f.index(e)[slot]] += layout.product(f, e, mask);
            out[mask] = sq(v);
        }
        return out;
    }
    const std::size_t block_bits = std::min(bits, gray_block_bits);
    const auto blocks = static_cast<std::int64_t>(out.size() >> block_bits);
    const std::uint64_t block = std::uint64_t{1} << block_bits;
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
        std::vector<double> prod(f.nnz());
        std::vector<double> v(rows, 0.0);
        const std::uint64_t base = static_cast<std::uint64_t>(b) << block_bits;
        for (std::size_t e = 0; e < f.nnz(); ++e) {
            prod[e] = layout.product(f, e, base);
            v[f.index(e)[slot]] += prod[e];
        }
        out[base] = sq(v);
        std::uint64_t mask = base;
        for (std::uint64_t t = 1; t < block; ++t) {
            const auto c = static_cast<std::size_t>(std::countr_zero(t));
            mask ^= std::uint64_t{1} << c;
            for (auto e : layout.touching[c]) {
                v[f.index(e)[slot]] -= 2.0 * prod[e];
                prod[e] = -prod[e];
            }
            out[mask] = sq(v);
        }
    }
    return out;
}

}  // namespace chaosres::kernels
