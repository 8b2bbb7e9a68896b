#include "chaosres/errors.hpp"
#include "chaosres/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <limits>

namespace chaosres::kernels {

namespace {

constexpr std::uint64_t saturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > saturated / a) return saturated;
    return a * b;
}

std::uint64_t ball_size(std::size_t n, std::size_t radius) {
    std::uint64_t total = 0, binom = 1;
    for (std::size_t s = 0; s <= std::min(n, radius); ++s) {
        if (s > 0) {
            // C(n, s) = C(n, s-1) * (n-s+1) / s, exact in integers
            if (binom > saturated / (n - s + 1)) return saturated;
            binom = binom * (n - s + 1) / s;
        }
        if (total > saturated - binom) return saturated;
        total += binom;
    }
    return total;
}

// All subsets of [n] with at most `radius` elements, as bitmasks.
std::vector<std::uint64_t> subsets_up_to(std::size_t n, std::size_t radius) {
    std::vector<std::uint64_t> out{0};
    std::vector<std::uint64_t> frontier{0};
    for (std::size_t s = 1; s <= std::min(n, radius); ++s) {
        std::vector<std::uint64_t> next;
        for (auto m : frontier) {
            const std::size_t start = m == 0 ? 0 : 64 - static_cast<std::size_t>(std::countl_zero(m));
            for (std::size_t j = start; j < n; ++j) next.push_back(m | (std::uint64_t{1} << j));
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

}  // namespace

std::uint64_t flip_pattern_count(std::span<const std::size_t> dims, std::span<const std::size_t> budget) {
    if (dims.size() != budget.size()) throw DimensionError("flip budget needs one entry per slot");
    std::uint64_t total = 1;
    for (std::size_t p = 0; p < dims.size(); ++p) total = mul_sat(total, ball_size(dims[p], budget[p]));
    return total;
}

double max_flip_delta(const CoeffTensor& f, const SignEnsemble& e, std::span<const std::size_t> budget,
                      std::uint64_t max_evaluations, Exec exec) {
    require_conforming(f, e);
    const std::size_t d = f.degree();
    const auto total = flip_pattern_count(f.dims(), budget);
    if (total > max_evaluations)
        throw GuardError("flip enumeration needs " +
                         (total == saturated ? std::string("more than 2^64") : std::to_string(total)) +
                         " evaluations, above the budget of " + std::to_string(max_evaluations));
    for (std::size_t p = 0; p < d; ++p)
        if (budget[p] > 0 && f.dim(p) > 64) throw GuardError("flip enumeration supports at most 64 coordinates per slot");

    std::vector<std::vector<std::uint64_t>> subsets(d);
    for (std::size_t p = 0; p < d; ++p) subsets[p] = subsets_up_to(f.dim(p), budget[p]);

    std::vector<double> prod(f.nnz());
    double base = 0.0;
    for (std::size_t k = 0; k < f.nnz(); ++k) {
        const auto idx = f.index(k);
        double v = f.value(k);
        for (std::size_t p = 0; p < d; ++p) v *= e.at(p, idx[p]);
        prod[k] = v;
        base += v;
    }

    auto delta_at = [&](std::uint64_t t) {
        std::uint64_t masks[32] = {};
        for (std::size_t p = d; p-- > 0;) {
            const auto& s = subsets[p];
            masks[p] = s[t % s.size()];
            t /= s.size();
        }
        double value = 0.0;
        for (std::size_t k = 0; k < f.nnz(); ++k) {
            const auto idx = f.index(k);
            bool neg = false;
            for (std::size_t p = 0; p < d; ++p) neg ^= ((masks[p] >> idx[p]) & 1u) != 0;
            value += neg ? -prod[k] : prod[k];
        }
        return std::abs(value - base);
    };

    if (exec == Exec::serial) {
        double best = 0.0;
        for (std::uint64_t t = 0; t < total; ++t) best = std::max(best, delta_at(t));
        return best;
    }
    constexpr std::uint64_t chunk = 4096;
    const std::size_t chunks = static_cast<std::size_t>((total + chunk - 1) / chunk);
    std::vector<double> best(chunks, 0.0);
    for_each_index(chunks, exec, [&](std::size_t c) {
        const std::uint64_t end = std::min<std::uint64_t>(total, (c + 1) * chunk);
        for (std::uint64_t t = c * chunk; t < end; ++t) best[c] = std::max(best[c], delta_at(t));
    });
    return best.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
}

}  // namespace chaosres::kernels
