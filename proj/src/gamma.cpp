#include "chaosres/gamma.hpp"

#include "chaosres/errors.hpp"
#include "chaosres/kernels.hpp"
#include "chaosres/matrixisation.hpp"
#include "chaosres/norms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace chaosres {

namespace {

void check_order(const CoeffTensor& f, std::size_t slot, std::size_t k) {
    if (slot >= f.degree())
        throw DomainError("slot " + std::to_string(slot + 1) + " out of range for degree " +
                          std::to_string(f.degree()));
    if (k % 2 != 0) throw DomainError("derivative order k must be even, got " + std::to_string(k));
    if (k < 2 || k > 2 * (f.degree() - 1))
        throw DomainError("derivative order k = " + std::to_string(k) + " outside [2, " +
                          std::to_string(2 * (f.degree() - 1)) + "]");
}

void check_square(const CoeffTensor& f) {
    if (!f.is_square()) throw DomainError("Gamma-norms require a square tensor (all dims equal)");
}

double factorial(std::size_t k) {
    double out = 1.0;
    for (std::size_t j = 2; j <= k; ++j) out *= static_cast<double>(j);
    return out;
}

// Sum of squared key sums for keys with exactly m differing positions, in key order.
double squared_sums(const kernels::SymDiffTable& table, std::size_t m) {
    double s = 0.0;
    for (const auto& [key, sum] : table.sums)
        if (key.size() == m) s += sum * sum;
    return s;
}

}  // namespace

double gamma_multiplicity(std::size_t k, GammaMultiplicity m) {
    if (m == GammaMultiplicity::derivative_tensor) return factorial(k);
    return factorial(k / 2) * std::ldexp(1.0, static_cast<int>(k / 2));
}

double gamma_norm(const CoeffTensor& f, std::size_t slot, std::size_t k, const GammaOptions& opts) {
    check_order(f, slot, k);
    check_square(f);
    const auto table = kernels::accumulate_symdiff(matrixise(f, slot), opts.max_pair_visits, opts.exec);
    return std::sqrt(gamma_multiplicity(k, opts.multiplicity) * squared_sums(table, k / 2));
}

double gamma_oracle(const CoeffTensor& f, std::size_t slot, std::size_t k, Exec exec, std::size_t max_coordinates) {
    check_order(f, slot, k);
    std::size_t coords = 0;
    for (std::size_t p = 0; p < f.degree(); ++p)
        if (p != slot) coords += f.dim(p);
    if (coords > max_coordinates)
        throw GuardError("Gamma oracle enumerates 2^" + std::to_string(coords) +
                         " sign assignments; the limit is 2^" + std::to_string(max_coordinates));

    // Fourier-Walsh coefficients of h = |v|^2 are the expected discrete
    // derivatives; the k-th derivative tensor holds k! copies of each.
    auto h = kernels::restriction_norm_cube(f, slot, exec);
    for (std::size_t half = 1; half < h.size(); half <<= 1)
        for (std::size_t b = 0; b < h.size(); b += 2 * half)
            for (std::size_t j = b; j < b + half; ++j) {
                const double x = h[j], y = h[j + half];
                h[j] = x + y;
                h[j + half] = x - y;
            }
    const double scale = std::ldexp(1.0, -static_cast<int>(coords));
    double s = 0.0;
    for (std::size_t mask = 0; mask < h.size(); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
        const double c = h[mask] * scale;
        s += c * c;
    }
    return std::sqrt(factorial(k) * s);
}

double GammaProfile::min_ratio(std::size_t slot) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : table)
        if (e.slot == slot) best = std::min(best, e.ratio);
    return best;
}

GammaProfile gamma_profile(const CoeffTensor& f, const GammaOptions& opts) {
    check_square(f);
    GammaProfile out;
    const double fro = tensor_profile(f).frobenius;
    out.frobenius_sq = fro * fro;
    for (std::size_t slot = 0; slot < f.degree(); ++slot) {
        if (f.degree() < 2) break;
        const auto table = kernels::accumulate_symdiff(matrixise(f, slot), opts.max_pair_visits, opts.exec);
        for (std::size_t k = 2; k <= 2 * (f.degree() - 1); k += 2) {
            GammaEntry e;
            e.slot = slot;
            e.k = k;
            e.value = std::sqrt(gamma_multiplicity(k, opts.multiplicity) * squared_sums(table, k / 2));
            if (e.value > 0.0) e.ratio = out.frobenius_sq / e.value;
            out.aggregate = std::max(out.aggregate, e.value);
            out.table.push_back(e);
        }
    }
    return out;
}

PairCensus gamma_pair_census(const CoeffTensor& f, std::size_t slot, const GammaOptions& opts) {
    const auto a = matrixise(f, slot);
    const auto table = kernels::accumulate_symdiff(a, opts.max_pair_visits, opts.exec);
    PairCensus c;
    c.by_differing_positions = table.pair_count;
    for (std::size_t r = 0; r < a.rows; ++r) {
        const std::uint64_t k = a.row_ptr[r + 1] - a.row_ptr[r];
        c.off_diagonal_products += k * (k > 0 ? k - 1 : 0);
    }
    return c;
}

}  // namespace chaosres
