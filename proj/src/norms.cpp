#include "chaosres/norms.hpp"

#include "chaosres/errors.hpp"
#include "chaosres/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chaosres {

void require_matrix(const CoeffTensor& f, const char* what) {
    if (f.degree() != 2)
        throw DomainError(std::string(what) + " requires a degree-2 tensor, got degree " +
                          std::to_string(f.degree()));
}

std::vector<double> multiply(const CoeffTensor& m, std::span<const double> x) {
    require_matrix(m, "multiply");
    if (x.size() != m.dim(1)) throw DimensionError("multiply: vector length does not match column count");
    std::vector<double> y(m.dim(0), 0.0);
    for (std::size_t e = 0; e < m.nnz(); ++e) {
        const auto idx = m.index(e);
        y[idx[0]] += m.value(e) * x[idx[1]];
    }
    return y;
}

std::vector<double> multiply_transposed(const CoeffTensor& m, std::span<const double> x) {
    require_matrix(m, "multiply_transposed");
    if (x.size() != m.dim(0)) throw DimensionError("multiply_transposed: vector length does not match row count");
    std::vector<double> y(m.dim(1), 0.0);
    for (std::size_t e = 0; e < m.nnz(); ++e) {
        const auto idx = m.index(e);
        y[idx[1]] += m.value(e) * x[idx[0]];
    }
    return y;
}

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double spectral_norm(const CoeffTensor& m, const SpectralOptions& opts, std::size_t* iterations) {
    require_matrix(m, "spectral_norm");
    if (iterations) *iterations = 0;
    if (m.is_zero()) return 0.0;

    Rng rng(opts.seed);
    std::vector<double> v(m.dim(1));
    for (auto& x : v) x = rng.uniform(0.5, 1.5) * rng.sign();
    double nv = norm2(v);
    for (auto& x : v) x /= nv;

    double lambda = 0.0;
    std::size_t it = 0;
    for (; it < opts.max_iterations; ++it) {
        const auto mv = multiply(m, v);
        auto w = multiply_transposed(m, mv);
        double mv2 = 0.0;
        for (double x : mv) mv2 += x * x;
        const double next = mv2;  // Rayleigh quotient v^T M^T M v with |v| = 1
        const double nw = norm2(w);
        if (nw == 0.0) break;
        for (std::size_t j = 0; j < w.size(); ++j) v[j] = w[j] / nw;
        const bool converged = it > 0 && std::abs(next - lambda) <= opts.tolerance * next;
        lambda = std::max(lambda, next);
        if (converged) {
            ++it;
            break;
        }
    }
    // One last Rayleigh quotient on the final iterate.
    const auto mv = multiply(m, v);
    double mv2 = 0.0;
    for (double x : mv) mv2 += x * x;
    lambda = std::max(lambda, mv2);
    if (iterations) *iterations = it;
    return std::sqrt(lambda);
}

NormProfile matrix_profile(const CoeffTensor& m, const SpectralOptions& opts) {
    require_matrix(m, "matrix_profile");
    NormProfile p;
    p.rows = m.dim(0);
    p.cols = m.dim(1);
    std::vector<double> row_sq(p.rows, 0.0), col_sq(p.cols, 0.0);
    std::vector<std::size_t> row_nz(p.rows, 0), col_nz(p.cols, 0);
    double fro_sq = 0.0;
    for (std::size_t e = 0; e < m.nnz(); ++e) {
        const auto idx = m.index(e);
        const double v = m.value(e);
        fro_sq += v * v;
        p.max_abs = std::max(p.max_abs, std::abs(v));
        row_sq[idx[0]] += v * v;
        col_sq[idx[1]] += v * v;
        ++row_nz[idx[0]];
        ++col_nz[idx[1]];
    }
    p.frobenius = std::sqrt(fro_sq);
    p.row_sup_l2 = std::sqrt(*std::max_element(row_sq.begin(), row_sq.end()));
    p.col_sup_l2 = std::sqrt(*std::max_element(col_sq.begin(), col_sq.end()));
    p.row_sup_l0 = *std::max_element(row_nz.begin(), row_nz.end());
    p.col_sup_l0 = *std::max_element(col_nz.begin(), col_nz.end());
    p.maxsupp = std::max(p.row_sup_l0, p.col_sup_l0);
    p.maxdiam = std::max(p.row_sup_l2, p.col_sup_l2);
    p.spectral = spectral_norm(m, opts, &p.spectral_iterations);
    if (p.spectral > 0.0) {
        // Clamp into [1, min(rows, cols)]; rounding can push the ratio a hair outside.
        const double sr = fro_sq / (p.spectral * p.spectral);
        p.stable_rank = std::clamp(sr, 1.0, static_cast<double>(std::min(p.rows, p.cols)));
    }
    return p;
}

BilinearIngredients bound_ingredients_bilinear(const NormProfile& p, std::size_t n, double r) {
    if (p.frobenius == 0.0) throw DomainError("bilinear ingredients are undefined for the zero matrix");
    if (n == 0) throw DomainError("n must be positive");
    if (r < 0.0) throw DomainError("r must be nonnegative");
    const double supp = static_cast<double>(p.maxsupp);
    BilinearIngredients out;
    out.f_val = std::min(supp * p.max_abs, std::sqrt(std::log(static_cast<double>(n))) * p.maxdiam) / p.frobenius;
    out.g_val = std::min(r, supp) * p.max_abs / p.frobenius;
    return out;
}

BilinearIngredients bound_ingredients_bilinear(const CoeffTensor& m, std::size_t n, double r) {
    return bound_ingredients_bilinear(matrix_profile(m), n, r);
}

TensorProfile tensor_profile(const CoeffTensor& f) {
    TensorProfile t;
    double sq = 0.0;
    for (double v : f.values()) {
        sq += v * v;
        t.max_abs = std::max(t.max_abs, std::abs(v));
    }
    t.frobenius = std::sqrt(sq);
    return t;
}

}  // namespace chaosres
