#pragma once

#include "chaosres/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace chaosres {

struct SpectralOptions {
    double tolerance = 1e-10;  // relative change of the Rayleigh quotient
    std::size_t max_iterations = 10000;
    std::uint64_t seed = 0x5eed;  // start vector
};

/// Scalar statistics of a matrix. stable_rank is empty for the zero matrix.
struct NormProfile {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double frobenius = 0.0;
    double max_abs = 0.0;
    double row_sup_l2 = 0.0;
    double col_sup_l2 = 0.0;
    std::size_t row_sup_l0 = 0;
    std::size_t col_sup_l0 = 0;
    std::size_t maxsupp = 0;
    double maxdiam = 0.0;
    double spectral = 0.0;
    std::optional<double> stable_rank;
    std::size_t spectral_iterations = 0;
};

[[nodiscard]] NormProfile matrix_profile(const CoeffTensor& m, const SpectralOptions& opts = {});

/// Largest singular value by power iteration on M^T M.
[[nodiscard]] double spectral_norm(const CoeffTensor& m, const SpectralOptions& opts = {},
                                   std::size_t* iterations = nullptr);

/// y = M x and y = M^T x for a degree-2 tensor.
[[nodiscard]] std::vector<double> multiply(const CoeffTensor& m, std::span<const double> x);
[[nodiscard]] std::vector<double> multiply_transposed(const CoeffTensor& m, std::span<const double> x);

struct BilinearIngredients {
    double f_val = 0.0;  // min(maxsupp * max_abs, sqrt(ln n) * maxdiam) / frobenius
    double g_val = 0.0;  // min(r, maxsupp) * max_abs / frobenius
};

[[nodiscard]] BilinearIngredients bound_ingredients_bilinear(const NormProfile& p, std::size_t n, double r);
[[nodiscard]] BilinearIngredients bound_ingredients_bilinear(const CoeffTensor& m, std::size_t n, double r);

struct TensorProfile {
    double frobenius = 0.0;
    double max_abs = 0.0;
};

[[nodiscard]] TensorProfile tensor_profile(const CoeffTensor& f);

/// Throws DomainError unless f has degree 2.
void require_matrix(const CoeffTensor& f, const char* what);

}  // namespace chaosres
