#pragma once

#include "chaosres/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace chaosres::cli {

[[nodiscard]] CoeffTensor identity_matrix(std::size_t n);

/// Block-diagonal tensor of degree d with n/w blocks of width w, every
/// in-block coefficient equal to scale. For d = 2 this is the block matrix.
[[nodiscard]] CoeffTensor block_tensor(std::size_t n, std::size_t w, std::size_t d, double scale = 1.0);

/// Square tensor whose index tuples are kept with probability density and
/// given a nonzero integer value in [-3, 3]. Never returns the zero tensor.
[[nodiscard]] CoeffTensor random_tensor(std::size_t d, std::size_t n, double density, std::uint64_t seed);

/// Parsed "key=value" generator tokens.
struct GeneratorSpec {
    std::vector<std::pair<std::string, std::string>> fields;

    [[nodiscard]] bool has(const std::string& key) const;
    [[nodiscard]] std::size_t size(const std::string& key) const;
    [[nodiscard]] double real(const std::string& key) const;
    [[nodiscard]] std::uint64_t seed(const std::string& key) const;
};

/// Throws ParseError on tokens that are not key=value or on keys outside allowed.
[[nodiscard]] GeneratorSpec parse_generator(const std::vector<std::string>& tokens,
                                            const std::vector<std::string>& allowed);

}  // namespace chaosres::cli
