#pragma once

#include "chaosres/tensor.hpp"

#include <iosfwd>
#include <string>

namespace chaosres {

/// Parses the tensor JSON format. Indices in "entries" are 1-based; the
/// "dense" form is row-major with the last index fastest. Throws ParseError
/// naming the offending field or entry.
[[nodiscard]] CoeffTensor parse_tensor_json(const std::string& text);
[[nodiscard]] CoeffTensor read_tensor_file(const std::string& path);

/// Sparse-form JSON with 1-based indices.
[[nodiscard]] std::string tensor_to_json(const CoeffTensor& f);
void write_tensor_file(const CoeffTensor& f, const std::string& path);

}  // namespace chaosres
