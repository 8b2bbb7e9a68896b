#pragma once

#include "chaosres/bounds.hpp"
#include "chaosres/empirical.hpp"
#include "chaosres/gamma.hpp"
#include "chaosres/norms.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace chaosres {

/// Floating output with 17 significant digits ("inf" for infinity).
[[nodiscard]] std::string format_double(double v);

using Json = nlohmann::ordered_json;

/// A JSON number, or the string "inf" / "-inf" / "nan" for non-finite values.
[[nodiscard]] Json json_number(double v);
[[nodiscard]] Json json_of(const NormProfile& p);
[[nodiscard]] Json json_of(const TensorProfile& p);
[[nodiscard]] Json json_of(const GammaProfile& p);
[[nodiscard]] Json json_of(const BoundReport& r);
[[nodiscard]] Json json_of(const EmpiricalCdf& cdf);

[[nodiscard]] std::string to_json(const NormProfile& p);
[[nodiscard]] std::string to_json(const TensorProfile& p);
[[nodiscard]] std::string to_json(const GammaProfile& p);
[[nodiscard]] std::string to_json(const BoundReport& r);
[[nodiscard]] std::string to_json(const std::vector<BoundReport>& rows);
[[nodiscard]] std::string to_json(const EmpiricalCdf& cdf);

/// One header row plus one row per report; columns follow the first report's terms.
[[nodiscard]] std::string to_csv(const std::vector<BoundReport>& rows);
/// Columns r, estimate, stderr.
[[nodiscard]] std::string to_csv(const EmpiricalCdf& cdf);

}  // namespace chaosres
