#pragma once

#include "chaosres/gamma.hpp"
#include "chaosres/norms.hpp"
#include "chaosres/tensor.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chaosres {

/// Unspecified constants of the certificates; all default to 1 and theta
/// defaults to the degree.
struct ConstantSet {
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;
    double c4 = 1.0;
    double c_sum = 1.0;
    double c_exp = 1.0;
    std::optional<double> theta;

    [[nodiscard]] double theta_for(std::size_t degree) const { return theta.value_or(static_cast<double>(degree)); }
    /// Throws DomainError unless every constant is strictly positive.
    void validate() const;
};

struct NamedValue {
    std::string name;
    double value = 0.0;
};

struct BoundReport {
    std::string family;  // bilinear | quadratic | multilinear | block
    std::string input;
    double r = 0.0;
    std::vector<NamedValue> terms;
    std::vector<NamedValue> details;
    double raw_total = 0.0;  // sum of terms before clamping
    double total = 0.0;      // min(1, raw_total)
    ConstantSet constants;
    std::optional<std::string> regime;
    std::vector<std::string> warnings;

    /// Value of the named term; throws DomainError if absent.
    [[nodiscard]] double term(std::string_view name) const;
    [[nodiscard]] double detail(std::string_view name) const;
};

/// Young modulus with alpha = 2/d (d >= 2).
[[nodiscard]] double young_modulus(std::size_t d, double x);
[[nodiscard]] double young_modulus_inverse(std::size_t d, double y);

/// 2r |M xi|_inf + 2r |M|_inf min(r, |M|_{inf,0}).
[[nodiscard]] double flip_radius_bilinear(const CoeffTensor& m, std::span<const Sign> xi, double r);
/// sum over nonempty I of (2r)^{|I|} times the restriction sup-norm on e.
[[nodiscard]] double flip_radius_multilinear(const CoeffTensor& f, const SignEnsemble& e, double r);

[[nodiscard]] BoundReport bilinear_bound(const CoeffTensor& m, double r, const ConstantSet& consts = {});
[[nodiscard]] BoundReport bilinear_bound(const NormProfile& p, double r, const ConstantSet& consts = {});

enum class Regime { sparse, dense_a, dense_b };

enum class RegimeExpression {
    frobenius_over_support,       // F / L0
    frobenius_over_support_log,   // F / sqrt(L0 ln n)
    sqrt_frobenius,               // sqrt(F)
    dense_b_min,                  // min of the two above
};

struct RegimeGuarantee {
    Regime regime = Regime::sparse;
    RegimeExpression expression = RegimeExpression::frobenius_over_support;
    double value = 0.0;
    /// Which branch attains the dense-b minimum (equal to expression otherwise).
    RegimeExpression binding = RegimeExpression::frobenius_over_support;
    /// min{F / sqrt(L0 ln n), max{F / L0, sqrt F}} in the dense regime, F / L0 when sparse.
    double derivation_value = 0.0;
    double frobenius = 0.0;
    double support = 0.0;  // |M|_{inf,0}
    double log_n = 0.0;
    std::vector<std::string> warnings;
};

[[nodiscard]] RegimeGuarantee bilinear_regime(const CoeffTensor& m);
[[nodiscard]] RegimeGuarantee bilinear_regime(const NormProfile& p);
[[nodiscard]] std::string to_string(Regime r);
[[nodiscard]] std::string to_string(RegimeExpression e);

/// r-independent ingredients of the multilinear certificate.
struct MultilinearInputs {
    std::size_t degree = 0;
    std::size_t n = 0;
    double frobenius = 0.0;
    std::vector<SlotSet> subsets;             // nonempty subsets in bitmask order
    std::vector<double> max_restriction;      // per subset
    std::vector<double> slot_min_ratio;       // min over k of |f|_F^2 / Gamma_{i,k}
    double gamma_aggregate = 0.0;
    std::string input;
};

[[nodiscard]] MultilinearInputs prepare_multilinear(const CoeffTensor& f, const GammaOptions& opts = {});
[[nodiscard]] BoundReport multilinear_bound(const MultilinearInputs& in, double r, const ConstantSet& consts = {});
[[nodiscard]] BoundReport multilinear_bound(const CoeffTensor& f, double r, const ConstantSet& consts = {});

struct QuadraticForm {
    CoeffTensor matrix;  // symmetric part with zero diagonal
    double level = 0.0;  // x - trace(M)
};

[[nodiscard]] QuadraticForm quadratic_normalize(const CoeffTensor& m, double x);
/// Throws DegenerateChaosError when the normalized matrix vanishes.
[[nodiscard]] BoundReport quadratic_bound(const CoeffTensor& m, double r, const ConstantSet& consts = {});

/// Closed-form multilinear certificate for the block-diagonal tensor with
/// n/w blocks of width w, without materializing it. The scale cancels.
[[nodiscard]] BoundReport block_tensor_bound(std::size_t n, std::size_t w, std::size_t d, double r, double scale = 1.0,
                                             const ConstantSet& consts = {});

/// Closed forms used by block_tensor_bound (scale 1).
struct BlockClosedForms {
    static double frobenius_sq(std::size_t n, std::size_t w, std::size_t d);
    static double max_restriction_frobenius(std::size_t w, std::size_t d, std::size_t fixed);
    static double gamma_sq(std::size_t n, std::size_t w, std::size_t d, std::size_t k);
    /// sqrt(w/n) ((1 + 2r/sqrt(w))^d - 1)
    static double stripped_sum(std::size_t n, std::size_t w, std::size_t d, double r);
};

}  // namespace chaosres
