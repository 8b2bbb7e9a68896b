#include "chaosres/bounds.hpp"

#include "chaosres/errors.hpp"
#include "chaosres/matrixisation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chaosres {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_r(double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("r must be a finite nonnegative number");
}

void finish(BoundReport& rep) {
    rep.raw_total = 0.0;
    for (const auto& t : rep.terms) rep.raw_total += t.value;
    rep.total = std::min(1.0, rep.raw_total);
}

struct YoungShape {
    double alpha;
    double x0;
    double knee;  // Phi(x0)
};

YoungShape young_shape(std::size_t d) {
    if (d < 2) throw DomainError("Young modulus requires d >= 2");
    YoungShape s{};
    s.alpha = 2.0 / static_cast<double>(d);
    s.x0 = std::pow((1.0 - s.alpha) / s.alpha, 1.0 / s.alpha);
    s.knee = (1.0 - s.alpha) * std::exp(std::pow(s.x0, s.alpha));
    return s;
}

}  // namespace

void ConstantSet::validate() const {
    for (double c : {c1, c2, c3, c4, c_sum, c_exp})
        if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("certificate constants must be positive and finite");
    if (theta && (!(*theta > 0.0) || !std::isfinite(*theta))) throw DomainError("theta must be positive and finite");
}

double BoundReport::term(std::string_view name) const {
    for (const auto& t : terms)
        if (t.name == name) return t.value;
    throw DomainError("report has no term named " + std::string(name));
}

double BoundReport::detail(std::string_view name) const {
    for (const auto& t : details)
        if (t.name == name) return t.value;
    throw DomainError("report has no detail named " + std::string(name));
}

// ---------------------------------------------------------------------------
// Young modulus

double young_modulus(std::size_t d, double x) {
    if (!(x >= 0.0)) throw DomainError("young_modulus: x must be nonnegative");
    const auto s = young_shape(d);
    if (x < s.x0) return s.knee * x / s.x0;
    return std::exp(std::pow(x, s.alpha)) - s.alpha * std::exp(std::pow(s.x0, s.alpha));
}

double young_modulus_inverse(std::size_t d, double y) {
    if (!(y >= 0.0)) throw DomainError("young_modulus_inverse: y must be nonnegative");
    const auto s = young_shape(d);
    if (y < s.knee) return y * s.x0 / s.knee;
    return std::pow(std::log(y + s.alpha * std::exp(std::pow(s.x0, s.alpha))), 1.0 / s.alpha);
}

// ---------------------------------------------------------------------------
// Flip radii

double flip_radius_bilinear(const CoeffTensor& m, std::span<const Sign> xi, double r) {
    require_matrix(m, "flip_radius_bilinear");
    check_r(r);
    if (xi.size() != m.dim(1)) throw DimensionError("flip_radius_bilinear: sign vector length does not match columns");
    std::vector<double> x(xi.begin(), xi.end());
    const auto mx = multiply(m, x);
    double sup = 0.0;
    for (double v : mx) sup = std::max(sup, std::abs(v));
    std::vector<std::size_t> row_nz(m.dim(0), 0);
    double max_abs = 0.0;
    for (std::size_t e = 0; e < m.nnz(); ++e) {
        ++row_nz[m.index(e)[0]];
        max_abs = std::max(max_abs, std::abs(m.value(e)));
    }
    const double support = static_cast<double>(*std::max_element(row_nz.begin(), row_nz.end()));
    return 2.0 * r * sup + 2.0 * r * max_abs * std::min(r, support);
}

double flip_radius_multilinear(const CoeffTensor& f, const SignEnsemble& e, double r) {
    require_conforming(f, e);
    check_r(r);
    double total = 0.0;
    for (auto slots : nonempty_subsets(f.degree()))
        total += std::pow(2.0 * r, static_cast<double>(slots.size())) * restriction_sup_norm(f, slots, e);
    return total;
}

// ---------------------------------------------------------------------------
// Bilinear

BoundReport bilinear_bound(const NormProfile& p, double r, const ConstantSet& consts) {
    consts.validate();
    check_r(r);
    if (p.frobenius == 0.0) throw DomainError("bilinear certificate is undefined for the zero matrix");
    const std::size_t n = std::max(p.rows, p.cols);
    const auto ing = bound_ingredients_bilinear(p, n, r);
    BoundReport rep;
    rep.family = "bilinear";
    rep.r = r;
    rep.constants = consts;
    const double sr = p.stable_rank.value_or(1.0);
    rep.terms = {{"f_term", consts.c1 * r * ing.f_val},
                 {"g_term", consts.c2 * r * ing.g_val},
                 {"exp_term", std::exp(-consts.c3 * sr)}};
    rep.details = {{"f_value", ing.f_val},     {"g_value", ing.g_val},   {"stable_rank", sr},
                   {"frobenius", p.frobenius}, {"spectral", p.spectral}, {"n", static_cast<double>(n)}};
    if (r > static_cast<double>(n)) rep.warnings.push_back("r exceeds n; the certificate assumes r <= n");
    const auto regime = bilinear_regime(p);
    rep.regime = to_string(regime.regime);
    rep.warnings.insert(rep.warnings.end(), regime.warnings.begin(), regime.warnings.end());
    finish(rep);
    return rep;
}

BoundReport bilinear_bound(const CoeffTensor& m, double r, const ConstantSet& consts) {
    require_matrix(m, "bilinear_bound");
    if (m.is_zero()) throw DomainError("bilinear certificate is undefined for the zero matrix");
    auto rep = bilinear_bound(matrix_profile(m), r, consts);
    rep.input = "matrix " + std::to_string(m.dim(0)) + "x" + std::to_string(m.dim(1));
    return rep;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::sparse: return "sparse";
        case Regime::dense_a: return "dense-a";
        case Regime::dense_b: return "dense-b";
    }
    return "unknown";
}

std::string to_string(RegimeExpression e) {
    switch (e) {
        case RegimeExpression::frobenius_over_support: return "F/L0";
        case RegimeExpression::frobenius_over_support_log: return "F/sqrt(L0*ln n)";
        case RegimeExpression::sqrt_frobenius: return "sqrt(F)";
        case RegimeExpression::dense_b_min: return "min(F/sqrt(L0*ln n), sqrt(F))";
    }
    return "unknown";
}

RegimeGuarantee bilinear_regime(const NormProfile& p) {
    if (p.frobenius == 0.0) throw DomainError("regime is undefined for the zero matrix");
    RegimeGuarantee g;
    const std::size_t n = std::max(p.rows, p.cols);
    g.frobenius = p.frobenius;
    g.support = static_cast<double>(p.row_sup_l0);
    g.log_n = std::log(static_cast<double>(n));
    const double f = g.frobenius, l0 = g.support;

    if (p.max_abs != 1.0) g.warnings.push_back("premise |M|_inf = 1 does not hold");
    if (p.row_sup_l0 != p.maxsupp) g.warnings.push_back("premise |M|_{inf,0} = maxsupp(M) does not hold");
    if (p.row_sup_l2 != p.maxdiam) g.warnings.push_back("premise |M|_{inf,2} = maxdiam(M) does not hold");

    const double by_support = f / l0;
    const double by_log = f / std::sqrt(l0 * g.log_n);
    const double by_root = std::sqrt(f);
    if (l0 <= g.log_n) {
        g.regime = Regime::sparse;
        g.expression = g.binding = RegimeExpression::frobenius_over_support;
        g.value = by_support;
        g.derivation_value = by_support;
        return g;
    }
    g.derivation_value = std::min(by_log, std::max(by_support, by_root));
    if (f > l0 * l0) {
        g.regime = Regime::dense_a;
        g.expression = g.binding = RegimeExpression::frobenius_over_support;
        g.value = by_support;
    } else {
        g.regime = Regime::dense_b;
        g.expression = RegimeExpression::dense_b_min;
        g.value = std::min(by_log, by_root);
        g.binding = by_log <= by_root ? RegimeExpression::frobenius_over_support_log : RegimeExpression::sqrt_frobenius;
    }
    return g;
}

RegimeGuarantee bilinear_regime(const CoeffTensor& m) {
    require_matrix(m, "bilinear_regime");
    if (m.is_zero()) throw DomainError("regime is undefined for the zero matrix");
    return bilinear_regime(matrix_profile(m));
}

// ---------------------------------------------------------------------------
// Multilinear

MultilinearInputs prepare_multilinear(const CoeffTensor& f, const GammaOptions& opts) {
    if (f.degree() < 2) throw DomainError("multilinear certificate requires degree >= 2");
    if (!f.is_square()) throw DomainError("multilinear certificate requires a square tensor");
    if (f.is_zero()) throw DomainError("multilinear certificate is undefined for the zero tensor");
    MultilinearInputs in;
    in.degree = f.degree();
    in.n = f.dim(0);
    in.frobenius = tensor_profile(f).frobenius;
    in.subsets = nonempty_subsets(f.degree());
    for (auto s : in.subsets) in.max_restriction.push_back(max_restriction_frobenius(f, s));
    const auto gp = gamma_profile(f, opts);
    for (std::size_t i = 0; i < f.degree(); ++i) in.slot_min_ratio.push_back(gp.min_ratio(i));
    in.gamma_aggregate = gp.aggregate;
    in.input = "tensor degree " + std::to_string(f.degree()) + " n=" + std::to_string(in.n);
    return in;
}

BoundReport multilinear_bound(const MultilinearInputs& in, double r, const ConstantSet& consts) {
    consts.validate();
    check_r(r);
    BoundReport rep;
    rep.family = "multilinear";
    rep.input = in.input;
    rep.r = r;
    rep.constants = consts;
    const double d = static_cast<double>(in.degree);
    const double theta = consts.theta_for(in.degree);
    const double log_n = std::log(static_cast<double>(in.n));

    double stripped = 0.0, phi_total = 0.0;
    for (std::size_t s = 0; s < in.subsets.size(); ++s) {
        const auto slots = in.subsets[s];
        const double size = static_cast<double>(slots.size());
        const double base = std::pow(2.0 * r, size) * in.max_restriction[s] / in.frobenius;
        rep.terms.push_back({"sum" + slots.label(), consts.c_sum * base * std::pow(size * log_n, d / 2.0)});
        stripped += base;
        const double phi = young_modulus_inverse(in.degree, std::pow(static_cast<double>(in.n), size));
        rep.details.push_back({"phi_sum" + slots.label(), consts.c_sum * base * phi});
        phi_total += consts.c_sum * base * phi;
    }
    for (auto slots : in.subsets) {
        double best = inf;
        for (auto i : slots.slots()) {
            const double rho = in.slot_min_ratio[i];
            best = std::min(best, rho == inf ? 0.0 : std::exp(-std::pow(rho, 1.0 / theta)));
        }
        rep.terms.push_back({"exp" + slots.label(), consts.c_exp * best});
    }
    rep.details.push_back({"log_stripped_sum", stripped});
    rep.details.push_back({"phi_inverse_total", phi_total});
    rep.details.push_back({"frobenius", in.frobenius});
    rep.details.push_back({"gamma_aggregate", in.gamma_aggregate});
    for (std::size_t i = 0; i < in.slot_min_ratio.size(); ++i)
        rep.details.push_back({"min_ratio{" + std::to_string(i + 1) + "}", in.slot_min_ratio[i]});

    if (static_cast<double>(in.n) <= std::pow(d, d))
        rep.warnings.push_back("premise n >> d^d does not hold (n=" + std::to_string(in.n) + ")");
    if (r > static_cast<double>(in.n)) rep.warnings.push_back("r exceeds n; the certificate assumes r <= n");
    finish(rep);
    return rep;
}

BoundReport multilinear_bound(const CoeffTensor& f, double r, const ConstantSet& consts) {
    return multilinear_bound(prepare_multilinear(f), r, consts);
}

// ---------------------------------------------------------------------------
// Quadratic

QuadraticForm quadratic_normalize(const CoeffTensor& m, double x) {
    require_matrix(m, "quadratic_normalize");
    if (m.dim(0) != m.dim(1)) throw DomainError("quadratic forms require a square matrix");
    const std::size_t n = m.dim(0);
    double trace = 0.0;
    std::vector<double> sym(n * n, 0.0);
    for (std::size_t e = 0; e < m.nnz(); ++e) {
        const auto idx = m.index(e);
        if (idx[0] == idx[1]) {
            trace += m.value(e);
            continue;
        }
        sym[idx[0] * n + idx[1]] += 0.5 * m.value(e);
        sym[idx[1] * n + idx[0]] += 0.5 * m.value(e);
    }
    return {CoeffTensor::matrix(n, n, sym), x - trace};
}

BoundReport quadratic_bound(const CoeffTensor& m, double r, const ConstantSet& consts) {
    consts.validate();
    check_r(r);
    const auto q = quadratic_normalize(m, 0.0);
    if (q.matrix.is_zero())
        throw DegenerateChaosError("quadratic form is constant on the cube (normalized matrix is zero)");
    const auto p = matrix_profile(q.matrix);
    const std::size_t n = p.rows;
    const auto ing = bound_ingredients_bilinear(p, n, r);
    const double sr = p.stable_rank.value_or(1.0);
    const double f_part = consts.c1 * r * ing.f_val;
    const double g_part = consts.c2 * r * ing.g_val;
    const double e_part = std::exp(-consts.c3 * sr);

    BoundReport rep;
    rep.family = "quadratic";
    rep.input = "matrix " + std::to_string(n) + "x" + std::to_string(n);
    rep.r = r;
    rep.constants = consts;
    rep.terms = {{"root_term", std::pow(f_part + g_part + e_part, 0.25)},
                 {"n_term", consts.c4 / static_cast<double>(n)}};
    rep.details = {{"f_term", f_part},          {"g_term", g_part},         {"exp_term", e_part},
                   {"f_value", ing.f_val},      {"g_value", ing.g_val},     {"stable_rank", sr},
                   {"frobenius", p.frobenius},  {"trace", -q.level}};
    if (r > static_cast<double>(n)) rep.warnings.push_back("r exceeds n; the certificate assumes r <= n");
    finish(rep);
    return rep;
}

// ---------------------------------------------------------------------------
// Block-diagonal tensors

namespace {

double binom(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    double out = 1.0;
    for (std::size_t j = 1; j <= k; ++j) out = out * static_cast<double>(n - k + j) / static_cast<double>(j);
    return std::round(out);
}

double ipow(double base, std::size_t e) {
    double out = 1.0;
    for (std::size_t j = 0; j < e; ++j) out *= base;
    return out;
}

}  // namespace

double BlockClosedForms::frobenius_sq(std::size_t n, std::size_t w, std::size_t d) {
    return static_cast<double>(n) * ipow(static_cast<double>(w), d - 1);
}

double BlockClosedForms::max_restriction_frobenius(std::size_t w, std::size_t d, std::size_t fixed) {
    return std::sqrt(ipow(static_cast<double>(w), d - fixed));
}

double BlockClosedForms::gamma_sq(std::size_t n, std::size_t w, std::size_t d, std::size_t k) {
    // Each key (differing positions D with |D| = m, one unordered pair of
    // in-block values per position) collects w rows, w^{d-1-m} shared
    // values and 2^m orientations of unit products.
    const std::size_t m = k / 2;
    double fact = 1.0;
    for (std::size_t j = 2; j <= k; ++j) fact *= static_cast<double>(j);
    const double keys = static_cast<double>(n / w) * binom(d - 1, m) * ipow(binom(w, 2), m);
    const double key_sum = ipow(2.0, m) * ipow(static_cast<double>(w), d - m);
    return fact * keys * key_sum * key_sum;
}

double BlockClosedForms::stripped_sum(std::size_t n, std::size_t w, std::size_t d, double r) {
    const double sw = std::sqrt(static_cast<double>(w));
    return std::sqrt(static_cast<double>(w) / static_cast<double>(n)) * (ipow(1.0 + 2.0 * r / sw, d) - 1.0);
}

BoundReport block_tensor_bound(std::size_t n, std::size_t w, std::size_t d, double r, double scale,
                               const ConstantSet& consts) {
    if (d < 2) throw DomainError("block tensors require d >= 2");
    if (w == 0 || n == 0 || n % w != 0) throw DomainError("block width must divide n");
    if (scale == 0.0 || !std::isfinite(scale)) throw DomainError("block scale must be finite and nonzero");

    // The scale multiplies every norm by |scale| and every Gamma by scale^2;
    // all certificate ratios are therefore evaluated at scale 1.
    MultilinearInputs in;
    in.degree = d;
    in.n = n;
    const double fro_sq = BlockClosedForms::frobenius_sq(n, w, d);
    in.frobenius = std::sqrt(fro_sq);
    in.subsets = nonempty_subsets(d);
    for (auto s : in.subsets) in.max_restriction.push_back(BlockClosedForms::max_restriction_frobenius(w, d, s.size()));
    double min_ratio = inf;
    for (std::size_t k = 2; k <= 2 * (d - 1); k += 2) {
        const double g = std::sqrt(BlockClosedForms::gamma_sq(n, w, d, k));
        in.gamma_aggregate = std::max(in.gamma_aggregate, g);
        if (g > 0.0) min_ratio = std::min(min_ratio, (in.frobenius * in.frobenius) / g);
    }
    in.slot_min_ratio.assign(d, min_ratio);
    in.input = "block n=" + std::to_string(n) + " w=" + std::to_string(w) + " d=" + std::to_string(d);

    auto rep = multilinear_bound(in, r, consts);
    rep.family = "block";
    const double dd = static_cast<double>(d);
    const double ratio = static_cast<double>(n) / static_cast<double>(w);
    rep.details.push_back({"closed_form_sum", BlockClosedForms::stripped_sum(n, w, d, r)});
    rep.details.push_back({"blocks", ratio});
    rep.details.push_back(
        {"resilience_rate", std::sqrt(static_cast<double>(w) / std::log(static_cast<double>(n))) *
                                std::pow(ratio, 1.0 / (2.0 * dd))});
    if (w == n) rep.warnings.push_back("single block (n/w = 1): the exponential terms do not decay");
    return rep;
}

}  // namespace chaosres
