#include "chaosres/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace chaosres {

using ordered_json = Json;

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json json_number(double v) {
    if (!std::isfinite(v)) return format_double(v);
    return v;
}

namespace {

ordered_json constants_json(const ConstantSet& c) {
    ordered_json j;
    j["c1"] = c.c1;
    j["c2"] = c.c2;
    j["c3"] = c.c3;
    j["c4"] = c.c4;
    j["c_sum"] = c.c_sum;
    j["c_exp"] = c.c_exp;
    j["theta"] = c.theta ? ordered_json(*c.theta) : ordered_json("degree");
    return j;
}

}  // namespace

Json json_of(const BoundReport& r) {
    ordered_json j;
    j["family"] = r.family;
    j["input"] = r.input;
    j["r"] = r.r;
    ordered_json terms = ordered_json::object();
    for (const auto& t : r.terms) terms[t.name] = json_number(t.value);
    j["terms"] = terms;
    ordered_json details = ordered_json::object();
    for (const auto& t : r.details) details[t.name] = json_number(t.value);
    j["details"] = details;
    j["raw_total"] = json_number(r.raw_total);
    j["total"] = json_number(r.total);
    j["constants"] = constants_json(r.constants);
    j["regime"] = r.regime ? ordered_json(*r.regime) : ordered_json(nullptr);
    j["warnings"] = r.warnings;
    return j;
}

Json json_of(const NormProfile& p) {
    ordered_json j;
    j["rows"] = p.rows;
    j["cols"] = p.cols;
    j["frobenius"] = p.frobenius;
    j["max_abs"] = p.max_abs;
    j["row_sup_l2"] = p.row_sup_l2;
    j["col_sup_l2"] = p.col_sup_l2;
    j["row_sup_l0"] = p.row_sup_l0;
    j["col_sup_l0"] = p.col_sup_l0;
    j["maxsupp"] = p.maxsupp;
    j["maxdiam"] = p.maxdiam;
    j["spectral"] = p.spectral;
    j["stable_rank"] = p.stable_rank ? ordered_json(*p.stable_rank) : ordered_json(nullptr);
    j["spectral_iterations"] = p.spectral_iterations;
    return j;
}

Json json_of(const TensorProfile& p) {
    ordered_json j;
    j["frobenius"] = p.frobenius;
    j["frobenius_sq"] = p.frobenius * p.frobenius;
    j["max_abs"] = p.max_abs;
    return j;
}

Json json_of(const GammaProfile& p) {
    ordered_json j;
    ordered_json table = ordered_json::array();
    for (const auto& e : p.table)
        table.push_back({{"slot", e.slot + 1}, {"k", e.k}, {"value", e.value}, {"ratio", json_number(e.ratio)}});
    j["table"] = table;
    j["aggregate"] = p.aggregate;
    j["frobenius_sq"] = p.frobenius_sq;
    return j;
}


std::string to_json(const std::vector<BoundReport>& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) arr.push_back(json_of(r));
    return arr.dump(2);
}

Json json_of(const EmpiricalCdf& cdf) {
    ordered_json j;
    j["trials"] = cdf.trials;
    j["seed"] = cdf.seed;
    ordered_json rows = ordered_json::array();
    for (std::size_t k = 0; k < cdf.r.size(); ++k)
        rows.push_back({{"r", cdf.r[k]}, {"estimate", cdf.estimate[k]}, {"stderr", cdf.standard_error[k]}});
    j["rows"] = rows;
    return j;
}

std::string to_json(const NormProfile& p) { return json_of(p).dump(2); }
std::string to_json(const TensorProfile& p) { return json_of(p).dump(2); }
std::string to_json(const GammaProfile& p) { return json_of(p).dump(2); }
std::string to_json(const BoundReport& r) { return json_of(r).dump(2); }
std::string to_json(const EmpiricalCdf& cdf) { return json_of(cdf).dump(2); }

std::string to_csv(const std::vector<BoundReport>& rows) {
    std::ostringstream out;
    out << "r";
    if (!rows.empty())
        for (const auto& t : rows.front().terms) out << ',' << t.name;
    out << ",raw_total,total\n";
    for (const auto& r : rows) {
        out << format_double(r.r);
        for (const auto& t : r.terms) out << ',' << format_double(t.value);
        out << ',' << format_double(r.raw_total) << ',' << format_double(r.total) << '\n';
    }
    return out.str();
}

std::string to_csv(const EmpiricalCdf& cdf) {
    std::ostringstream out;
    out << "r,estimate,stderr\n";
    for (std::size_t k = 0; k < cdf.r.size(); ++k)
        out << cdf.r[k] << ',' << format_double(cdf.estimate[k]) << ',' << format_double(cdf.standard_error[k]) << '\n';
    return out.str();
}

}  // namespace chaosres
