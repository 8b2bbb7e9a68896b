#include "generators.hpp"

#include "chaosres/errors.hpp"
#include "chaosres/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chaosres::cli {

CoeffTensor identity_matrix(std::size_t n) {
    if (n == 0) throw DomainError("identity size must be positive");
    std::vector<Entry> entries;
    for (std::size_t j = 0; j < n; ++j) entries.push_back({{j, j}, 1.0});
    return CoeffTensor::from_entries({n, n}, entries);
}

CoeffTensor block_tensor(std::size_t n, std::size_t w, std::size_t d, double scale) {
    if (d == 0) throw DomainError("block tensor degree must be positive");
    if (w == 0 || n % w != 0) throw DomainError("block width must divide n");
    if (scale == 0.0) throw DomainError("block scale must be nonzero");
    std::uint64_t per_block = 1;
    for (std::size_t p = 0; p < d; ++p) per_block *= w;
    if (per_block * (n / w) > (std::uint64_t{1} << 24)) throw GuardError("block tensor too large to materialize");
    std::vector<Entry> entries;
    entries.reserve(per_block * (n / w));
    std::vector<std::size_t> local(d, 0);
    for (std::size_t b = 0; b < n / w; ++b) {
        std::fill(local.begin(), local.end(), 0);
        for (std::uint64_t t = 0; t < per_block; ++t) {
            Entry e;
            for (auto l : local) e.idx.push_back(b * w + l);
            e.val = scale;
            entries.push_back(std::move(e));
            for (std::size_t p = d; p-- > 0;) {
                if (++local[p] < w) break;
                local[p] = 0;
            }
        }
    }
    return CoeffTensor::from_entries(std::vector<std::size_t>(d, n), entries);
}

CoeffTensor random_tensor(std::size_t d, std::size_t n, double density, std::uint64_t seed) {
    if (d == 0 || n == 0) throw DomainError("random tensor needs positive d and n");
    if (!(density > 0.0 && density <= 1.0)) throw DomainError("density must lie in (0, 1]");
    std::uint64_t total = 1;
    for (std::size_t p = 0; p < d; ++p) {
        total *= n;
        if (total > (std::uint64_t{1} << 24)) throw GuardError("random tensor index space too large");
    }
    Rng rng(seed);
    std::vector<Entry> entries;
    std::vector<std::size_t> idx(d, 0);
    for (std::uint64_t t = 0; t < total; ++t) {
        if (rng.bernoulli(density)) {
            const auto mag = static_cast<double>(1 + rng.below(3));
            entries.push_back({idx, rng.sign() * mag});
        }
        for (std::size_t p = d; p-- > 0;) {
            if (++idx[p] < n) break;
            idx[p] = 0;
        }
    }
    if (entries.empty()) entries.push_back({std::vector<std::size_t>(d, 0), 1.0});
    return CoeffTensor::from_entries(std::vector<std::size_t>(d, n), entries);
}

bool GeneratorSpec::has(const std::string& key) const {
    return std::any_of(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
}

namespace {

const std::string& lookup(const GeneratorSpec& spec, const std::string& key) {
    for (const auto& [k, v] : spec.fields)
        if (k == key) return v;
    throw ParseError("generator is missing " + key + "=");
}

}  // namespace

std::size_t GeneratorSpec::size(const std::string& key) const {
    const auto& v = lookup(*this, key);
    std::size_t pos = 0;
    unsigned long long out = 0;
    try {
        out = std::stoull(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty() || v.front() == '-') throw ParseError(key + "=" + v + " is not a nonnegative integer");
    return static_cast<std::size_t>(out);
}

double GeneratorSpec::real(const std::string& key) const {
    const auto& v = lookup(*this, key);
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty() || !std::isfinite(out)) throw ParseError(key + "=" + v + " is not a number");
    return out;
}

std::uint64_t GeneratorSpec::seed(const std::string& key) const { return size(key); }

GeneratorSpec parse_generator(const std::vector<std::string>& tokens, const std::vector<std::string>& allowed) {
    GeneratorSpec spec;
    for (const auto& t : tokens) {
        const auto eq = t.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError("generator token '" + t + "' is not key=value");
        auto key = t.substr(0, eq);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ParseError("unknown generator key '" + key + "'");
        if (spec.has(key)) throw ParseError("generator key '" + key + "' given twice");
        spec.fields.emplace_back(std::move(key), t.substr(eq + 1));
    }
    return spec;
}

}  // namespace chaosres::cli
