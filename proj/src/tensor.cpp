#include "chaosres/tensor.hpp"

#include "chaosres/errors.hpp"
#include "chaosres/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace chaosres {

// ---------------------------------------------------------------------------
// SlotSet

SlotSet::SlotSet(std::initializer_list<std::size_t> slots) {
    for (auto s : slots) {
        if (s >= 32) throw DomainError("slot index exceeds 31");
        bits_ |= 1u << s;
    }
}

std::size_t SlotSet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<std::size_t> SlotSet::slots() const {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < 32; ++s)
        if (contains(s)) out.push_back(s);
    return out;
}

std::string SlotSet::label() const {
    std::string out = "{";
    bool first = true;
    for (auto s : slots()) {
        if (!first) out += ',';
        out += std::to_string(s + 1);
        first = false;
    }
    return out + "}";
}

std::vector<SlotSet> nonempty_subsets(std::size_t degree) {
    if (degree >= 32) throw DomainError("degree too large for subset enumeration");
    std::vector<SlotSet> out;
    const std::uint32_t count = 1u << degree;
    out.reserve(count - 1);
    for (std::uint32_t bits = 1; bits < count; ++bits) out.emplace_back(bits);
    return out;
}

// ---------------------------------------------------------------------------
// CoeffTensor

namespace {

void check_dims(const std::vector<std::size_t>& dims) {
    for (auto n : dims) {
        if (n == 0) throw DomainError("tensor dims must be positive");
        if (n > std::numeric_limits<Index>::max()) throw DomainError("tensor dim too large");
    }
}

std::uint64_t saturating_product(const std::vector<std::size_t>& dims) {
    std::uint64_t p = 1;
    for (auto n : dims) {
        if (p > std::numeric_limits<std::uint64_t>::max() / n) return std::numeric_limits<std::uint64_t>::max();
        p *= n;
    }
    return p;
}

}  // namespace

CoeffTensor::CoeffTensor() : val_{}, storage_(Storage::sparse) {}

CoeffTensor CoeffTensor::build(std::vector<std::size_t> dims, std::vector<Index> idx, std::vector<double> val,
                               Storage storage) {
    const std::size_t d = dims.size();
    const std::size_t n = val.size();

    // Sort entries lexicographically by index tuple.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(idx.begin() + a * d, idx.begin() + (a + 1) * d, idx.begin() + b * d,
                                            idx.begin() + (b + 1) * d);
    };
    if (!std::is_sorted(order.begin(), order.end(), less)) std::sort(order.begin(), order.end(), less);

    CoeffTensor t;
    t.dims_ = std::move(dims);
    t.storage_ = storage;
    t.idx_.reserve(n * d);
    t.val_.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t e = order[k];
        if (k > 0 && d > 0 && !less(order[k - 1], e))
            throw DomainError("duplicate tensor index");
        if (val[e] == 0.0) continue;
        if (!std::isfinite(val[e])) throw DomainError("tensor coefficients must be finite");
        t.idx_.insert(t.idx_.end(), idx.begin() + e * d, idx.begin() + (e + 1) * d);
        t.val_.push_back(val[e]);
    }
    if (d == 0 && t.val_.size() > 1) throw DomainError("degree-0 tensor holds a single scalar");
    if (storage == Storage::dense) t.materialize_dense();
    return t;
}

void CoeffTensor::materialize_dense() {
    if (degree() > 3) throw DomainError("dense storage is limited to degree <= 3");
    const auto total = total_size();
    if (total > (std::uint64_t{1} << 28)) throw GuardError("dense storage too large");
    dense_ = to_dense();
}

CoeffTensor CoeffTensor::from_entries(std::vector<std::size_t> dims, std::span<const Entry> entries,
                                      Storage storage) {
    check_dims(dims);
    const std::size_t d = dims.size();
    std::vector<Index> idx;
    std::vector<double> val;
    idx.reserve(entries.size() * d);
    val.reserve(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) {
        const auto& entry = entries[e];
        if (entry.idx.size() != d)
            throw DomainError("entry " + std::to_string(e) + " has " + std::to_string(entry.idx.size()) +
                              " indices, expected " + std::to_string(d));
        for (std::size_t p = 0; p < d; ++p) {
            if (entry.idx[p] >= dims[p])
                throw DomainError("entry " + std::to_string(e) + " index out of range in slot " +
                                  std::to_string(p + 1));
            idx.push_back(static_cast<Index>(entry.idx[p]));
        }
        val.push_back(entry.val);
    }
    return build(std::move(dims), std::move(idx), std::move(val), storage);
}

CoeffTensor CoeffTensor::from_dense(std::vector<std::size_t> dims, std::span<const double> values, Storage storage) {
    check_dims(dims);
    const auto total = saturating_product(dims);
    if (values.size() != total)
        throw DomainError("dense array has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(total));
    const std::size_t d = dims.size();
    std::vector<Index> idx;
    std::vector<double> val;
    std::vector<std::size_t> cur(d, 0);
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        if (values[flat] != 0.0) {
            for (auto c : cur) idx.push_back(static_cast<Index>(c));
            val.push_back(values[flat]);
        }
        for (std::size_t p = d; p-- > 0;) {
            if (++cur[p] < dims[p]) break;
            cur[p] = 0;
        }
    }
    return build(std::move(dims), std::move(idx), std::move(val), storage);
}

CoeffTensor CoeffTensor::matrix(std::size_t rows, std::size_t cols, std::span<const double> row_major,
                                Storage storage) {
    return from_dense({rows, cols}, row_major, storage);
}

CoeffTensor CoeffTensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    std::vector<double> flat;
    for (const auto& row : rows) {
        if (row.size() != c) throw DomainError("ragged matrix literal");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return matrix(r, c, flat);
}

CoeffTensor CoeffTensor::scalar(double value) {
    return build({}, {}, value == 0.0 ? std::vector<double>{} : std::vector<double>{value}, Storage::sparse);
}

bool CoeffTensor::is_square() const {
    return std::all_of(dims_.begin(), dims_.end(), [&](auto n) { return n == dims_.front(); });
}

std::uint64_t CoeffTensor::total_size() const { return saturating_product(dims_); }

bool CoeffTensor::has_integer_coefficients() const {
    return std::all_of(val_.begin(), val_.end(),
                       [](double v) { return std::nearbyint(v) == v && std::abs(v) < 0x1.0p52; });
}

double CoeffTensor::at(std::span<const std::size_t> idx) const {
    const std::size_t d = degree();
    if (idx.size() != d) throw DimensionError("index tuple length does not match degree");
    for (std::size_t p = 0; p < d; ++p)
        if (idx[p] >= dims_[p]) throw DimensionError("index out of range");
    if (d == 0) return val_.empty() ? 0.0 : val_[0];
    if (storage_ == Storage::dense) {
        std::size_t flat = 0;
        for (std::size_t p = 0; p < d; ++p) flat = flat * dims_[p] + idx[p];
        return dense_[flat];
    }
    std::size_t lo = 0, hi = nnz();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        const auto key = index(mid);
        bool less = false, equal = true;
        for (std::size_t p = 0; p < d; ++p) {
            if (key[p] != idx[p]) {
                less = key[p] < idx[p];
                equal = false;
                break;
            }
        }
        if (equal) return val_[mid];
        if (less)
            lo = mid + 1;
        else
            hi = mid;
    }
    return 0.0;
}

double CoeffTensor::at(std::initializer_list<std::size_t> idx) const {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
}

double CoeffTensor::scalar_value() const {
    if (degree() != 0) throw DomainError("scalar_value requires a degree-0 tensor");
    return val_.empty() ? 0.0 : val_[0];
}

CoeffTensor CoeffTensor::scaled(double c) const {
    std::vector<double> val(val_);
    for (auto& v : val) v *= c;
    return build(dims_, idx_, std::move(val), storage_);
}

CoeffTensor CoeffTensor::with_storage(Storage storage) const {
    if (storage == storage_) return *this;
    CoeffTensor t = *this;
    t.storage_ = storage;
    t.dense_.clear();
    if (storage == Storage::dense) t.materialize_dense();
    return t;
}

CoeffTensor CoeffTensor::transposed() const {
    if (degree() != 2) throw DomainError("transpose requires a degree-2 tensor");
    std::vector<Index> idx;
    idx.reserve(idx_.size());
    for (std::size_t e = 0; e < nnz(); ++e) {
        idx.push_back(idx_[2 * e + 1]);
        idx.push_back(idx_[2 * e]);
    }
    return build({dims_[1], dims_[0]}, std::move(idx), val_, storage_);
}

std::vector<double> CoeffTensor::to_dense() const {
    const auto total = total_size();
    if (total > (std::uint64_t{1} << 30)) throw GuardError("tensor too large to densify");
    std::vector<double> out(total, 0.0);
    const std::size_t d = degree();
    for (std::size_t e = 0; e < nnz(); ++e) {
        std::size_t flat = 0;
        for (std::size_t p = 0; p < d; ++p) flat = flat * dims_[p] + idx_[e * d + p];
        out[flat] = val_[e];
    }
    return out;
}

bool operator==(const CoeffTensor& a, const CoeffTensor& b) {
    return a.dims_ == b.dims_ && a.idx_ == b.idx_ && a.val_ == b.val_;
}

// ---------------------------------------------------------------------------
// SignEnsemble / TernaryVector

SignEnsemble::SignEnsemble(std::vector<std::vector<Sign>> vectors) : vectors_(std::move(vectors)) {
    for (const auto& v : vectors_)
        for (auto s : v)
            if (s != 1 && s != -1) throw DomainError("sign ensemble entries must be +1 or -1");
}

SignEnsemble SignEnsemble::ones(std::span<const std::size_t> dims) {
    std::vector<std::vector<Sign>> v;
    for (auto n : dims) v.emplace_back(n, Sign{1});
    return SignEnsemble(std::move(v));
}

SignEnsemble SignEnsemble::from_mask(std::span<const std::size_t> dims, std::uint64_t mask) {
    std::vector<std::vector<Sign>> v;
    std::size_t c = 0;
    for (auto n : dims) {
        std::vector<Sign> s(n);
        for (std::size_t j = 0; j < n; ++j, ++c) s[j] = (c < 64 && ((mask >> c) & 1u)) ? Sign{-1} : Sign{1};
        v.push_back(std::move(s));
    }
    return SignEnsemble(std::move(v));
}

std::vector<std::size_t> SignEnsemble::dims() const {
    std::vector<std::size_t> out;
    out.reserve(vectors_.size());
    for (const auto& v : vectors_) out.push_back(v.size());
    return out;
}

std::size_t SignEnsemble::total_size() const {
    std::size_t s = 0;
    for (const auto& v : vectors_) s += v.size();
    return s;
}

std::uint64_t SignEnsemble::mask() const {
    if (total_size() > 64) throw GuardError("ensemble does not fit in a 64-bit mask");
    std::uint64_t m = 0;
    std::size_t c = 0;
    for (const auto& v : vectors_)
        for (auto s : v) {
            if (s < 0) m |= std::uint64_t{1} << c;
            ++c;
        }
    return m;
}

std::vector<Sign> SignEnsemble::flattened() const {
    std::vector<Sign> out;
    out.reserve(total_size());
    for (const auto& v : vectors_) out.insert(out.end(), v.begin(), v.end());
    return out;
}

SignEnsemble SignEnsemble::flipped(std::size_t slot, std::size_t j) const {
    SignEnsemble copy = *this;
    auto& s = copy.vectors_.at(slot).at(j);
    s = static_cast<Sign>(-s);
    return copy;
}

SignEnsemble SignEnsemble::without(SlotSet slots) const {
    std::vector<std::vector<Sign>> v;
    for (std::size_t p = 0; p < vectors_.size(); ++p)
        if (!slots.contains(p)) v.push_back(vectors_[p]);
    return SignEnsemble(std::move(v));
}

TernaryVector::TernaryVector(std::vector<std::int8_t> entries) : entries_(std::move(entries)) {
    for (auto v : entries_)
        if (v < -1 || v > 1) throw DomainError("ternary entries must lie in {-1, 0, 1}");
}

// ---------------------------------------------------------------------------
// Operations

void require_conforming(const CoeffTensor& f, const SignEnsemble& e) {
    if (e.degree() != f.degree())
        throw DimensionError("ensemble has " + std::to_string(e.degree()) + " vectors, tensor degree is " +
                             std::to_string(f.degree()));
    for (std::size_t p = 0; p < f.degree(); ++p)
        if (e.vector(p).size() != f.dim(p))
            throw DimensionError("ensemble vector " + std::to_string(p + 1) + " has length " +
                                 std::to_string(e.vector(p).size()) + ", expected " + std::to_string(f.dim(p)));
}

double evaluate_chaos(const CoeffTensor& f, const SignEnsemble& e) {
    require_conforming(f, e);
    const std::size_t d = f.degree();
    double sum = 0.0;
    for (std::size_t k = 0; k < f.nnz(); ++k) {
        const auto idx = f.index(k);
        int sign = 1;
        for (std::size_t p = 0; p < d; ++p) sign *= e.at(p, idx[p]);
        sum += sign * f.value(k);
    }
    return sum;
}

std::size_t hamming_distance(const SignEnsemble& a, const SignEnsemble& b) {
    if (a.dims() != b.dims()) throw DimensionError("hamming_distance: ensembles have different dims");
    std::size_t count = 0;
    for (std::size_t p = 0; p < a.degree(); ++p) {
        const auto va = a.vector(p), vb = b.vector(p);
        for (std::size_t j = 0; j < va.size(); ++j) count += va[j] != vb[j];
    }
    return count;
}

SignEnsemble sample_ensemble(std::span<const std::size_t> dims, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<Sign>> v;
    for (auto n : dims) {
        if (n == 0) throw DomainError("ensemble dims must be positive");
        std::vector<Sign> s(n);
        for (auto& x : s) x = static_cast<Sign>(rng.sign());
        v.push_back(std::move(s));
    }
    return SignEnsemble(std::move(v));
}

TernaryVector sample_lazy(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DomainError("sample_lazy: n must be positive");
    Rng rng(seed);
    std::vector<std::int8_t> out(n);
    for (auto& x : out) {
        const auto b = rng.bits() >> 62;  // two fair bits
        x = b < 2 ? 0 : (b == 2 ? 1 : -1);
    }
    return TernaryVector(std::move(out));
}

}  // namespace chaosres
