#include "chaosres/matrixisation.hpp"

#include "chaosres/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

namespace chaosres {

namespace {

void check_slot(const CoeffTensor& f, std::size_t slot) {
    if (slot >= f.degree())
        throw DomainError("slot " + std::to_string(slot + 1) + " out of range for degree " +
                          std::to_string(f.degree()));
}

void check_slots(const CoeffTensor& f, SlotSet slots) {
    if (slots.empty()) throw DomainError("slot set must be nonempty");
    if ((slots.bits() & ~SlotSet::all(f.degree()).bits()) != 0) throw DomainError("slot set exceeds tensor degree");
}

// Mixed-radix key of the index positions in I; throws when the key space
// does not fit in 64 bits.
class SliceKey {
public:
    SliceKey(const CoeffTensor& f, SlotSet slots) : slots_(slots.slots()) {
        std::uint64_t space = 1;
        for (auto s : slots_) {
            if (space > std::numeric_limits<std::uint64_t>::max() / f.dim(s))
                throw GuardError("restriction key space exceeds 64 bits");
            space *= f.dim(s);
            radix_.push_back(f.dim(s));
        }
    }
    std::uint64_t operator()(std::span<const Index> idx) const {
        std::uint64_t key = 0;
        for (std::size_t k = 0; k < slots_.size(); ++k) key = key * radix_[k] + idx[slots_[k]];
        return key;
    }

private:
    std::vector<std::size_t> slots_;
    std::vector<std::size_t> radix_;
};

}  // namespace

std::uint64_t Matrixisation::column_of(std::span<const Index> idx) const {
    std::uint64_t col = 0;
    std::size_t k = 0;
    for (std::size_t p = 0; p < idx.size(); ++p) {
        if (p == slot) continue;
        col = col * col_dims[k++] + idx[p];
    }
    return col;
}

std::vector<Index> Matrixisation::column_tuple(std::uint64_t col) const {
    std::vector<Index> out(col_dims.size());
    for (std::size_t k = col_dims.size(); k-- > 0;) {
        out[k] = static_cast<Index>(col % col_dims[k]);
        col /= col_dims[k];
    }
    return out;
}

std::vector<double> Matrixisation::multiply(std::span<const double> x) const {
    if (x.size() != cols) throw DimensionError("matrixisation multiply: vector length does not match columns");
    std::vector<double> y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t e = row_ptr[r]; e < row_ptr[r + 1]; ++e) y[r] += val[e] * x[col_idx[e]];
    return y;
}

double Matrixisation::gram_trace() const {
    std::unordered_map<std::uint64_t, double> col_sq;
    for (std::size_t e = 0; e < nnz(); ++e) col_sq[col_idx[e]] += val[e] * val[e];
    std::vector<std::pair<std::uint64_t, double>> sorted(col_sq.begin(), col_sq.end());
    std::sort(sorted.begin(), sorted.end());
    double trace = 0.0;
    for (const auto& [c, s] : sorted) trace += s;
    return trace;
}

Matrixisation matrixise(const CoeffTensor& f, std::size_t slot) {
    check_slot(f, slot);
    Matrixisation a;
    a.slot = slot;
    a.rows = f.dim(slot);
    a.cols = 1;
    for (std::size_t p = 0; p < f.degree(); ++p) {
        if (p == slot) continue;
        if (a.cols > (std::uint64_t{1} << 62) / f.dim(p)) throw GuardError("matrixisation has too many columns");
        a.cols *= f.dim(p);
        a.col_dims.push_back(f.dim(p));
    }

    std::vector<std::size_t> count(a.rows, 0);
    for (std::size_t e = 0; e < f.nnz(); ++e) ++count[f.index(e)[slot]];
    a.row_ptr.assign(a.rows + 1, 0);
    for (std::size_t r = 0; r < a.rows; ++r) a.row_ptr[r + 1] = a.row_ptr[r] + count[r];

    a.col_idx.resize(f.nnz());
    a.val.resize(f.nnz());
    std::vector<std::size_t> fill(a.row_ptr.begin(), a.row_ptr.end() - 1);
    for (std::size_t e = 0; e < f.nnz(); ++e) {
        const auto idx = f.index(e);
        const std::size_t pos = fill[idx[slot]]++;
        a.col_idx[pos] = a.column_of(idx);
        a.val[pos] = f.value(e);
    }
    // Entries arrive in lexicographic order of the full tuple, which within a
    // row is already column order; sort defensively only when needed.
    for (std::size_t r = 0; r < a.rows; ++r) {
        const auto b = a.row_ptr[r], e = a.row_ptr[r + 1];
        if (std::is_sorted(a.col_idx.begin() + b, a.col_idx.begin() + e)) continue;
        std::vector<std::size_t> order(e - b);
        std::iota(order.begin(), order.end(), b);
        std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a.col_idx[x] < a.col_idx[y]; });
        std::vector<std::uint64_t> ci;
        std::vector<double> vv;
        for (auto o : order) {
            ci.push_back(a.col_idx[o]);
            vv.push_back(a.val[o]);
        }
        std::copy(ci.begin(), ci.end(), a.col_idx.begin() + b);
        std::copy(vv.begin(), vv.end(), a.val.begin() + b);
    }
    return a;
}

std::vector<double> vectorize_without(const SignEnsemble& e, std::size_t slot) {
    if (slot >= e.degree()) throw DomainError("slot out of range for ensemble");
    std::vector<double> out{1.0};
    for (std::size_t p = 0; p < e.degree(); ++p) {
        if (p == slot) continue;
        const auto v = e.vector(p);
        if (out.size() * v.size() > (std::size_t{1} << 26)) throw GuardError("vectorization too large");
        std::vector<double> next;
        next.reserve(out.size() * v.size());
        for (double a : out)
            for (auto s : v) next.push_back(a * s);
        out = std::move(next);
    }
    return out;
}

CoeffTensor restrict_slots(const CoeffTensor& f, SlotSet slots, std::span<const std::size_t> directions) {
    check_slots(f, slots);
    const auto fixed = slots.slots();
    if (directions.size() != fixed.size())
        throw DomainError("restriction needs one direction per fixed slot");
    for (std::size_t k = 0; k < fixed.size(); ++k)
        if (directions[k] >= f.dim(fixed[k]))
            throw DomainError("direction out of range in slot " + std::to_string(fixed[k] + 1));

    std::vector<std::size_t> dims;
    for (std::size_t p = 0; p < f.degree(); ++p)
        if (!slots.contains(p)) dims.push_back(f.dim(p));

    std::vector<Entry> entries;
    for (std::size_t e = 0; e < f.nnz(); ++e) {
        const auto idx = f.index(e);
        bool match = true;
        for (std::size_t k = 0; k < fixed.size() && match; ++k) match = idx[fixed[k]] == directions[k];
        if (!match) continue;
        Entry out;
        for (std::size_t p = 0; p < f.degree(); ++p)
            if (!slots.contains(p)) out.idx.push_back(idx[p]);
        out.val = f.value(e);
        entries.push_back(std::move(out));
    }
    if (dims.empty()) return CoeffTensor::scalar(entries.empty() ? 0.0 : entries.front().val);
    return CoeffTensor::from_entries(std::move(dims), entries);
}

double max_restriction_frobenius(const CoeffTensor& f, SlotSet slots) {
    check_slots(f, slots);
    const SliceKey key(f, slots);
    std::unordered_map<std::uint64_t, double> sq;
    for (std::size_t e = 0; e < f.nnz(); ++e) sq[key(f.index(e))] += f.value(e) * f.value(e);
    double best = 0.0;
    for (const auto& [k, s] : sq) best = std::max(best, s);
    return std::sqrt(best);
}

double restriction_sup_norm(const CoeffTensor& f, SlotSet slots, const SignEnsemble& e) {
    check_slots(f, slots);
    require_conforming(f, e);
    const SliceKey key(f, slots);
    std::unordered_map<std::uint64_t, double> contracted;
    for (std::size_t k = 0; k < f.nnz(); ++k) {
        const auto idx = f.index(k);
        int sign = 1;
        for (std::size_t p = 0; p < f.degree(); ++p)
            if (!slots.contains(p)) sign *= e.at(p, idx[p]);
        contracted[key(idx)] += sign * f.value(k);
    }
    double best = 0.0;
    for (const auto& [k, v] : contracted) best = std::max(best, std::abs(v));
    return best;
}

std::vector<double> chaos_restriction_vector(const CoeffTensor& f, std::size_t slot, const SignEnsemble& e) {
    check_slot(f, slot);
    require_conforming(f, e);
    std::vector<double> v(f.dim(slot), 0.0);
    for (std::size_t k = 0; k < f.nnz(); ++k) {
        const auto idx = f.index(k);
        int sign = 1;
        for (std::size_t p = 0; p < f.degree(); ++p)
            if (p != slot) sign *= e.at(p, idx[p]);
        v[idx[slot]] += sign * f.value(k);
    }
    return v;
}

}  // namespace chaosres
