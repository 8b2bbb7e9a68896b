#include "chaosres/empirical.hpp"

#include "chaosres/bounds.hpp"
#include "chaosres/errors.hpp"
#include "chaosres/kernels.hpp"
#include "chaosres/matrixisation.hpp"
#include "chaosres/norms.hpp"
#include "chaosres/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace chaosres {

std::string to_string(SearchMethod m) {
    switch (m) {
        case SearchMethod::automatic: return "auto";
        case SearchMethod::exhaustive_bfs: return "exhaustive-bfs";
        case SearchMethod::meet_in_middle: return "meet-in-middle";
    }
    return "unknown";
}

namespace {

constexpr std::size_t none = static_cast<std::size_t>(-1);

double level_tolerance(const CoeffTensor& f, const ResilienceOptions& opts) {
    if (opts.tolerance) return *opts.tolerance;
    return f.has_integer_coefficients() ? 0.0 : 1e-9 * tensor_profile(f).frobenius;
}

SignEnsemble apply_flips(const SignEnsemble& e, std::span<const std::pair<std::size_t, std::size_t>> flips) {
    std::vector<std::vector<Sign>> v;
    for (std::size_t p = 0; p < e.degree(); ++p) v.emplace_back(e.vector(p).begin(), e.vector(p).end());
    for (auto [p, j] : flips) v[p][j] = static_cast<Sign>(-v[p][j]);
    return SignEnsemble(std::move(v));
}

// Depth-first flip search over all coordinates with incremental value updates.
class FlipSearch {
public:
    FlipSearch(const CoeffTensor& f, const SignEnsemble& e, double x, double tol) : f_(f), x_(x), tol_(tol) {
        for (std::size_t p = 0; p < f.degree(); ++p)
            for (std::size_t j = 0; j < f.dim(p); ++j) coords_.emplace_back(p, j);
        std::vector<std::size_t> offset(f.degree(), 0);
        for (std::size_t p = 1; p < f.degree(); ++p) offset[p] = offset[p - 1] + f.dim(p - 1);
        touching_.resize(coords_.size());
        prod_.resize(f.nnz());
        for (std::size_t k = 0; k < f.nnz(); ++k) {
            const auto idx = f.index(k);
            double v = f.value(k);
            for (std::size_t p = 0; p < f.degree(); ++p) {
                v *= e.at(p, idx[p]);
                touching_[offset[p] + idx[p]].push_back(k);
            }
            prod_[k] = v;
            value_ += v;
        }
    }

    [[nodiscard]] bool hit() const { return std::abs(value_ - x_) <= tol_; }
    [[nodiscard]] std::size_t coordinates() const { return coords_.size(); }

    // Smallest flip count <= cap reaching x, or none.
    std::size_t run(std::size_t cap) {
        if (hit()) return 0;
        cap = std::min(cap, coords_.size());
        // Cheap layers first; most instances resolve at small radius.
        for (std::size_t radius = 1; radius <= std::min<std::size_t>(cap, 3); ++radius) {
            if (exact_layer(0, radius)) return radius;
        }
        if (cap <= 3) return none;
        best_ = cap + 1;
        pruned(0);
        return best_ <= cap ? best_ : none;
    }

    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> witness_flips() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (auto c : witness_) out.push_back(coords_[c]);
        return out;
    }

private:
    void flip(std::size_t c) {
        double delta = 0.0;
        for (auto k : touching_[c]) {
            delta += prod_[k];
            prod_[k] = -prod_[k];
        }
        value_ -= 2.0 * delta;
    }

    bool exact_layer(std::size_t start, std::size_t remaining) {
        for (std::size_t c = start; c + remaining <= coords_.size(); ++c) {
            const double saved = value_;
            flip(c);
            stack_.push_back(c);
            const bool found = remaining == 1 ? hit() : exact_layer(c + 1, remaining - 1);
            if (found && witness_.empty()) witness_ = stack_;
            stack_.pop_back();
            flip(c);
            value_ = saved;
            if (found) return true;
        }
        return false;
    }

    void pruned(std::size_t start) {
        for (std::size_t c = start; c < coords_.size(); ++c) {
            const double saved = value_;
            flip(c);
            stack_.push_back(c);
            const std::size_t depth = stack_.size();
            if (depth < best_ && hit()) {
                best_ = depth;
                witness_ = stack_;
            }
            if (depth + 1 < best_) pruned(c + 1);
            stack_.pop_back();
            flip(c);
            value_ = saved;
        }
    }

    const CoeffTensor& f_;
    double x_;
    double tol_;
    double value_ = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> coords_;
    std::vector<std::vector<std::size_t>> touching_;
    std::vector<double> prod_;
    std::vector<std::size_t> stack_;
    std::vector<std::size_t> witness_;
    std::size_t best_ = 0;
};

ResilienceResult exhaustive(const CoeffTensor& f, const SignEnsemble& e, double x, double tol,
                            const ResilienceOptions& opts) {
    const std::size_t coords = e.total_size();
    if (coords > opts.max_coordinates)
        throw GuardError("exhaustive resilience search over " + std::to_string(coords) +
                         " coordinates exceeds the limit of " + std::to_string(opts.max_coordinates));
    FlipSearch search(f, e, x, tol);
    ResilienceResult res;
    res.method = SearchMethod::exhaustive_bfs;
    const auto r = search.run(opts.max_radius);
    if (r == none) {
        res.outcome = opts.max_radius >= coords ? ResilienceResult::Outcome::unreachable
                                                : ResilienceResult::Outcome::beyond_cap;
        return res;
    }
    res.outcome = ResilienceResult::Outcome::found;
    res.value = r;
    res.witness = apply_flips(e, search.witness_flips());
    return res;
}

// Bilinear search: enumerate flip sets of slot 1 by increasing size; for each,
// the cheapest set of slot-2 flips is a minimum-cardinality subset-sum solved
// by splitting slot 2 into two halves.
class BilinearSearch {
public:
    BilinearSearch(const CoeffTensor& m, const SignEnsemble& e, double x, double tol, const ResilienceOptions& opts)
        : m_(m), e_(e), x_(x), tol_(tol), opts_(opts), rows_(m.dim(0)), cols_(m.dim(1)) {
        row_entries_.resize(rows_);
        for (std::size_t k = 0; k < m.nnz(); ++k) row_entries_[m.index(k)[0]].push_back(k);
        c_.assign(cols_, 0.0);
        for (std::size_t k = 0; k < m.nnz(); ++k) {
            const auto idx = m.index(k);
            c_[idx[1]] += e.at(0, idx[0]) * m.value(k);
        }
        half_ = cols_ / 2;
    }

    // Smallest total flip count <= cap, or none.
    std::size_t run(std::size_t cap) {
        best_ = none;
        for (std::size_t s = 0; s <= std::min(cap, rows_); ++s) {
            if (best_ != none && s >= best_) break;
            combinations(0, s, cap);
        }
        return best_;
    }

    [[nodiscard]] SignEnsemble witness() const {
        std::vector<std::pair<std::size_t, std::size_t>> flips;
        for (auto a : best_rows_) flips.emplace_back(0, a);
        for (std::size_t t = 0; t < cols_; ++t)
            if ((best_cols_ >> t) & 1u) flips.emplace_back(1, t);
        return apply_flips(e_, flips);
    }

private:
    struct HalfSum {
        double sum;
        std::uint32_t pop;
        std::uint64_t mask;
    };

    // Rows are flipped at most once along a search path and c is restored by copy.
    void flip_row(std::size_t a) {
        const double old = e_.at(0, a);
        for (auto k : row_entries_[a]) c_[m_.index(k)[1]] -= 2.0 * old * m_.value(k);
    }

    void combinations(std::size_t start, std::size_t remaining, std::size_t cap) {
        if (remaining == 0) {
            if (++outer_sets_ > opts_.max_outer_sets)
                throw GuardError("meet-in-the-middle enumerated more than " + std::to_string(opts_.max_outer_sets) +
                                 " outer flip sets");
            const std::size_t s = rows_stack_.size();
            std::size_t limit = cap - s;
            if (best_ != none) limit = std::min(limit, best_ - s - 1);
            std::uint64_t mask = 0;
            const auto t = inner(limit, mask);
            if (t != none) {
                best_ = s + t;
                best_rows_ = rows_stack_;
                best_cols_ = mask;
            }
            return;
        }
        for (std::size_t a = start; a + remaining <= rows_; ++a) {
            const auto saved = c_;
            flip_row(a);
            rows_stack_.push_back(a);
            combinations(a + 1, remaining - 1, cap);
            rows_stack_.pop_back();
            c_ = saved;
            if (best_ != none && rows_stack_.size() + remaining >= best_) return;
        }
    }

    // Minimum |T| <= limit with sum_{t in T} c_t xi_t = (c . xi - x) / 2.
    std::size_t inner(std::size_t limit, std::uint64_t& mask_out) {
        double value = 0.0;
        std::vector<double> item(cols_);
        for (std::size_t t = 0; t < cols_; ++t) {
            item[t] = c_[t] * e_.at(1, t);
            value += item[t];
        }
        const double target = (value - x_) / 2.0;
        const double tol = tol_ / 2.0;

        auto enumerate = [&](std::size_t begin, std::size_t end) {
            const std::size_t width = end - begin;
            std::vector<HalfSum> out(std::size_t{1} << width);
            out[0] = {0.0, 0, 0};
            for (std::size_t s = 1; s < out.size(); ++s) {
                const auto low = static_cast<std::size_t>(std::countr_zero(s));
                const auto& prev = out[s & (s - 1)];
                out[s] = {prev.sum + item[begin + low], prev.pop + 1, prev.mask | (std::uint64_t{1} << (begin + low))};
            }
            return out;
        };
        const auto left = enumerate(0, half_);
        auto right = enumerate(half_, cols_);
        std::sort(right.begin(), right.end(), [](const HalfSum& a, const HalfSum& b) {
            return a.sum < b.sum || (a.sum == b.sum && a.pop < b.pop);
        });

        std::size_t best = none;
        for (const auto& l : left) {
            if (l.pop > limit) continue;
            const double need = target - l.sum;
            auto it = std::lower_bound(right.begin(), right.end(), need - tol,
                                       [](const HalfSum& h, double v) { return h.sum < v; });
            for (; it != right.end() && it->sum <= need + tol; ++it) {
                const std::size_t total = l.pop + it->pop;
                if (total <= limit && (best == none || total < best)) {
                    best = total;
                    mask_out = l.mask | it->mask;
                }
                if (tol == 0.0) break;  // sorted by pop within equal sums
            }
        }
        return best;
    }

    const CoeffTensor& m_;
    const SignEnsemble& e_;
    double x_;
    double tol_;
    const ResilienceOptions& opts_;
    std::size_t rows_;
    std::size_t cols_;
    std::size_t half_ = 0;
    std::vector<std::vector<std::size_t>> row_entries_;
    std::vector<double> c_;
    std::vector<std::size_t> rows_stack_;
    std::vector<std::size_t> best_rows_;
    std::uint64_t best_cols_ = 0;
    std::size_t best_ = none;
    std::uint64_t outer_sets_ = 0;
};

ResilienceResult meet_in_middle(const CoeffTensor& f, const SignEnsemble& e, double x, double tol,
                                const ResilienceOptions& opts) {
    if (f.degree() != 2) throw DomainError("meet-in-the-middle search requires a degree-2 tensor");
    if (f.dim(1) > opts.max_inner_length || f.dim(1) > 62)
        throw GuardError("meet-in-the-middle inner slot has " + std::to_string(f.dim(1)) +
                         " coordinates, above the limit of " + std::to_string(std::min<std::size_t>(opts.max_inner_length, 62)));
    BilinearSearch search(f, e, x, tol, opts);
    ResilienceResult res;
    res.method = SearchMethod::meet_in_middle;
    const auto r = search.run(opts.max_radius);
    if (r == none) {
        res.outcome = opts.max_radius >= e.total_size() ? ResilienceResult::Outcome::unreachable
                                                        : ResilienceResult::Outcome::beyond_cap;
        return res;
    }
    res.outcome = ResilienceResult::Outcome::found;
    res.value = r;
    res.witness = search.witness();
    return res;
}

}  // namespace

ResilienceResult exact_resilience(const CoeffTensor& f, const SignEnsemble& e, double x,
                                  const ResilienceOptions& opts) {
    require_conforming(f, e);
    if (!std::isfinite(x)) throw DomainError("level x must be finite");
    const double tol = level_tolerance(f, opts);
    auto method = opts.method;
    if (method == SearchMethod::automatic)
        method = f.degree() == 2 ? SearchMethod::meet_in_middle : SearchMethod::exhaustive_bfs;
    return method == SearchMethod::meet_in_middle ? meet_in_middle(f, e, x, tol, opts) : exhaustive(f, e, x, tol, opts);
}

std::vector<ResilienceResult> resilience_samples(const CoeffTensor& f, double x, std::size_t trials,
                                                 std::uint64_t seed, const ResilienceOptions& opts, Exec exec) {
    std::vector<ResilienceResult> out(trials);
    for_each_index(trials, exec, [&](std::size_t t) {
        const auto e = sample_ensemble(f.dims(), mix_seed(seed, t));
        out[t] = exact_resilience(f, e, x, opts);
    });
    return out;
}

EmpiricalCdf resilience_distribution(const CoeffTensor& f, double x, std::size_t r_max, std::size_t trials,
                                     std::uint64_t seed, ResilienceOptions opts, Exec exec) {
    if (trials == 0) throw DomainError("trials must be positive");
    opts.max_radius = std::min(opts.max_radius, r_max);
    const auto samples = resilience_samples(f, x, trials, seed, opts, exec);
    EmpiricalCdf cdf;
    cdf.trials = trials;
    cdf.seed = seed;
    std::vector<std::size_t> count(r_max + 1, 0);
    for (const auto& s : samples)
        if (s.found() && s.value <= r_max) ++count[s.value];
    std::size_t running = 0;
    for (std::size_t r = 0; r <= r_max; ++r) {
        running += count[r];
        const double p = static_cast<double>(running) / static_cast<double>(trials);
        cdf.r.push_back(r);
        cdf.estimate.push_back(p);
        cdf.standard_error.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(trials)));
    }
    return cdf;
}

double levy_concentration(std::span<const double> samples, double eps) {
    if (samples.empty()) throw DomainError("levy_concentration needs at least one sample");
    if (!(eps >= 0.0)) throw DomainError("eps must be nonnegative");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    std::size_t best = 0, hi = 0;
    for (std::size_t lo = 0; lo < s.size(); ++lo) {
        hi = std::max(hi, lo);
        while (hi < s.size() && s[hi] - s[lo] <= 2.0 * eps) ++hi;
        best = std::max(best, hi - lo);
    }
    return static_cast<double>(best) / static_cast<double>(s.size());
}

namespace {

// Largest group of sorted values whose spread is at most tol.
std::size_t modal_count(std::vector<double>& values, double tol) {
    std::sort(values.begin(), values.end());
    std::size_t best = 0, start = 0;
    for (std::size_t k = 1; k <= values.size(); ++k) {
        if (k == values.size() || values[k] - values[start] > tol) {
            best = std::max(best, k - start);
            start = k;
        }
    }
    return best;
}

}  // namespace

AtomEstimate atom_probability(const CoeffTensor& f, AtomMode mode, std::uint64_t budget, std::uint64_t seed,
                              Exec exec, std::size_t max_exact_bits) {
    const double tol = f.has_integer_coefficients() ? 0.0 : 1e-9 * tensor_profile(f).frobenius;
    AtomEstimate out;
    out.mode = mode;
    if (mode == AtomMode::exact) {
        std::size_t bits = 0;
        for (auto n : f.dims()) bits += n;
        if (bits > max_exact_bits)
            throw GuardError("exact atom probability enumerates 2^" + std::to_string(bits) +
                             " ensembles; the limit is 2^" + std::to_string(max_exact_bits));
        auto values = kernels::chaos_cube(f, exec);
        out.samples = values.size();
        out.probability = static_cast<double>(modal_count(values, tol)) / static_cast<double>(values.size());
        return out;
    }
    if (budget == 0) throw DomainError("Monte-Carlo atom estimate needs a positive budget");
    std::vector<double> values(budget);
    for_each_index(budget, exec, [&](std::size_t t) {
        values[t] = evaluate_chaos(f, sample_ensemble(f.dims(), mix_seed(seed, t)));
    });
    out.samples = budget;
    const double p = static_cast<double>(modal_count(values, tol)) / static_cast<double>(budget);
    out.probability = p;
    out.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(budget));
    return out;
}

double delta_exhaustive(const CoeffTensor& f, const SignEnsemble& e, std::span<const std::size_t> budget,
                        std::uint64_t max_evaluations, Exec exec) {
    return kernels::max_flip_delta(f, e, budget, max_evaluations, exec);
}

DecouplingPartition find_decoupling_partition(const CoeffTensor& m, std::uint64_t seed, std::size_t max_tries) {
    require_matrix(m, "find_decoupling_partition");
    const std::size_t n = m.dim(0);
    if (m.dim(1) != n) throw DomainError("decoupling partition requires a square matrix");
    if (n < 2) throw DomainError("decoupling partition requires n >= 2");
    if (m.is_zero()) throw DomainError("decoupling partition requires a nonzero matrix");
    double total = 0.0;
    for (std::size_t e = 0; e < m.nnz(); ++e) {
        const auto idx = m.index(e);
        if (idx[0] == idx[1]) throw DomainError("decoupling partition requires a zero diagonal");
        total += m.value(e) * m.value(e);
    }

    double best_ratio = 0.0;
    std::vector<char> side(n);
    for (std::size_t t = 0; t < max_tries; ++t) {
        Rng rng(seed, t);
        for (auto& s : side) s = rng.bernoulli_half() ? 1 : 0;
        double cross = 0.0;
        for (std::size_t e = 0; e < m.nnz(); ++e) {
            const auto idx = m.index(e);
            if (side[idx[0]] == 1 && side[idx[1]] == 0) cross += m.value(e) * m.value(e);
        }
        const double ratio = cross / total;
        best_ratio = std::max(best_ratio, ratio);
        if (8.0 * cross >= total) {
            DecouplingPartition out;
            for (std::size_t a = 0; a < n; ++a) (side[a] ? out.first : out.second).push_back(a);
            out.tries = t + 1;
            out.ratio = ratio;
            return out;
        }
    }
    throw DomainError("no decoupling partition found in " + std::to_string(max_tries) +
                      " tries (best ratio " + std::to_string(best_ratio) + ")");
}

ConcentrationReport verify_concentration(const CoeffTensor& f, std::size_t slot, std::size_t trials,
                                         std::uint64_t seed, double r, Exec exec) {
    if (slot >= f.degree()) throw DomainError("slot out of range");
    if (trials < 2) throw DomainError("verify_concentration needs at least two trials");
    const double fro = tensor_profile(f).frobenius;

    std::vector<char> small(trials);
    std::vector<double> sup(trials), value(trials), radius(trials);
    const bool bilinear = f.degree() == 2;
    for_each_index(trials, exec, [&](std::size_t t) {
        const auto e = sample_ensemble(f.dims(), mix_seed(seed, t));
        const auto v = chaos_restriction_vector(f, slot, e);
        double sq = 0.0, mx = 0.0;
        for (double x : v) {
            sq += x * x;
            mx = std::max(mx, std::abs(x));
        }
        small[t] = std::sqrt(sq) <= fro / 2.0;
        sup[t] = mx;
        value[t] = evaluate_chaos(f, e);
        radius[t] = flip_radius_multilinear(f, e, r);
    });

    ConcentrationReport rep;
    rep.slot = slot;
    rep.trials = trials;
    rep.r = r;
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(std::count(small.begin(), small.end(), 1)) / nt;
    rep.small_norm_frequency = p;
    rep.small_norm_stderr = std::sqrt(p * (1.0 - p) / nt);

    if (bilinear) {
        rep.has_sup_check = true;
        const double mean = std::accumulate(sup.begin(), sup.end(), 0.0) / nt;
        double var = 0.0;
        for (double s : sup) var += (s - mean) * (s - mean);
        var /= nt - 1.0;
        rep.sup_mean = mean;
        rep.sup_stderr = std::sqrt(var / nt);
        const auto a = slot == 0 ? f : f.transposed();
        const auto prof = matrix_profile(a);
        rep.sup_ceiling = prof.row_sup_l2 * std::sqrt(2.0 * std::log(2.0 * static_cast<double>(prof.rows)));
        rep.sup_pass = rep.sup_mean <= rep.sup_ceiling + 4.0 * rep.sup_stderr;
    }

    rep.mean_flip_radius = std::accumulate(radius.begin(), radius.end(), 0.0) / nt;
    rep.levy_value = levy_concentration(value, rep.mean_flip_radius);
    rep.levy_ratio = fro > 0.0 && rep.mean_flip_radius > 0.0 ? rep.levy_value / (rep.mean_flip_radius / fro) : 0.0;
    return rep;
}

}  // namespace chaosres
