#include "chaosres/errors.hpp"
#include "chaosres/kernels.hpp"

#include <algorithm>
#include <unordered_map>

namespace chaosres::kernels {

namespace {

constexpr std::size_t rows_per_chunk = 8;

struct KeyHash {
    std::size_t operator()(const SymDiffKey& k) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto x : k.data) h = (h ^ x) * 0x100000001b3ULL;
        return static_cast<std::size_t>(h);
    }
};

using KeyMap = std::unordered_map<SymDiffKey, double, KeyHash>;

struct Partial {
    KeyMap sums;
    std::vector<std::uint64_t> pair_count;
    std::uint64_t visits = 0;
};

void accumulate_rows(const Matrixisation& a, const std::vector<std::vector<Index>>& tuples, std::size_t row_begin,
                     std::size_t row_end, Partial& out) {
    const std::size_t width = a.col_dims.size();
    out.pair_count.assign(width + 1, 0);
    SymDiffKey key;
    for (std::size_t r = row_begin; r < row_end; ++r) {
        for (std::size_t x = a.row_ptr[r]; x < a.row_ptr[r + 1]; ++x) {
            const auto& tx = tuples[x];
            for (std::size_t y = a.row_ptr[r]; y < a.row_ptr[r + 1]; ++y) {
                ++out.visits;
                if (x == y) continue;
                const auto& ty = tuples[y];
                key.data.clear();
                for (std::size_t q = 0; q < width; ++q) {
                    if (tx[q] == ty[q]) continue;
                    key.data.push_back(static_cast<std::uint32_t>(q));
                    key.data.push_back(std::min(tx[q], ty[q]));
                    key.data.push_back(std::max(tx[q], ty[q]));
                }
                ++out.pair_count[key.size()];
                out.sums[key] += a.val[x] * a.val[y];
            }
        }
    }
}

}  // namespace

SymDiffTable accumulate_symdiff(const Matrixisation& a, std::uint64_t max_pair_visits, Exec exec) {
    std::uint64_t planned = 0;
    for (std::size_t r = 0; r < a.rows; ++r) {
        const std::uint64_t k = a.row_ptr[r + 1] - a.row_ptr[r];
        planned += k * k;
    }
    if (planned > max_pair_visits)
        throw GuardError("symmetric-difference accumulation needs " + std::to_string(planned) +
                         " pair visits, above the limit of " + std::to_string(max_pair_visits));

    std::vector<std::vector<Index>> tuples(a.nnz());
    for (std::size_t e = 0; e < a.nnz(); ++e) tuples[e] = a.column_tuple(a.col_idx[e]);

    const std::size_t chunks = (a.rows + rows_per_chunk - 1) / rows_per_chunk;
    std::vector<Partial> partial(chunks);
    for_each_index(chunks, exec, [&](std::size_t c) {
        const std::size_t b = c * rows_per_chunk;
        accumulate_rows(a, tuples, b, std::min(a.rows, b + rows_per_chunk), partial[c]);
    });

    SymDiffTable table;
    table.pair_count.assign(a.col_dims.size() + 1, 0);
    KeyMap merged;
    for (auto& p : partial) {
        for (auto& [key, sum] : p.sums) merged[key] += sum;
        for (std::size_t m = 0; m < p.pair_count.size(); ++m) table.pair_count[m] += p.pair_count[m];
        table.visits += p.visits;
    }
    table.sums.assign(std::make_move_iterator(merged.begin()), std::make_move_iterator(merged.end()));
    std::sort(table.sums.begin(), table.sums.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    return table;
}

}  // namespace chaosres::kernels
