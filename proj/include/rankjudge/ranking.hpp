#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "rankjudge/error.hpp"
#include "rankjudge/matrix.hpp"

namespace rankjudge {

enum class rank_direction {
    higher_is_better, // largest score in a column gets rank m
    lower_is_better,  // smallest score in a column gets rank m
};

// Column-wise midranks of a performance matrix plus per-algorithm rank sums
// and mean ranks.
struct rank_matrix {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<double> ranks; // row-major, m x n
    std::vector<double> rank_sums;
    std::vector<double> mean_ranks;

    double at(std::size_t algorithm, std::size_t dataset) const
    {
        return ranks[algorithm * n + dataset];
    }
};

// Midranks (1-based) of `values`, ascending: the smallest value gets rank 1
// and ties share the mean of the positions they span.
inline std::vector<double> midranks(std::span<const double> values)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> out(values.size());
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t stop = start + 1;
        while (stop < order.size() && values[order[stop]] == values[order[start]]) {
            ++stop;
        }
        // positions start+1 .. stop share the average rank
        const double rank = 0.5 * static_cast<double>(start + 1 + stop);
        for (std::size_t k = start; k < stop; ++k) {
            out[order[k]] = rank;
        }
        start = stop;
    }
    return out;
}

inline rank_matrix rank_columns(const performance_matrix& perf,
                                rank_direction direction = rank_direction::higher_is_better)
{
    rank_matrix out;
    out.m = perf.algorithm_count();
    out.n = perf.dataset_count();
    out.ranks.assign(out.m * out.n, 0.0);
    out.rank_sums.assign(out.m, 0.0);
    out.mean_ranks.assign(out.m, 0.0);

    const double sign = direction == rank_direction::higher_is_better ? 1.0 : -1.0;
    const double expected_column_sum = static_cast<double>(out.m * (out.m + 1)) / 2.0;

    std::vector<double> column(out.m);
    for (std::size_t j = 0; j < out.n; ++j) {
        for (std::size_t i = 0; i < out.m; ++i) {
            column[i] = sign * perf.at(i, j);
        }
        const auto ranks = midranks(column);
        double column_sum = 0.0;
        for (std::size_t i = 0; i < out.m; ++i) {
            out.ranks[i * out.n + j] = ranks[i];
            out.rank_sums[i] += ranks[i];
            column_sum += ranks[i];
        }
        // Midranks are multiples of 1/2, so this sum is exact in binary floating point.
        if (column_sum != expected_column_sum) {
            throw std::logic_error("rank column " + std::to_string(j) + " does not sum to m(m+1)/2");
        }
    }
    for (std::size_t i = 0; i < out.m; ++i) {
        out.mean_ranks[i] = out.rank_sums[i] / static_cast<double>(out.n);
    }
    return out;
}

// Row subset of `perf` in the order given by `subset`; dataset order is kept.
inline performance_matrix restrict_to(const performance_matrix& perf,
                                      const std::vector<std::string>& subset)
{
    if (subset.size() < 2) {
        throw validation_error("a pool needs at least 2 algorithms, got "
                               + std::to_string(subset.size()));
    }
    std::unordered_set<std::string> seen;
    std::vector<std::vector<double>> rows;
    rows.reserve(subset.size());
    for (const auto& name : subset) {
        if (!seen.insert(name).second) {
            throw validation_error("duplicate algorithm '" + name + "' in subset");
        }
        const auto r = perf.row(perf.index_of(name));
        rows.emplace_back(r.begin(), r.end());
    }
    return {subset, perf.datasets(), std::move(rows)};
}

inline performance_matrix restrict_to(const performance_matrix& perf,
                                      std::span<const std::size_t> rows)
{
    std::vector<std::string> names;
    names.reserve(rows.size());
    for (auto i : rows) {
        if (i >= perf.algorithm_count()) {
            throw lookup_error("algorithm index " + std::to_string(i) + " out of range");
        }
        names.push_back(perf.algorithms()[i]);
    }
    return restrict_to(perf, names);
}

} // namespace rankjudge
