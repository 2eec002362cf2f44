#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rankjudge/error.hpp"
#include "rankjudge/matrix.hpp"
#include "rankjudge/omnibus.hpp"
#include "rankjudge/posthoc.hpp"
#include "rankjudge/ranking.hpp"

namespace rankjudge {

struct pool_decision {
    std::vector<std::string> members; // the pair first, then the added algorithms
    double statistic = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    std::optional<double> critical_value;
    bool reject = false;
    bool testable = true;
    double friedman_p = 1.0; // advisory; the post-hoc runs regardless
};

struct stability_report {
    algorithm_pair pair;
    std::string first_name;
    std::string second_name;
    posthoc_test test = posthoc_test::mean_ranks;
    correction_policy policy;
    std::size_t pool_cardinality = 2;
    std::size_t pools_evaluated = 0;
    std::size_t pools_significant = 0;
    std::vector<pool_decision> per_pool;
};

// Calls `visit` with every k-subset of {0, ..., n-1} in lexicographic order.
template <typename Visit>
void for_each_combination(std::size_t n, std::size_t k, Visit visit)
{
    if (k > n) {
        return;
    }
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) {
        idx[i] = i;
    }
    while (true) {
        visit(static_cast<const std::vector<std::size_t>&>(idx));
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + pos - 1) {
            --pos;
        }
        if (pos == 0) {
            return;
        }
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

// For every pool {i, j} + S with S a (cardinality-2)-subset of the other
// algorithms, rerank the pool from scratch and rerun the post-hoc on (i, j).
// Unless the policy fixes num_comparisons, each pool is corrected for its own
// cardinality*(cardinality-1)/2 comparisons.
inline stability_report subset_stability(const performance_matrix& perf, algorithm_pair pair,
                                         std::size_t cardinality, posthoc_test test,
                                         const correction_policy& policy,
                                         rank_direction direction = rank_direction::higher_is_better)
{
    const std::size_t m = perf.algorithm_count();
    if (pair.first >= m || pair.second >= m) {
        throw lookup_error("pair index outside the matrix");
    }
    if (pair.first == pair.second) {
        throw validation_error("stability pair must name two distinct algorithms");
    }
    if (cardinality < 2 || cardinality > m) {
        throw validation_error("cardinality must lie in [2, " + std::to_string(m) + "], got "
                               + std::to_string(cardinality));
    }

    stability_report report;
    report.pair = pair;
    report.first_name = perf.algorithms()[pair.first];
    report.second_name = perf.algorithms()[pair.second];
    report.test = test;
    report.policy = policy;
    report.pool_cardinality = cardinality;

    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < m; ++k) {
        if (k != pair.first && k != pair.second) {
            others.push_back(k);
        }
    }

    for_each_combination(others.size(), cardinality - 2, [&](const std::vector<std::size_t>& pick) {
        std::vector<std::size_t> rows{pair.first, pair.second};
        for (auto p : pick) {
            rows.push_back(others[p]);
        }
        const auto pool = restrict_to(perf, rows);
        const auto pool_report = pairwise_report(pool, test, policy, direction);
        const auto& e = pool_report.entry(0, 1);

        pool_decision d;
        d.members = pool.algorithms();
        d.statistic = e.statistic;
        d.p_raw = e.p_raw;
        d.p_adjusted = e.p_adjusted;
        d.critical_value = e.critical_value;
        d.reject = e.reject;
        d.testable = e.testable;
        d.friedman_p = friedman(pool, policy.alpha, direction).p_value;

        ++report.pools_evaluated;
        if (d.reject) {
            ++report.pools_significant;
        }
        report.per_pool.push_back(std::move(d));
    });
    return report;
}

} // namespace rankjudge
