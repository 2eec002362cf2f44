#pragma once

#include <cstddef>
#include <sstream>
#include <string>

#include "rankjudge/distributions.hpp"
#include "rankjudge/error.hpp"
#include "rankjudge/matrix.hpp"
#include "rankjudge/outcome.hpp"
#include "rankjudge/ranking.hpp"

namespace rankjudge {

inline void require_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw validation_error("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
}

// Friedman statistic from the m rank sums R_i over n datasets:
//   S = 12 / (n m (m+1)) * sum_i (R_i - n(m+1)/2)^2
// No tie correction is applied to the denominator.
inline double friedman_statistic(const rank_matrix& ranks)
{
    const double m = static_cast<double>(ranks.m);
    const double n = static_cast<double>(ranks.n);
    const double center = n * (m + 1.0) / 2.0;
    double sum_sq = 0.0;
    for (double r : ranks.rank_sums) {
        sum_sq += (r - center) * (r - center);
    }
    return 12.0 * sum_sq / (n * m * (m + 1.0));
}

inline test_outcome friedman(const performance_matrix& perf, double alpha = 0.05,
                             rank_direction direction = rank_direction::higher_is_better)
{
    require_alpha(alpha);
    const auto ranks = rank_columns(perf, direction);

    test_outcome out;
    out.method = test_method::friedman;
    out.form = decision_form::p_value;
    out.statistic = friedman_statistic(ranks);
    out.p_value = chi_square_sf(out.statistic, static_cast<int>(ranks.m) - 1);
    out.alpha_effective = alpha;
    out.reject = out.p_value <= alpha;

    std::ostringstream detail;
    detail.precision(17);
    detail << "m=" << ranks.m << " n=" << ranks.n << " dof=" << ranks.m - 1 << " mean_ranks=";
    for (std::size_t i = 0; i < ranks.m; ++i) {
        detail << (i ? "," : "") << perf.algorithms()[i] << ':' << ranks.mean_ranks[i];
    }
    out.detail = detail.str();
    return out;
}

} // namespace rankjudge
