#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rankjudge/distributions.hpp"
#include "rankjudge/error.hpp"
#include "rankjudge/matrix.hpp"
#include "rankjudge/omnibus.hpp"
#include "rankjudge/outcome.hpp"
#include "rankjudge/ranking.hpp"

namespace rankjudge {

// Pairwise tests available for post-hoc comparison.
enum class posthoc_test {
    sign_exact,
    sign_normal,
    wilcoxon,
    mean_ranks,
};

inline std::string_view to_string(posthoc_test test)
{
    switch (test) {
    case posthoc_test::sign_exact: return "sign";
    case posthoc_test::sign_normal: return "sign-normal";
    case posthoc_test::wilcoxon: return "wilcoxon";
    case posthoc_test::mean_ranks: return "mean-ranks";
    }
    return "unknown";
}

inline posthoc_test parse_posthoc_test(std::string_view name)
{
    if (name == "sign" || name == "sign-exact") return posthoc_test::sign_exact;
    if (name == "sign-normal" || name == "sign-normal-approx") return posthoc_test::sign_normal;
    if (name == "wilcoxon") return posthoc_test::wilcoxon;
    if (name == "mean-ranks") return posthoc_test::mean_ranks;
    throw validation_error("unknown post-hoc test '" + std::string(name) + "'");
}

// True when the test's decision on (i, j) reads only rows i and j.
constexpr bool is_pair_only(posthoc_test test)
{
    return test != posthoc_test::mean_ranks;
}

enum class correction_kind { none, bonferroni, holm };

inline std::string_view to_string(correction_kind kind)
{
    switch (kind) {
    case correction_kind::none: return "none";
    case correction_kind::bonferroni: return "bonferroni";
    case correction_kind::holm: return "holm";
    }
    return "unknown";
}

inline correction_kind parse_correction(std::string_view name)
{
    if (name == "none") return correction_kind::none;
    if (name == "bonferroni") return correction_kind::bonferroni;
    if (name == "holm") return correction_kind::holm;
    throw validation_error("unknown correction '" + std::string(name) + "'");
}

// Family-wise error control. `num_comparisons` overrides the default family
// size m(m-1)/2 of the pool being tested.
struct correction_policy {
    correction_kind kind = correction_kind::bonferroni;
    double alpha = 0.05;
    std::optional<std::size_t> num_comparisons;

    std::size_t comparisons_for(std::size_t m) const
    {
        if (kind == correction_kind::none) {
            return 1;
        }
        return num_comparisons.value_or(m * (m - 1) / 2);
    }

    // Two-sided level used for each single comparison under Bonferroni.
    double per_comparison_alpha(std::size_t m) const
    {
        return alpha / static_cast<double>(comparisons_for(m));
    }
};

// ---------------------------------------------------------------------------
// Mean-ranks test
// ---------------------------------------------------------------------------

inline double mean_ranks_standard_error(std::size_t m, std::size_t n)
{
    const double md = static_cast<double>(m);
    return std::sqrt(md * (md + 1.0) / (6.0 * static_cast<double>(n)));
}

// z = |Rbar_i - Rbar_j| / sqrt(m(m+1) / 6n)
inline double mean_ranks_statistic(double mean_rank_i, double mean_rank_j, std::size_t m,
                                   std::size_t n)
{
    return std::abs(mean_rank_i - mean_rank_j) / mean_ranks_standard_error(m, n);
}

// Upper normal quantile at two-sided level alpha / comparisons.
inline double corrected_z(double alpha, std::size_t comparisons)
{
    return normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(comparisons)));
}

// Critical mean-rank difference z* sqrt(m(m+1) / 6n).
inline double mean_ranks_threshold(std::size_t m, std::size_t n, double alpha,
                                   std::size_t comparisons)
{
    return corrected_z(alpha, comparisons) * mean_ranks_standard_error(m, n);
}

// Threshold-form test on mean ranks of the whole pool in `ranks`. The
// statistic is the absolute mean-rank difference; Holm degenerates to its
// most conservative (Bonferroni) step for a single isolated comparison.
inline test_outcome mean_ranks_test(const rank_matrix& ranks, algorithm_pair pair,
                                    const correction_policy& policy)
{
    if (pair.first >= ranks.m || pair.second >= ranks.m) {
        throw lookup_error("pair index outside the ranked pool");
    }
    if (pair.first == pair.second) {
        throw validation_error("mean_ranks_test needs two distinct algorithms");
    }
    require_alpha(policy.alpha);
    const std::size_t c = policy.comparisons_for(ranks.m);
    const double z_crit = corrected_z(policy.alpha, c);
    const double se = mean_ranks_standard_error(ranks.m, ranks.n);
    const double diff = std::abs(ranks.mean_ranks[pair.first] - ranks.mean_ranks[pair.second]);
    const double z = diff / se;

    test_outcome out;
    out.method = test_method::mean_ranks;
    out.form = decision_form::threshold;
    out.statistic = diff;
    out.critical_value = z_crit * se;
    out.p_value = 2.0 * normal_sf(z);
    out.alpha_effective = policy.alpha / static_cast<double>(c);
    out.reject = diff >= *out.critical_value;

    std::ostringstream detail;
    detail.precision(17);
    detail << "pool_m=" << ranks.m << " n=" << ranks.n << " comparisons=" << c
           << " z=" << z << " z_crit=" << z_crit << " threshold=" << *out.critical_value;
    out.detail = detail.str();
    return out;
}

// ---------------------------------------------------------------------------
// Sign test
// ---------------------------------------------------------------------------

enum class sign_mode { exact, normal_approx };

struct win_counts {
    std::size_t first = 0;  // datasets where the first algorithm scores higher
    std::size_t second = 0; // datasets where the second algorithm scores higher
    std::size_t ties = 0;   // discarded

    std::size_t informative() const noexcept { return first + second; }
};

inline win_counts count_wins(std::span<const double> a, std::span<const double> b)
{
    win_counts w;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) {
            ++w.first;
        } else if (b[k] > a[k]) {
            ++w.second;
        } else {
            ++w.ties;
        }
    }
    return w;
}

// Two-sided sign test on paired scores. Zero differences are dropped.
//   exact:         statistic = wins of the first algorithm, Binomial(n', 1/2) p-value
//   normal_approx: statistic = (wins_1 - wins_2) / sqrt(n'), rejects iff
//                  |wins_1 - wins_2| / n' >= z* sqrt(1/n')
inline test_outcome sign_test(std::span<const double> a, std::span<const double> b, double alpha,
                              sign_mode mode = sign_mode::exact)
{
    require_alpha(alpha);
    if (a.size() != b.size()) {
        throw validation_error("sign_test: rows differ in length");
    }
    const auto wins = count_wins(a, b);
    const std::size_t n = wins.informative();
    if (n == 0) {
        throw degenerate_data_error("sign_test: all paired differences are zero");
    }

    test_outcome out;
    out.alpha_effective = alpha;
    std::ostringstream detail;
    detail.precision(17);
    detail << "wins=" << wins.first << ":" << wins.second << " ties_dropped=" << wins.ties;

    if (mode == sign_mode::exact) {
        out.method = test_method::sign_exact;
        out.form = decision_form::p_value;
        out.statistic = static_cast<double>(wins.first);
        out.p_value = binomial_two_sided_p(wins.first, n);
        out.reject = out.p_value <= alpha;
    } else {
        const double nd = static_cast<double>(n);
        const double diff = static_cast<double>(wins.first) - static_cast<double>(wins.second);
        const double z = diff / std::sqrt(nd);
        const double z_crit = normal_quantile(1.0 - alpha / 2.0);
        out.method = test_method::sign_normal;
        out.form = decision_form::threshold;
        out.statistic = std::abs(diff) / nd; // mean-rank difference with ranks in {1,2}
        out.critical_value = z_crit * std::sqrt(1.0 / nd);
        out.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(z)));
        out.reject = out.statistic >= *out.critical_value;
        detail << " z=" << z << " z_crit=" << z_crit;
    }
    out.detail = detail.str();
    return out;
}

inline test_outcome sign_test(const performance_matrix& perf, algorithm_pair pair, double alpha,
                              sign_mode mode = sign_mode::exact)
{
    return sign_test(perf.row(pair.first), perf.row(pair.second), alpha, mode);
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank test
// ---------------------------------------------------------------------------

// Two-sided Wilcoxon signed-rank test on d = a - b. Zeros are dropped and
// |d| is midranked. Statistic is W+ (rank sum of positive differences).
// Exact null distribution when the effective n <= wilcoxon_exact_max and |d|
// has no ties; otherwise normal approximation with tie-corrected variance and
// continuity correction.
inline test_outcome wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                         double alpha)
{
    require_alpha(alpha);
    if (a.size() != b.size()) {
        throw validation_error("wilcoxon_signed_rank: rows differ in length");
    }
    std::vector<double> diffs;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        if (d != 0.0) {
            diffs.push_back(d);
        }
    }
    if (diffs.empty()) {
        throw degenerate_data_error("wilcoxon_signed_rank: all paired differences are zero");
    }
    const std::size_t n = diffs.size();
    std::vector<double> magnitudes(n);
    std::transform(diffs.begin(), diffs.end(), magnitudes.begin(),
                   [](double d) { return std::abs(d); });
    const auto ranks = midranks(magnitudes);

    double w_plus = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (diffs[k] > 0.0) {
            w_plus += ranks[k];
        }
    }

    // tie groups among |d|: sum of t^3 - t
    std::vector<double> sorted = magnitudes;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    bool has_ties = false;
    for (std::size_t start = 0; start < n;) {
        std::size_t stop = start + 1;
        while (stop < n && sorted[stop] == sorted[start]) {
            ++stop;
        }
        const double t = static_cast<double>(stop - start);
        if (stop - start > 1) {
            has_ties = true;
            tie_term += t * t * t - t;
        }
        start = stop;
    }

    test_outcome out;
    out.form = decision_form::p_value;
    out.statistic = w_plus;
    out.alpha_effective = alpha;
    std::ostringstream detail;
    detail.precision(17);
    detail << "n_effective=" << n << " zeros_dropped=" << a.size() - n;

    if (n <= wilcoxon_exact_max && !has_ties) {
        out.method = test_method::wilcoxon_exact;
        const auto& table = wilcoxon_null_table_for(n);
        out.p_value = table.two_sided_p(static_cast<std::size_t>(std::llround(w_plus)));
        detail << " branch=exact";
    } else {
        out.method = test_method::wilcoxon_normal;
        const double nd = static_cast<double>(n);
        const double mean = nd * (nd + 1.0) / 4.0;
        const double variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
        const double z = std::max(0.0, std::abs(w_plus - mean) - 0.5) / std::sqrt(variance);
        out.p_value = std::min(1.0, 2.0 * normal_sf(z));
        detail << " branch=normal z=" << z << (has_ties ? " ties=yes" : " ties=no");
    }
    out.reject = out.p_value <= alpha;
    out.detail = detail.str();
    return out;
}

inline test_outcome wilcoxon_signed_rank(const performance_matrix& perf, algorithm_pair pair,
                                         double alpha)
{
    return wilcoxon_signed_rank(perf.row(pair.first), perf.row(pair.second), alpha);
}

// ---------------------------------------------------------------------------
// Pairwise report
// ---------------------------------------------------------------------------

struct posthoc_entry {
    algorithm_pair pair;
    std::string first_name;
    std::string second_name;
    bool testable = true;
    test_method method = test_method::sign_exact;
    double statistic = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    std::optional<double> critical_value; // threshold-form decisions only
    bool reject = false;
    std::string note;
};

struct posthoc_report {
    posthoc_test test = posthoc_test::wilcoxon;
    correction_policy policy;
    std::size_t pool_size = 0;
    std::size_t dataset_count = 0;
    std::size_t comparisons = 1;
    double per_comparison_alpha = 0.05;
    std::optional<double> z_critical; // mean-ranks only
    std::vector<posthoc_entry> entries; // ordered by (first, second), first < second

    const posthoc_entry& entry(std::size_t i, std::size_t j) const
    {
        const std::size_t a = std::min(i, j);
        const std::size_t b = std::max(i, j);
        for (const auto& e : entries) {
            if (e.pair.first == a && e.pair.second == b) {
                return e;
            }
        }
        throw lookup_error("no report entry for the requested pair");
    }
};

// Holm step-down adjusted p-values over `p` (in place), family size c >= p.size().
inline void holm_adjust(std::vector<double>& p, std::size_t c)
{
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
    double running = 0.0;
    std::vector<double> adjusted(p.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const double factor = static_cast<double>(c - rank);
        running = std::max(running, std::min(1.0, factor * p[order[rank]]));
        adjusted[order[rank]] = running;
    }
    p = std::move(adjusted);
}

inline test_outcome run_pair_test(const performance_matrix& perf, algorithm_pair pair,
                                  posthoc_test test, double alpha)
{
    switch (test) {
    case posthoc_test::sign_exact: return sign_test(perf, pair, alpha, sign_mode::exact);
    case posthoc_test::sign_normal: return sign_test(perf, pair, alpha, sign_mode::normal_approx);
    case posthoc_test::wilcoxon: return wilcoxon_signed_rank(perf, pair, alpha);
    case posthoc_test::mean_ranks: break;
    }
    throw validation_error("run_pair_test: mean-ranks needs the ranked pool");
}

// All m(m-1)/2 pairwise comparisons under one test and correction policy.
// p-value tests: p_adjusted is Bonferroni min(1, c p) or Holm step-down,
// reject iff p_adjusted <= alpha. Mean-ranks under none/Bonferroni uses the
// threshold form with the corrected z*; under Holm its normal p-values are
// stepped down like any other. Degenerate pairs are reported untestable.
inline posthoc_report pairwise_report(const performance_matrix& perf, posthoc_test test,
                                      const correction_policy& policy,
                                      rank_direction direction = rank_direction::higher_is_better)
{
    require_alpha(policy.alpha);
    const std::size_t m = perf.algorithm_count();

    posthoc_report report;
    report.test = test;
    report.policy = policy;
    report.pool_size = m;
    report.dataset_count = perf.dataset_count();
    report.comparisons = policy.comparisons_for(m);
    report.per_comparison_alpha = policy.alpha / static_cast<double>(report.comparisons);

    std::optional<rank_matrix> ranks;
    if (test == posthoc_test::mean_ranks) {
        ranks = rank_columns(perf, direction);
        report.z_critical = corrected_z(policy.alpha, report.comparisons);
    }

    // Pair-only tests need a direction-aware view of the rows: flipping the
    // sign makes "higher is better" hold for both sign and Wilcoxon.
    const double sign = direction == rank_direction::higher_is_better ? 1.0 : -1.0;
    auto oriented = [&](std::size_t i) {
        std::vector<double> r(perf.row(i).begin(), perf.row(i).end());
        for (auto& v : r) {
            v *= sign;
        }
        return r;
    };

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            posthoc_entry e;
            e.pair = {i, j};
            e.first_name = perf.algorithms()[i];
            e.second_name = perf.algorithms()[j];
            try {
                test_outcome o;
                if (test == posthoc_test::mean_ranks) {
                    o = mean_ranks_test(*ranks, e.pair, policy);
                    e.critical_value = o.critical_value;
                } else {
                    const auto a = oriented(i);
                    const auto b = oriented(j);
                    switch (test) {
                    case posthoc_test::sign_exact:
                        o = sign_test(a, b, policy.alpha, sign_mode::exact);
                        break;
                    case posthoc_test::sign_normal:
                        o = sign_test(a, b, policy.alpha, sign_mode::normal_approx);
                        break;
                    default:
                        o = wilcoxon_signed_rank(a, b, policy.alpha);
                        break;
                    }
                }
                e.method = o.method;
                e.statistic = o.statistic;
                e.p_raw = o.p_value;
                e.note = o.detail;
                if (test == posthoc_test::mean_ranks) {
                    // threshold decision already carries the correction
                    e.reject = o.reject;
                }
            } catch (const degenerate_data_error& err) {
                e.testable = false;
                e.reject = false;
                e.note = std::string("untestable: ") + err.what();
            }
            report.entries.push_back(std::move(e));
        }
    }

    const bool threshold_form = test == posthoc_test::mean_ranks
                                && policy.kind != correction_kind::holm;
    const double c = static_cast<double>(report.comparisons);

    if (policy.kind == correction_kind::holm) {
        std::vector<double> p;
        std::vector<std::size_t> index;
        for (std::size_t k = 0; k < report.entries.size(); ++k) {
            if (report.entries[k].testable) {
                p.push_back(report.entries[k].p_raw);
                index.push_back(k);
            }
        }
        holm_adjust(p, std::max(report.comparisons, p.size()));
        for (std::size_t k = 0; k < index.size(); ++k) {
            auto& e = report.entries[index[k]];
            e.p_adjusted = p[k];
            e.reject = e.p_adjusted <= policy.alpha;
            e.critical_value.reset();
        }
    } else {
        for (auto& e : report.entries) {
            if (!e.testable) {
                continue;
            }
            e.p_adjusted = policy.kind == correction_kind::bonferroni
                               ? std::min(1.0, c * e.p_raw)
                               : e.p_raw;
            if (!threshold_form) {
                e.reject = e.p_adjusted <= policy.alpha;
            }
        }
    }
    return report;
}

} // namespace rankjudge
