#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rankjudge/distributions.hpp"
#include "rankjudge/error.hpp"
#include "rankjudge/matrix.hpp"
#include "rankjudge/montecarlo.hpp"
#include "rankjudge/omnibus.hpp"
#include "rankjudge/posthoc.hpp"
#include "rankjudge/ranking.hpp"
#include "rankjudge/report.hpp"

namespace rankjudge {

// Five algorithms on twenty datasets: A and B each win ten datasets by 30
// points, while C, D and E sit between them differently in the two halves.
inline performance_matrix example1_matrix()
{
    auto halves = [](double first, double second) {
        std::vector<double> row(20, first);
        std::fill(row.begin() + 10, row.end(), second);
        return row;
    };
    return performance_matrix::with_default_datasets(
        {"A", "B", "C", "D", "E"},
        {halves(50, 80), halves(80, 50), halves(55, 45), halves(60, 85), halves(65, 90)});
}

// A ~ N(0,1), B ~ N(1.5,1) compared alone, with C, D, E far above them.
inline power_scenario example2_scenario(posthoc_test test, std::size_t replicates,
                                        std::uint64_t seed)
{
    power_scenario s;
    s.algorithms = {{"A", 0.0, 1.0}, {"B", 1.5, 1.0}, {"C", 5.0, 1.0}, {"D", 6.0, 1.0},
                    {"E", 7.0, 1.0}};
    s.n_datasets = 20;
    s.target_pair = {"A", "B"};
    s.test = test;
    s.alpha = 0.05;
    s.correction = correction_kind::none;
    s.replicates = replicates;
    s.seed = seed;
    return s;
}

// Four equivalent algorithms and one clearly better one; the family is the
// four equivalent ones.
inline power_scenario max_type1_scenario(posthoc_test test, std::size_t replicates,
                                         std::uint64_t seed, double outlier_mean = 10.0)
{
    power_scenario s;
    s.algorithms = {{"A", 0.0, 1.0}, {"B", 0.0, 1.0}, {"C", 0.0, 1.0}, {"D", 0.0, 1.0},
                    {"E", outlier_mean, 1.0}};
    s.n_datasets = 20;
    s.target_pair = {"A", "B"};
    s.test = test;
    s.alpha = 0.05;
    s.correction = correction_kind::bonferroni;
    s.replicates = replicates;
    s.seed = seed;
    s.equal_mean = {"A", "B", "C", "D"};
    return s;
}

inline power_scenario all_equal_scenario(posthoc_test test, std::size_t replicates,
                                         std::uint64_t seed)
{
    auto s = max_type1_scenario(test, replicates, seed, 0.0);
    s.equal_mean = {"A", "B", "C", "D", "E"};
    return s;
}

// Power of the exact two-sided sign test when each dataset is won by the
// second algorithm independently with probability q: sum of Binomial(n, q)
// mass over the exact rejection region.
inline double sign_exact_power(std::size_t n, double q, double alpha)
{
    double power = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        if (binomial_two_sided_p(k, n) <= alpha) {
            const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0)
                                   - std::lgamma(static_cast<double>(n - k) + 1.0)
                                   + static_cast<double>(k) * std::log(q)
                                   + static_cast<double>(n - k) * std::log1p(-q);
            power += std::exp(log_pmf);
        }
    }
    return power;
}

struct reproduction_check {
    std::string name;
    double observed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0; // absolute unless `relative`
    bool relative = false;
    bool upper_bound = false; // pass iff observed <= expected + tolerance
    bool informational = false; // logged, no pass/fail
    bool pass = true;
};

struct reproduction {
    std::string id;
    std::string title;
    std::vector<reproduction_check> checks;
    std::vector<std::string> notes;

    void add(std::string name, double observed, double expected, double tolerance,
             bool relative = false)
    {
        reproduction_check c{std::move(name), observed, expected, tolerance, relative};
        const double slack = relative ? tolerance * std::abs(expected) : tolerance;
        c.pass = std::abs(observed - expected) <= slack;
        checks.push_back(std::move(c));
    }

    void add_upper_bound(std::string name, double observed, double bound, double slack)
    {
        reproduction_check c{std::move(name), observed, bound, slack};
        c.upper_bound = true;
        c.pass = observed <= bound + slack;
        checks.push_back(std::move(c));
    }

    void add_info(std::string name, double observed)
    {
        reproduction_check c{std::move(name), observed,
                             std::numeric_limits<double>::quiet_NaN(), 0.0};
        c.informational = true;
        checks.push_back(std::move(c));
    }

    bool all_pass() const
    {
        for (const auto& c : checks) {
            if (!c.pass) {
                return false;
            }
        }
        return true;
    }
};

inline reproduction reproduce_example1()
{
    reproduction r{"1", "Example 1: pool-dependent mean-ranks decision on A vs B", {}, {}};
    const auto perf = example1_matrix();
    const algorithm_pair ab{0, 1};
    const correction_policy bonferroni{correction_kind::bonferroni, 0.05, std::nullopt};

    r.add("sign test p (A,B)", sign_test(perf, ab, 0.05).p_value, 1.0, 0.0);
    r.add("wilcoxon p (A,B)", wilcoxon_signed_rank(perf, ab, 0.05).p_value, 1.0, 0.0);

    const auto omnibus = friedman(perf, 0.05);
    r.add("friedman S", omnibus.statistic, 48.0, 0.0);
    r.add("friedman p", omnibus.p_value, 25.0 * std::exp(-24.0), 1e-12, true);
    r.add_upper_bound("friedman p below 1e-8", omnibus.p_value, 1e-8, 0.0);

    const auto ranks = rank_columns(perf);
    r.add("mean rank A", ranks.mean_ranks[0], 2.0, 0.0);
    r.add("mean rank B", ranks.mean_ranks[1], 3.5, 0.0);

    const auto full = mean_ranks_test(ranks, ab, bonferroni);
    r.add("mean-ranks |diff| (pool ABCDE)", full.statistic, 1.5, 1e-12);
    r.add("mean-ranks threshold (pool ABCDE)", *full.critical_value, 1.40350, 0.0005);
    r.add("mean-ranks reject (pool ABCDE)", full.reject ? 1.0 : 0.0, 1.0, 0.0);

    const auto alone = restrict_to(perf, std::vector<std::string>{"A", "B"});
    const auto pair_only = mean_ranks_test(rank_columns(alone), ab, bonferroni);
    r.add("mean-ranks |diff| (pool AB)", pair_only.statistic, 0.0, 0.0);
    r.add("mean-ranks reject (pool AB)", pair_only.reject ? 1.0 : 0.0, 0.0, 0.0);
    return r;
}

inline reproduction reproduce_example2(std::size_t replicates, std::uint64_t seed,
                                       unsigned workers = default_workers())
{
    reproduction r{"2", "Example 2: power lost to the rest of the pool", {}, {}};
    const auto sign = estimate_power(example2_scenario(posthoc_test::sign_normal, replicates, seed),
                                     workers);
    const auto ranks = estimate_power(example2_scenario(posthoc_test::mean_ranks, replicates, seed),
                                      workers);
    const auto exact = estimate_power(example2_scenario(posthoc_test::sign_exact, replicates, seed),
                                      workers);
    r.add("sign-normal power", sign.estimate, 0.94, 0.01);
    r.add("mean-ranks power", ranks.estimate, 0.046, 0.005);
    const double oracle = sign_exact_power(20, normal_cdf(1.5 / std::sqrt(2.0)), 0.05);
    r.add("sign-exact power vs binomial oracle", exact.estimate, oracle, 3.0 * exact.std_error);
    r.notes.push_back("replicates = " + std::to_string(replicates) + ", seed = "
                      + std::to_string(seed));
    return r;
}

inline reproduction reproduce_max_type1(std::size_t replicates, std::uint64_t seed,
                                        unsigned workers = default_workers())
{
    reproduction r{"4_4", "Maximum Type I error: FWER among equivalent algorithms", {}, {}};
    const auto null_sign = estimate_fwer(all_equal_scenario(posthoc_test::sign_exact, replicates,
                                                            seed),
                                         workers);
    r.add_upper_bound("FWER sign-exact, all equal", null_sign.estimate, 0.05,
                      3.0 * null_sign.std_error);
    for (auto test : {posthoc_test::sign_exact, posthoc_test::wilcoxon, posthoc_test::mean_ranks}) {
        const auto e = estimate_fwer(max_type1_scenario(test, replicates, seed), workers);
        r.add_info("FWER " + std::string(to_string(test)) + ", A-D equal, E ~ N(10,1)", e.estimate);
    }
    for (auto test : {posthoc_test::sign_exact, posthoc_test::mean_ranks}) {
        const auto e = estimate_fwer(all_equal_scenario(test, replicates, seed), workers);
        r.add_info("FWER " + std::string(to_string(test)) + ", all five equal", e.estimate);
    }
    r.notes.push_back("Bonferroni over all 10 pairs, alpha = 0.05, n = 20; replicates = "
                      + std::to_string(replicates) + ", seed = " + std::to_string(seed));
    return r;
}

inline reproduction reproduce_example(std::string_view id, std::size_t replicates,
                                      std::uint64_t seed, unsigned workers = default_workers())
{
    if (id == "1") return reproduce_example1();
    if (id == "2") return reproduce_example2(replicates, seed, workers);
    if (id == "4_4" || id == "4.4") return reproduce_max_type1(replicates, seed, workers);
    throw validation_error("unknown example '" + std::string(id) + "' (expected 1, 2 or 4_4)");
}

inline nlohmann::json to_json(const reproduction& r)
{
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        nlohmann::json j = {{"name", c.name}, {"observed", c.observed}};
        if (c.informational) {
            j["status"] = "info";
        } else {
            j["expected"] = c.expected;
            j["tolerance"] = c.tolerance;
            j["tolerance_kind"] = c.upper_bound ? "upper-bound" : (c.relative ? "relative" : "absolute");
            j["status"] = c.pass ? "pass" : "fail";
        }
        checks.push_back(std::move(j));
    }
    return {{"schema", report_schema}, {"kind", "reproduction"}, {"example", r.id},
            {"title", r.title}, {"checks", checks}, {"notes", r.notes}, {"pass", r.all_pass()}};
}

inline std::string render_text(const reproduction& r)
{
    std::ostringstream out;
    out << r.title << '\n';
    for (const auto& c : r.checks) {
        out << "  " << std::left << std::setw(46) << c.name << " observed "
            << std::setw(14) << std::setprecision(8) << c.observed;
        if (c.informational) {
            out << " (reported)\n";
            continue;
        }
        if (c.upper_bound) {
            out << " bound <= " << std::setprecision(8) << c.expected << " + " << c.tolerance;
        } else {
            out << " expected " << std::setprecision(8) << c.expected << " +/- " << c.tolerance
                << (c.relative ? " (rel)" : "");
        }
        out << (c.pass ? "  PASS" : "  FAIL") << '\n';
    }
    for (const auto& n : r.notes) {
        out << "  " << n << '\n';
    }
    return out.str();
}

} // namespace rankjudge
