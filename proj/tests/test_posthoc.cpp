#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rankjudge/posthoc.hpp"
#include "rankjudge/reproduce.hpp"

using namespace rankjudge;

namespace {

const correction_policy bonferroni05{correction_kind::bonferroni, 0.05, std::nullopt};

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

// Builds a 2 x n matrix whose first row beats the second on `wins` datasets.
performance_matrix wins_matrix(std::size_t wins, std::size_t n)
{
    std::vector<double> a(n, 0.0);
    std::vector<double> b(n, 1.0);
    for (std::size_t k = 0; k < wins; ++k) a[k] = 2.0;
    return performance_matrix::with_default_datasets({"X", "Y"}, {a, b});
}

} // namespace

TEST(MeanRanksStatistic, PublishedMeanRanks)
{
    EXPECT_NEAR(mean_ranks_statistic(2.676, 1.917, 4, 54), 3.06, 0.01);
    EXPECT_NEAR(mean_ranks_statistic(2.713, 2.102, 4, 54), 2.46, 0.01);
    EXPECT_EQ(mean_ranks_statistic(2.5, 2.5, 4, 54), 0.0);
}

TEST(MeanRanksTest, ExampleOneFullPoolRejects)
{
    const auto out = mean_ranks_test(rank_columns(example1_matrix()), {0, 1}, bonferroni05);
    EXPECT_EQ(out.statistic, 1.5);
    ASSERT_TRUE(out.critical_value.has_value());
    EXPECT_NEAR(*out.critical_value, 2.807 * std::sqrt(30.0 / 120.0), 0.0005);
    EXPECT_NEAR(*out.critical_value, 1.40350, 0.0005);
    EXPECT_TRUE(out.reject);
    EXPECT_EQ(out.form, decision_form::threshold);
    EXPECT_DOUBLE_EQ(out.alpha_effective, 0.005);
    EXPECT_NE(out.detail.find("pool_m=5"), std::string::npos);
}

TEST(MeanRanksTest, ExampleOnePairAloneDoesNotReject)
{
    const auto pool = restrict_to(example1_matrix(), std::vector<std::string>{"A", "B"});
    const auto out = mean_ranks_test(rank_columns(pool), {0, 1}, bonferroni05);
    EXPECT_EQ(out.statistic, 0.0);
    EXPECT_FALSE(out.reject);
    EXPECT_DOUBLE_EQ(out.alpha_effective, 0.05); // single comparison
}

TEST(MeanRanksTest, IdenticalRowsNeverReject)
{
    const auto perf = performance_matrix::with_default_datasets(
        {"A", "B", "C"}, {{1, 5, 3, 2}, {1, 5, 3, 2}, {9, 0, 4, 4}});
    const auto out = mean_ranks_test(rank_columns(perf), {0, 1}, bonferroni05);
    EXPECT_EQ(out.statistic, 0.0);
    EXPECT_FALSE(out.reject);
}

TEST(MeanRanksTest, PairOutsidePool)
{
    EXPECT_THROW(mean_ranks_test(rank_columns(example1_matrix()), {0, 7}, bonferroni05), lookup_error);
}

TEST(MeanRanksThreshold, GrowsAsSqrtOfPoolTerm)
{
    for (std::size_t n : {5u, 20u, 54u}) {
        const double ratio = mean_ranks_threshold(5, n, 0.05, 10) / mean_ranks_threshold(2, n, 0.05, 10);
        EXPECT_DOUBLE_EQ(ratio, std::sqrt(5.0));
    }
}

TEST(SignTest, ExampleOneIsPerfectlyBalanced)
{
    const auto out = sign_test(example1_matrix(), {0, 1}, 0.05);
    EXPECT_EQ(out.p_value, 1.0);
    EXPECT_FALSE(out.reject);
    EXPECT_EQ(out.statistic, 10.0);
}

TEST(SignTest, ExactTails)
{
    const auto all = sign_test(wins_matrix(20, 20), {0, 1}, 0.05);
    EXPECT_NEAR(all.p_value, 1.9e-6, 0.01e-6);
    EXPECT_TRUE(all.reject);

    const auto fifteen = sign_test(wins_matrix(15, 20), {0, 1}, 0.05);
    EXPECT_NEAR(fifteen.p_value, 0.0414, 0.0001);
    EXPECT_TRUE(fifteen.reject);
}

TEST(SignTest, ZerosAreDroppedAndAllZeroIsDegenerate)
{
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{0, 2, 3, 4};
    const auto out = sign_test(a, b, 0.05);
    EXPECT_EQ(out.p_value, 1.0); // one informative dataset
    EXPECT_NE(out.detail.find("ties_dropped=3"), std::string::npos);
    EXPECT_THROW(sign_test(a, a, 0.05), degenerate_data_error);
}

TEST(SignTest, NormalApproxUsesMeanRankForm)
{
    // 15 wins of 20: |15-5|/20 = 0.5 >= 1.96 / sqrt(20) = 0.438
    const auto out = sign_test(wins_matrix(15, 20), {0, 1}, 0.05, sign_mode::normal_approx);
    EXPECT_EQ(out.form, decision_form::threshold);
    EXPECT_DOUBLE_EQ(out.statistic, 0.5);
    EXPECT_NEAR(*out.critical_value, 1.959963984540054 / std::sqrt(20.0), 1e-12);
    EXPECT_TRUE(out.reject);
    // 14 of 20: 0.4 < 0.438
    EXPECT_FALSE(sign_test(wins_matrix(14, 20), {0, 1}, 0.05, sign_mode::normal_approx).reject);
}

TEST(Wilcoxon, ExactSmallSamples)
{
    const auto all_positive = wilcoxon_signed_rank(std::vector<double>{1, 2, 3, 4, 5}, zeros(5), 0.05);
    EXPECT_EQ(all_positive.statistic, 15.0);
    EXPECT_EQ(all_positive.p_value, 0.0625);
    EXPECT_EQ(all_positive.method, test_method::wilcoxon_exact);
    EXPECT_FALSE(all_positive.reject);

    const auto mixed = wilcoxon_signed_rank(std::vector<double>{1, -2, 3, -4, 5}, zeros(5), 0.05);
    EXPECT_EQ(mixed.statistic, 9.0);
    EXPECT_EQ(mixed.p_value, 0.8125);
}

TEST(Wilcoxon, AllZeroIsDegenerate)
{
    EXPECT_THROW(wilcoxon_signed_rank(zeros(6), zeros(6), 0.05), degenerate_data_error);
}

TEST(Wilcoxon, NormalBranchMatchesReferenceValues)
{
    // Reference p-values: normal approximation with tie-corrected variance and
    // continuity correction (scipy.stats.wilcoxon, method="approx").
    std::vector<double> big;
    for (int k = 1; k <= 31; ++k) big.push_back(k);
    const auto large = wilcoxon_signed_rank(big, zeros(31), 0.05);
    EXPECT_EQ(large.method, test_method::wilcoxon_normal);
    EXPECT_NEAR(large.p_value, 1.2337131658718577e-06, 1e-10 * 1.2337131658718577e-06);

    const std::vector<double> tied{1, 1, 2, -2, 3, 3, 3, -4, 5, 6, -6, 7};
    const auto with_ties = wilcoxon_signed_rank(tied, zeros(tied.size()), 0.05);
    EXPECT_EQ(with_ties.method, test_method::wilcoxon_normal);
    EXPECT_NE(with_ties.detail.find("ties=yes"), std::string::npos);
    EXPECT_NEAR(with_ties.p_value, 0.1943335702775849, 1e-10);

    std::vector<double> mixed;
    for (int k = 1; k <= 35; ++k) mixed.push_back(k);
    for (int k = 36; k <= 40; ++k) mixed.push_back(-k);
    EXPECT_NEAR(wilcoxon_signed_rank(mixed, zeros(40), 0.05).p_value, 0.003173989659877223, 1e-10);
}

TEST(Wilcoxon, ExampleOneSymmetricDifferences)
{
    const auto out = wilcoxon_signed_rank(example1_matrix(), {0, 1}, 0.05);
    EXPECT_EQ(out.p_value, 1.0);
    EXPECT_EQ(out.statistic, 105.0);
}

TEST(WilcoxonProperty, ExactBranchMatchesSignFlipEnumeration)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 14;
        std::vector<int> ranks(n);
        std::vector<double> d(n);
        for (std::size_t k = 0; k < n; ++k) {
            const int sign = (rng() & 1) ? 1 : -1;
            ranks[k] = sign * static_cast<int>(k + 1);
            d[k] = sign * (static_cast<double>(k + 1) + 0.25); // distinct magnitudes, ranks k+1
        }
        std::shuffle(d.begin(), d.end(), rng); // order must not matter
        const auto out = wilcoxon_signed_rank(d, zeros(n), 0.05);
        EXPECT_EQ(out.method, test_method::wilcoxon_exact);
        EXPECT_NEAR(out.p_value, oracle::wilcoxon_two_sided_by_enumeration(ranks), 1e-15);
    }
}

TEST(PosthocProperty, PValuesSymmetricUnderSwap)
{
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 40;
        const auto perf = oracle::random_matrix(rng, 2, n, trial % 2 ? 4 : 0);
        const auto a = perf.row(0);
        const auto b = perf.row(1);
        try {
            EXPECT_EQ(sign_test(a, b, 0.05).p_value, sign_test(b, a, 0.05).p_value);
            EXPECT_EQ(sign_test(a, b, 0.05, sign_mode::normal_approx).p_value,
                      sign_test(b, a, 0.05, sign_mode::normal_approx).p_value);
            const auto w_ab = wilcoxon_signed_rank(a, b, 0.05);
            const auto w_ba = wilcoxon_signed_rank(b, a, 0.05);
            EXPECT_NEAR(w_ab.p_value, w_ba.p_value, 1e-14);
            // W+ of one orientation is W- of the other
            double nonzero = 0.0;
            for (std::size_t k = 0; k < n; ++k) nonzero += a[k] != b[k] ? 1.0 : 0.0;
            EXPECT_EQ(w_ab.statistic + w_ba.statistic, nonzero * (nonzero + 1.0) / 2.0);
        } catch (const degenerate_data_error&) {
        }
    }
}

TEST(PairwiseReport, ExampleOneWilcoxonBonferroni)
{
    const auto report = pairwise_report(example1_matrix(), posthoc_test::wilcoxon, bonferroni05);
    ASSERT_EQ(report.entries.size(), 10u);
    EXPECT_EQ(report.comparisons, 10u);
    const auto& ab = report.entry(0, 1);
    EXPECT_EQ(ab.p_raw, 1.0);
    EXPECT_FALSE(ab.reject);
    // ordered by pair index
    std::size_t k = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = i + 1; j < 5; ++j, ++k) {
            EXPECT_EQ(report.entries[k].pair.first, i);
            EXPECT_EQ(report.entries[k].pair.second, j);
        }
    }
}

TEST(PairwiseReport, ExampleOneMeanRanksRejectsAB)
{
    const auto report = pairwise_report(example1_matrix(), posthoc_test::mean_ranks, bonferroni05);
    ASSERT_TRUE(report.z_critical.has_value());
    EXPECT_NEAR(*report.z_critical, 2.807, 0.001);
    const auto& ab = report.entry(1, 0);
    EXPECT_TRUE(ab.reject);
    EXPECT_EQ(ab.statistic, 1.5);
}

TEST(PairwiseReport, TwoAlgorithmsMeansOneUncorrectedComparison)
{
    const auto pool = restrict_to(example1_matrix(), std::vector<std::string>{"A", "B"});
    for (auto test : {posthoc_test::sign_exact, posthoc_test::sign_normal, posthoc_test::wilcoxon,
                      posthoc_test::mean_ranks}) {
        const auto report = pairwise_report(pool, test, bonferroni05);
        ASSERT_EQ(report.entries.size(), 1u);
        EXPECT_EQ(report.comparisons, 1u);
        EXPECT_EQ(report.entries[0].p_adjusted, report.entries[0].p_raw);
        EXPECT_FALSE(report.entries[0].reject);
    }
}

TEST(PairwiseReport, DegeneratePairIsUntestableNotFatal)
{
    const auto perf = performance_matrix::with_default_datasets(
        {"A", "B", "C"}, {{1, 2, 3, 4}, {1, 2, 3, 4}, {5, 6, 7, 8}});
    const auto report = pairwise_report(perf, posthoc_test::wilcoxon, bonferroni05);
    ASSERT_EQ(report.entries.size(), 3u);
    EXPECT_FALSE(report.entry(0, 1).testable);
    EXPECT_FALSE(report.entry(0, 1).reject);
    EXPECT_NE(report.entry(0, 1).note.find("untestable"), std::string::npos);
    EXPECT_TRUE(report.entry(0, 2).testable);
}

TEST(PairwiseReport, LowerIsBetterFlipsDirectionalStatisticOnly)
{
    std::mt19937_64 rng(33);
    const auto perf = oracle::random_matrix(rng, 4, 12);
    const auto up = pairwise_report(perf, posthoc_test::sign_exact, bonferroni05);
    const auto down = pairwise_report(perf, posthoc_test::sign_exact, bonferroni05,
                                      rank_direction::lower_is_better);
    for (std::size_t k = 0; k < up.entries.size(); ++k) {
        EXPECT_EQ(up.entries[k].p_raw, down.entries[k].p_raw);
        EXPECT_EQ(up.entries[k].statistic + down.entries[k].statistic, 12.0);
    }
}

TEST(PairwiseReportProperty, CorrectionMonotonicity)
{
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = 3 + rng() % 4;
        const std::size_t n = 8 + rng() % 25;
        auto perf = oracle::random_matrix(rng, m, n);
        // shift rows so some pairs are significant
        auto rows = oracle::rows_of(perf);
        for (std::size_t i = 0; i < m; ++i) {
            for (auto& v : rows[i]) v += 0.4 * static_cast<double>(i);
        }
        perf = performance_matrix::with_default_datasets(perf.algorithms(), rows);
        for (auto test : {posthoc_test::sign_exact, posthoc_test::wilcoxon, posthoc_test::mean_ranks}) {
            const auto bonf = pairwise_report(perf, test, bonferroni05);
            const auto holm = pairwise_report(perf, test, {correction_kind::holm, 0.05, std::nullopt});
            for (std::size_t k = 0; k < bonf.entries.size(); ++k) {
                EXPECT_GE(bonf.entries[k].p_adjusted, bonf.entries[k].p_raw);
                EXPECT_GE(holm.entries[k].p_adjusted, holm.entries[k].p_raw);
                EXPECT_LE(holm.entries[k].p_adjusted, bonf.entries[k].p_adjusted);
                if (bonf.entries[k].reject) {
                    EXPECT_TRUE(holm.entries[k].reject) << to_string(test);
                }
            }
        }
    }
}

TEST(PairwiseReportProperty, PairOnlyTestsIgnoreThePool)
{
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 3 + rng() % 5;
        const std::size_t n = 1 + rng() % 35;
        const auto perf = oracle::random_matrix(rng, m, n, trial % 4 == 0 ? 5 : 0);
        const std::size_t i = rng() % m;
        std::size_t j = rng() % m;
        if (j == i) j = (i + 1) % m;
        const auto pair_pool = restrict_to(perf, std::vector<std::size_t>{std::min(i, j), std::max(i, j)});
        for (auto test : {posthoc_test::sign_exact, posthoc_test::wilcoxon}) {
            const auto full = pairwise_report(perf, test, bonferroni05).entry(i, j);
            const auto alone = pairwise_report(pair_pool, test, bonferroni05).entry(0, 1);
            EXPECT_EQ(full.testable, alone.testable);
            if (!full.testable) continue;
            EXPECT_EQ(full.statistic, alone.statistic);
            EXPECT_EQ(full.p_raw, alone.p_raw);
            // with the family size held fixed the decisions agree too
            const correction_policy fixed{correction_kind::bonferroni, 0.05, std::size_t{10}};
            EXPECT_EQ(pairwise_report(perf, test, fixed).entry(i, j).reject,
                      pairwise_report(pair_pool, test, fixed).entry(0, 1).reject);
        }
    }
}

TEST(Parsing, TestAndCorrectionNames)
{
    EXPECT_EQ(parse_posthoc_test("sign"), posthoc_test::sign_exact);
    EXPECT_EQ(parse_posthoc_test("sign-normal"), posthoc_test::sign_normal);
    EXPECT_EQ(parse_posthoc_test("wilcoxon"), posthoc_test::wilcoxon);
    EXPECT_EQ(parse_posthoc_test("mean-ranks"), posthoc_test::mean_ranks);
    EXPECT_THROW(parse_posthoc_test("t-test"), validation_error);
    EXPECT_EQ(parse_correction("holm"), correction_kind::holm);
    EXPECT_THROW(parse_correction("fdr"), validation_error);
}

TEST(CorrectionPolicy, BonferroniLevelIsAlphaOverMMinusOne)
{
    const correction_policy p{correction_kind::bonferroni, 0.05, std::nullopt};
    EXPECT_EQ(p.comparisons_for(5), 10u);
    // upper quantile level alpha / (2c) = alpha / m(m-1)
    EXPECT_DOUBLE_EQ(p.per_comparison_alpha(5) / 2.0, 0.05 / 20.0);
    const correction_policy none{correction_kind::none, 0.05, std::nullopt};
    EXPECT_EQ(none.comparisons_for(5), 1u);
}
