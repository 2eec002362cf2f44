#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>

#include "oracles.hpp"
#include "rankjudge/montecarlo.hpp"
#include "rankjudge/reproduce.hpp"

using namespace rankjudge;

TEST(CounterRng, DeterministicAndOpenInterval)
{
    const counter_rng a(42, 7);
    const counter_rng b(42, 7);
    const counter_rng c(42, 8);
    int differ = 0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        EXPECT_EQ(a.bits(k), b.bits(k));
        differ += a.bits(k) != c.bits(k);
        const double u = a.uniform(k);
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
    EXPECT_EQ(differ, 1000);
}

TEST(CounterRng, NormalMoments)
{
    const counter_rng rng(1, 0);
    double sum = 0.0;
    double sum_sq = 0.0;
    const int count = 200'000;
    for (int k = 0; k < count; ++k) {
        const double z = rng.normal(static_cast<std::uint64_t>(k));
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / count;
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_NEAR(sum_sq / count - mean * mean, 1.0, 0.015);
}

TEST(PowerEstimate, StdErrorFormula)
{
    const auto e = power_estimate::from_counts(50, 1000, 3);
    EXPECT_DOUBLE_EQ(e.estimate, 0.05);
    EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(0.05 * 0.95 / 1000.0));
    const auto quadrupled = power_estimate::from_counts(200, 4000, 3);
    EXPECT_DOUBLE_EQ(quadrupled.std_error * 2.0, e.std_error);
}

TEST(EstimatePower, SingleReplicate)
{
    auto s = example2_scenario(posthoc_test::sign_exact, 1, 5);
    const auto e = estimate_power(s, 1);
    EXPECT_TRUE(e.estimate == 0.0 || e.estimate == 1.0);
    EXPECT_EQ(e.std_error, 0.0);
    EXPECT_EQ(e.replicates, 1u);
}

TEST(EstimatePower, IndependentOfWorkerCount)
{
    for (auto test : {posthoc_test::sign_exact, posthoc_test::wilcoxon, posthoc_test::mean_ranks}) {
        const auto s = example2_scenario(test, 5000, 99);
        const auto one = estimate_power(s, 1);
        const auto three = estimate_power(s, 3);
        const auto seven = estimate_power(s, 7);
        EXPECT_EQ(one.rejections, three.rejections);
        EXPECT_EQ(one.rejections, seven.rejections);
    }
    const auto f = all_equal_scenario(posthoc_test::sign_exact, 3000, 4);
    EXPECT_EQ(estimate_fwer(f, 1).rejections, estimate_fwer(f, 4).rejections);
}

TEST(EstimatePower, NullScenarioSizeBoundedByAlpha)
{
    power_scenario s;
    s.algorithms = {{"A", 0.0, 1.0}, {"B", 0.0, 1.0}};
    s.target_pair = {"A", "B"};
    s.test = posthoc_test::sign_exact;
    s.replicates = 40'000;
    s.seed = 17;
    const auto e = estimate_power(s);
    EXPECT_LE(e.estimate, 0.05 + 3.0 * e.std_error);
}

TEST(EstimatePower, SignExactAgreesWithBinomialOracle)
{
    // Each dataset is won by B with probability q = Phi(1.5 / sqrt 2); the
    // exact test rejects on the region where the two-sided binomial p <= alpha.
    const double q = oracle::normal_cdf(1.5 / std::sqrt(2.0));
    double oracle_power = 0.0;
    for (std::uint64_t k = 0; k <= 20; ++k) {
        if (oracle::binomial_two_sided(k, 20) <= 0.05) {
            oracle_power += oracle::binomial_pmf(k, 20, q);
        }
    }
    EXPECT_NEAR(oracle_power, 0.9423417799, 1e-9);
    EXPECT_NEAR(sign_exact_power(20, q, 0.05), oracle_power, 1e-12);

    const auto e = estimate_power(example2_scenario(posthoc_test::sign_exact, 40'000, 123));
    EXPECT_NEAR(e.estimate, oracle_power, 3.0 * e.std_error);
}

TEST(EstimatePower, PairOnlyTestsIgnoreExtraAlgorithms)
{
    for (auto test : {posthoc_test::sign_exact, posthoc_test::sign_normal, posthoc_test::wilcoxon}) {
        auto small = example2_scenario(test, 3000, 8);
        small.algorithms.resize(2);
        const auto full = example2_scenario(test, 3000, 8);
        EXPECT_EQ(estimate_power(small).rejections, estimate_power(full).rejections);
    }
}

TEST(EstimatePower, MeanRanksDependsOnThePool)
{
    auto pair_only = example2_scenario(posthoc_test::mean_ranks, 20'000, 8);
    pair_only.algorithms.resize(2);
    const auto full = example2_scenario(posthoc_test::mean_ranks, 20'000, 8);
    const auto alone = estimate_power(pair_only);
    const auto pooled = estimate_power(full);
    // with m = 2 the mean-ranks threshold coincides with the normal sign test
    const auto sign = estimate_power(example2_scenario(posthoc_test::sign_normal, 20'000, 8));
    EXPECT_EQ(alone.rejections, sign.rejections);
    EXPECT_GT(alone.estimate, 0.9);
    EXPECT_LT(pooled.estimate, 0.1);
}

TEST(EstimatePower, Errors)
{
    auto s = example2_scenario(posthoc_test::sign_exact, 10, 1);
    s.target_pair = {"A", "Z"};
    EXPECT_THROW(estimate_power(s), lookup_error);
    s = example2_scenario(posthoc_test::sign_exact, 10, 1);
    s.algorithms[0].sd = 0.0;
    EXPECT_THROW(estimate_power(s), validation_error);
    s = example2_scenario(posthoc_test::sign_exact, 0, 1);
    EXPECT_THROW(estimate_power(s), validation_error);
}

TEST(EstimateFwer, SignExactBonferroniControlsFamilyError)
{
    const auto e = estimate_fwer(all_equal_scenario(posthoc_test::sign_exact, 20'000, 31));
    EXPECT_LE(e.estimate, 0.05 + 3.0 * e.std_error);
}

TEST(EstimateFwer, SingleReplicateAndValidation)
{
    const auto e = estimate_fwer(max_type1_scenario(posthoc_test::mean_ranks, 1, 2));
    EXPECT_TRUE(e.estimate == 0.0 || e.estimate == 1.0);
    EXPECT_EQ(e.std_error, 0.0);

    auto s = max_type1_scenario(posthoc_test::sign_exact, 10, 2);
    s.equal_mean = {"A"};
    EXPECT_THROW(estimate_fwer(s), validation_error);
    s.equal_mean = {"A", "E"};
    EXPECT_THROW(estimate_fwer(s), validation_error);
    s.equal_mean = {"A", "Q"};
    EXPECT_THROW(estimate_fwer(s), lookup_error);
}
