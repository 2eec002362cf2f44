#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rankjudge/error.hpp"

namespace rankjudge {

// Standard normal CDF. Evaluated through the complementary error function so
// both tails keep full relative precision; libm erfc is accurate to a few ulp,
// well inside 1e-12 absolute.
inline double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Upper tail 1 - Phi(z) without cancellation.
inline double normal_sf(double z)
{
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

// Inverse of normal_cdf by bisection on the lower tail. The root is bracketed
// in [-40, 0] and refined until the bracket collapses to adjacent doubles, so
// normal_cdf(normal_quantile(p)) reproduces p to the precision of the CDF.
inline double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw domain_error("normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
    }
    if (p == 0.5) {
        return 0.0;
    }
    // 1 - p is exact for p in [0.5, 1), so the upper half maps onto the
    // accurate lower tail.
    const bool upper = p > 0.5;
    const double target = upper ? 1.0 - p : p;

    double lo = -40.0;
    double hi = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        if (normal_cdf(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double root = std::abs(normal_cdf(lo) - target) < std::abs(normal_cdf(hi) - target) ? lo : hi;
    return upper ? -root : root;
}

// Survival function of the chi-square distribution with integer degrees of
// freedom, P(X > x). Integer dof admits finite closed forms:
//   even dof = 2k:    e^{-y} sum_{j<k} y^j / j!
//   odd  dof = 2k+1:  erfc(sqrt y) + e^{-y} sum_{j=1..k} y^{j-1/2} / Gamma(j+1/2)
// with y = x/2. All summands are positive, so there is no cancellation.
inline double chi_square_sf(double x, int dof)
{
    if (dof < 1) {
        throw domain_error("chi_square_sf: dof must be >= 1, got " + std::to_string(dof));
    }
    if (std::isnan(x) || x < 0.0) {
        throw domain_error("chi_square_sf: x must be >= 0");
    }
    if (x == 0.0) {
        return 1.0;
    }
    if (std::isinf(x)) {
        return 0.0;
    }

    const double y = 0.5 * x;
    const int k = dof / 2;
    const bool odd = dof % 2 == 1;

    double result = odd ? std::erfc(std::sqrt(y)) : 0.0;
    const int terms = k;
    if (terms == 0) {
        return result;
    }

    if (y < 700.0) {
        // term recurrence scaled by e^{-y}
        double term = odd ? std::exp(-y) * 2.0 * std::sqrt(y / std::numbers::pi) : std::exp(-y);
        double sum = term;
        for (int j = 1; j < terms; ++j) {
            term *= odd ? y / (j + 0.5) : y / j;
            sum += term;
        }
        result += sum;
    } else {
        // e^{-y} underflows; accumulate each term in log space instead
        const double log_y = std::log(y);
        double sum = 0.0;
        for (int j = 0; j < terms; ++j) {
            const double power = odd ? j + 0.5 : j;
            const double log_gamma = std::lgamma(power + 1.0);
            sum += std::exp(-y + power * log_y - log_gamma);
        }
        result += sum;
    }
    return std::min(1.0, result);
}

// Exact two-sided sign-test p-value for k successes out of n fair trials:
// min(1, 2 * min(P(X <= k), P(X >= k))), X ~ Binomial(n, 1/2). Tail counts are
// accumulated as exact big integers; only the final ratio is rounded.
inline double binomial_two_sided_p(std::uint64_t k, std::uint64_t n)
{
    using boost::multiprecision::cpp_int;
    if (k > n) {
        throw domain_error("binomial_two_sided_p: k > n");
    }
    cpp_int coefficient = 1; // C(n, 0)
    cpp_int lower = 0;
    cpp_int total = 0;
    for (std::uint64_t i = 0; i <= n; ++i) {
        if (i <= k) {
            lower += coefficient;
        }
        total += coefficient;
        coefficient = coefficient * (n - i) / (i + 1);
    }
    // P(X >= k) = P(X <= n-k) by symmetry
    cpp_int upper = 0;
    coefficient = 1;
    for (std::uint64_t i = 0; i <= n - k; ++i) {
        upper += coefficient;
        coefficient = coefficient * (n - i) / (i + 1);
    }
    const cpp_int doubled_tail = 2 * std::min(lower, upper);
    if (doubled_tail >= total) {
        return 1.0;
    }
    // total = 2^n, so scaling by 2^-n is exact
    return std::ldexp(doubled_tail.convert_to<double>(), -static_cast<int>(n));
}

// Largest sample size for which the Wilcoxon signed-rank null distribution is
// tabulated exactly; larger samples use the normal approximation.
inline constexpr std::size_t wilcoxon_exact_max = 30;

// Null distribution of the Wilcoxon signed-rank statistic W+ for n distinct
// ranks 1..n: counts[w] is the number of the 2^n sign patterns whose positive
// ranks sum to w.
struct wilcoxon_null_table {
    std::size_t n = 0;
    std::vector<std::uint64_t> counts;

    std::size_t max_statistic() const noexcept { return n * (n + 1) / 2; }

    std::uint64_t total() const noexcept { return std::uint64_t{1} << n; }

    // Number of patterns with W+ <= w.
    std::uint64_t count_at_most(std::size_t w) const
    {
        std::uint64_t c = 0;
        for (std::size_t v = 0; v <= std::min(w, max_statistic()); ++v) {
            c += counts[v];
        }
        return c;
    }

    // Number of patterns with W+ >= w.
    std::uint64_t count_at_least(std::size_t w) const
    {
        std::uint64_t c = 0;
        for (std::size_t v = w; v <= max_statistic(); ++v) {
            c += counts[v];
        }
        return c;
    }

    double two_sided_p(std::size_t w) const
    {
        const std::uint64_t tail = std::min(count_at_most(w), count_at_least(w));
        if (2 * tail >= total()) {
            return 1.0;
        }
        return std::ldexp(static_cast<double>(2 * tail), -static_cast<int>(n));
    }
};

// Subset-sum recurrence: adding rank r either leaves W+ unchanged or adds r.
inline wilcoxon_null_table make_wilcoxon_null_table(std::size_t n)
{
    if (n < 1) {
        throw domain_error("wilcoxon_null_table: n must be >= 1");
    }
    if (n > wilcoxon_exact_max) {
        throw domain_error("wilcoxon_null_table: n = " + std::to_string(n)
                           + " exceeds the exact threshold "
                           + std::to_string(wilcoxon_exact_max)
                           + "; use the normal approximation");
    }
    wilcoxon_null_table table;
    table.n = n;
    table.counts.assign(n * (n + 1) / 2 + 1, 0);
    table.counts[0] = 1;
    std::size_t reach = 0;
    for (std::size_t r = 1; r <= n; ++r) {
        reach += r;
        for (std::size_t w = reach; w >= r; --w) {
            table.counts[w] += table.counts[w - r];
        }
    }
    return table;
}

// Shared read-only tables for every n <= wilcoxon_exact_max, built once.
inline const wilcoxon_null_table& wilcoxon_null_table_for(std::size_t n)
{
    static const auto tables = [] {
        std::array<wilcoxon_null_table, wilcoxon_exact_max + 1> all{};
        for (std::size_t i = 1; i <= wilcoxon_exact_max; ++i) {
            all[i] = make_wilcoxon_null_table(i);
        }
        return all;
    }();
    if (n < 1 || n > wilcoxon_exact_max) {
        // reuse the validation and message of the builder
        (void)make_wilcoxon_null_table(n);
    }
    return tables[n];
}

} // namespace rankjudge
