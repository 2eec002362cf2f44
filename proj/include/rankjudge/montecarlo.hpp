#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rankjudge/error.hpp"
#include "rankjudge/matrix.hpp"
#include "rankjudge/posthoc.hpp"
#include "rankjudge/ranking.hpp"

namespace rankjudge {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based generator: the value at any counter depends only on
// (seed, stream, counter), so replicates can be drawn in any order or on any
// thread and still reproduce bit-for-bit.
class counter_rng {
public:
    counter_rng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)))
    {
    }

    std::uint64_t bits(std::uint64_t counter) const noexcept
    {
        return splitmix64(key_ + splitmix64(counter));
    }

    // Uniform on the open interval (0, 1).
    double uniform(std::uint64_t counter) const noexcept
    {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller on counters 2c and 2c+1.
    double normal(std::uint64_t counter) const noexcept
    {
        const double u1 = uniform(2 * counter);
        const double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t key_;
};

struct gaussian_algorithm {
    std::string name;
    double mean = 0.0;
    double sd = 1.0;
};

// Gaussian generative setup for Monte Carlo power and FWER estimation. Each
// replicate draws an independent performance matrix, cell (i, j) from
// N(mean_i, sd_i). Cell values are keyed by (seed, replicate, row, dataset),
// so appending algorithms leaves the existing rows' draws unchanged.
struct power_scenario {
    std::vector<gaussian_algorithm> algorithms;
    std::size_t n_datasets = 20;
    std::pair<std::string, std::string> target_pair;
    posthoc_test test = posthoc_test::sign_exact;
    double alpha = 0.05;
    correction_kind correction = correction_kind::none;
    std::optional<std::size_t> num_comparisons;
    std::size_t replicates = 100'000;
    std::uint64_t seed = 20160101;
    std::vector<std::string> equal_mean; // FWER family; ignored by estimate_power

    correction_policy policy() const { return {correction, alpha, num_comparisons}; }

    std::size_t index_of(const std::string& name) const
    {
        for (std::size_t i = 0; i < algorithms.size(); ++i) {
            if (algorithms[i].name == name) {
                return i;
            }
        }
        throw lookup_error("scenario has no algorithm '" + name + "'");
    }
};

struct power_estimate {
    std::uint64_t rejections = 0;
    std::uint64_t replicates = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;

    static power_estimate from_counts(std::uint64_t rejections, std::uint64_t replicates,
                                      std::uint64_t seed)
    {
        power_estimate e;
        e.rejections = rejections;
        e.replicates = replicates;
        e.seed = seed;
        e.estimate = static_cast<double>(rejections) / static_cast<double>(replicates);
        e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(replicates));
        return e;
    }
};

inline void validate_scenario(const power_scenario& s)
{
    if (s.algorithms.size() < 2) {
        throw validation_error("scenario needs at least 2 algorithms");
    }
    if (s.n_datasets < 1) {
        throw validation_error("scenario needs at least 1 dataset");
    }
    if (s.replicates < 1) {
        throw validation_error("replicates must be >= 1");
    }
    require_alpha(s.alpha);
    std::unordered_set<std::string> names;
    for (const auto& a : s.algorithms) {
        if (!(a.sd > 0.0) || !std::isfinite(a.sd) || !std::isfinite(a.mean)) {
            throw validation_error("algorithm '" + a.name + "' needs finite mean and sd > 0");
        }
        if (!names.insert(a.name).second) {
            throw validation_error("duplicate scenario algorithm '" + a.name + "'");
        }
    }
}

// Draws rows `rows` of replicate `replicate`; returned in the order given.
inline std::vector<std::vector<double>> draw_rows(const power_scenario& s, std::uint64_t replicate,
                                                  const std::vector<std::size_t>& rows)
{
    const counter_rng rng(s.seed, replicate);
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (auto i : rows) {
        std::vector<double> r(s.n_datasets);
        for (std::size_t j = 0; j < s.n_datasets; ++j) {
            const std::uint64_t cell = static_cast<std::uint64_t>(i) * s.n_datasets + j;
            r[j] = s.algorithms[i].mean + s.algorithms[i].sd * rng.normal(cell);
        }
        out.push_back(std::move(r));
    }
    return out;
}

inline performance_matrix draw_matrix(const power_scenario& s, std::uint64_t replicate)
{
    std::vector<std::size_t> all(s.algorithms.size());
    std::vector<std::string> names;
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
        names.push_back(s.algorithms[i].name);
    }
    return performance_matrix::with_default_datasets(std::move(names), draw_rows(s, replicate, all));
}

inline unsigned default_workers()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

// Counts replicates in [0, replicates) for which `rejects(r)` is true, split
// over `workers` threads. The total is an integer sum, so it does not depend
// on the split.
template <typename Predicate>
std::uint64_t count_rejections(std::uint64_t replicates, unsigned workers, Predicate rejects)
{
    workers = std::max(1u, static_cast<unsigned>(std::min<std::uint64_t>(workers, replicates)));
    std::vector<std::uint64_t> partial(workers, 0);
    std::vector<std::exception_ptr> errors(workers);
    auto run = [&](unsigned w) {
        const std::uint64_t begin = replicates * w / workers;
        const std::uint64_t end = replicates * (w + 1) / workers;
        try {
            for (std::uint64_t r = begin; r < end; ++r) {
                partial[w] += rejects(r) ? 1 : 0;
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back(run, w);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    std::uint64_t total = 0;
    for (auto p : partial) {
        total += p;
    }
    return total;
}

// Rejection rate of the configured test on the target pair. Mean-ranks ranks
// the full pool; sign and Wilcoxon only draw the pair's rows. A correction
// policy enters through its per-comparison level (Bonferroni step), with the
// family sized from the full pool unless num_comparisons overrides it.
inline power_estimate estimate_power(const power_scenario& s, unsigned workers = default_workers())
{
    validate_scenario(s);
    const std::size_t i = s.index_of(s.target_pair.first);
    const std::size_t j = s.index_of(s.target_pair.second);
    if (i == j) {
        throw validation_error("target pair must name two distinct algorithms");
    }
    const auto policy = s.policy();
    const std::size_t m = s.algorithms.size();
    const double pair_alpha = policy.per_comparison_alpha(m);

    auto rejects = [&](std::uint64_t replicate) -> bool {
        if (s.test == posthoc_test::mean_ranks) {
            const auto perf = draw_matrix(s, replicate);
            return mean_ranks_test(rank_columns(perf), {i, j}, policy).reject;
        }
        const auto rows = draw_rows(s, replicate, {i, j});
        try {
            switch (s.test) {
            case posthoc_test::sign_exact:
                return sign_test(rows[0], rows[1], pair_alpha, sign_mode::exact).reject;
            case posthoc_test::sign_normal:
                return sign_test(rows[0], rows[1], pair_alpha, sign_mode::normal_approx).reject;
            default:
                return wilcoxon_signed_rank(rows[0], rows[1], pair_alpha).reject;
            }
        } catch (const degenerate_data_error&) {
            return false;
        }
    };
    const auto rejections = count_rejections(s.replicates, workers, rejects);
    return power_estimate::from_counts(rejections, s.replicates, s.seed);
}

// Family-wise Type I error among the algorithms declared in `equal_mean`:
// the fraction of replicates in which the full pairwise report rejects at
// least one pair inside that family.
inline power_estimate estimate_fwer(const power_scenario& s, unsigned workers = default_workers())
{
    validate_scenario(s);
    if (s.equal_mean.size() < 2) {
        throw validation_error("FWER needs at least two algorithms declared equal-mean");
    }
    std::vector<bool> in_family(s.algorithms.size(), false);
    std::optional<double> shared_mean;
    for (const auto& name : s.equal_mean) {
        const std::size_t k = s.index_of(name);
        if (in_family[k]) {
            throw validation_error("duplicate equal-mean algorithm '" + name + "'");
        }
        in_family[k] = true;
        if (shared_mean && *shared_mean != s.algorithms[k].mean) {
            throw validation_error("algorithms declared equal-mean have different means");
        }
        shared_mean = s.algorithms[k].mean;
    }
    const auto policy = s.policy();

    auto rejects = [&](std::uint64_t replicate) -> bool {
        const auto report = pairwise_report(draw_matrix(s, replicate), s.test, policy);
        for (const auto& e : report.entries) {
            if (e.reject && in_family[e.pair.first] && in_family[e.pair.second]) {
                return true;
            }
        }
        return false;
    };
    const auto rejections = count_rejections(s.replicates, workers, rejects);
    return power_estimate::from_counts(rejections, s.replicates, s.seed);
}

} // namespace rankjudge
