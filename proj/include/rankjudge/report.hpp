#pragma once

#include <cstddef>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rankjudge/matrix.hpp"
#include "rankjudge/montecarlo.hpp"
#include "rankjudge/omnibus.hpp"
#include "rankjudge/outcome.hpp"
#include "rankjudge/posthoc.hpp"
#include "rankjudge/ranking.hpp"
#include "rankjudge/stability.hpp"

namespace rankjudge {

// Identifies the structured document layout; see docs/report-format.md.
inline constexpr const char* report_schema = "rankjudge.report/1";

inline constexpr const char* mean_ranks_caution =
    "CAUTION: the mean-ranks test compares mean ranks computed over the whole pool, so its "
    "verdict on a pair depends on which other algorithms were included. Prefer the sign or "
    "Wilcoxon signed-rank test.";

enum class output_format { text, structured };

struct analysis_result {
    test_outcome omnibus;
    std::vector<double> mean_ranks;
    std::optional<posthoc_report> posthoc;
    std::string note;
};

// Friedman first; the post-hoc runs only if it rejects or `force_posthoc`.
inline analysis_result run_analysis(const performance_matrix& perf, double omnibus_alpha,
                                    posthoc_test test, const correction_policy& policy,
                                    bool force_posthoc = false,
                                    rank_direction direction = rank_direction::higher_is_better)
{
    analysis_result out;
    out.omnibus = friedman(perf, omnibus_alpha, direction);
    out.mean_ranks = rank_columns(perf, direction).mean_ranks;
    if (out.omnibus.reject || force_posthoc) {
        out.posthoc = pairwise_report(perf, test, policy, direction);
        if (!out.omnibus.reject) {
            out.note = "Friedman test did not reject; post-hoc forced.";
        }
    } else {
        out.note = "Friedman test did not reject at alpha; post-hoc comparisons skipped.";
    }
    return out;
}

// ---------------------------------------------------------------------------
// structured (JSON)
// ---------------------------------------------------------------------------

inline nlohmann::json optional_number(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const test_outcome& o)
{
    return {
        {"method", to_string(o.method)},
        {"decision_form", to_string(o.form)},
        {"statistic", o.statistic},
        {"p_value", o.p_value},
        {"alpha_effective", o.alpha_effective},
        {"critical_value", optional_number(o.critical_value)},
        {"reject", o.reject},
        {"detail", o.detail},
    };
}

inline nlohmann::json to_json(const correction_policy& p, std::size_t m)
{
    return {
        {"kind", to_string(p.kind)},
        {"alpha", p.alpha},
        {"comparisons", p.comparisons_for(m)},
        {"per_comparison_alpha", p.per_comparison_alpha(m)},
    };
}

inline nlohmann::json to_json(const posthoc_report& r)
{
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries) {
        entries.push_back({
            {"first", e.first_name},
            {"second", e.second_name},
            {"testable", e.testable},
            {"method", to_string(e.method)},
            {"statistic", e.statistic},
            {"p_raw", e.p_raw},
            {"p_adjusted", e.p_adjusted},
            {"critical_value", optional_number(e.critical_value)},
            {"reject", e.reject},
            {"note", e.note},
        });
    }
    return {
        {"test", to_string(r.test)},
        {"correction", to_json(r.policy, r.pool_size)},
        {"pool_size", r.pool_size},
        {"datasets", r.dataset_count},
        {"z_critical", optional_number(r.z_critical)},
        {"entries", entries},
    };
}

inline nlohmann::json to_json(const analysis_result& a, const performance_matrix& perf)
{
    nlohmann::json ranks = nlohmann::json::object();
    for (std::size_t i = 0; i < perf.algorithm_count(); ++i) {
        ranks[perf.algorithms()[i]] = a.mean_ranks[i];
    }
    nlohmann::json doc = {
        {"schema", report_schema},
        {"kind", "analysis"},
        {"algorithms", perf.algorithms()},
        {"datasets", perf.dataset_count()},
        {"mean_ranks", ranks},
        {"friedman", to_json(a.omnibus)},
        {"posthoc", a.posthoc ? to_json(*a.posthoc) : nlohmann::json(nullptr)},
        {"note", a.note},
    };
    if (a.posthoc && a.posthoc->test == posthoc_test::mean_ranks) {
        doc["caution"] = mean_ranks_caution;
    }
    return doc;
}

inline nlohmann::json to_json(const stability_report& r)
{
    nlohmann::json pools = nlohmann::json::array();
    for (const auto& p : r.per_pool) {
        pools.push_back({
            {"members", p.members},
            {"statistic", p.statistic},
            {"p_raw", p.p_raw},
            {"p_adjusted", p.p_adjusted},
            {"critical_value", optional_number(p.critical_value)},
            {"reject", p.reject},
            {"testable", p.testable},
            {"friedman_p", p.friedman_p},
        });
    }
    nlohmann::json doc = {
        {"schema", report_schema},
        {"kind", "stability"},
        {"pair", {r.first_name, r.second_name}},
        {"test", to_string(r.test)},
        {"correction", to_json(r.policy, r.pool_cardinality)},
        {"pool_cardinality", r.pool_cardinality},
        {"pools_evaluated", r.pools_evaluated},
        {"pools_significant", r.pools_significant},
        {"pools", pools},
    };
    if (r.test == posthoc_test::mean_ranks) {
        doc["caution"] = mean_ranks_caution;
    }
    return doc;
}

inline nlohmann::json to_json(const power_scenario& s)
{
    nlohmann::json algorithms = nlohmann::json::array();
    for (const auto& a : s.algorithms) {
        algorithms.push_back({{"name", a.name}, {"mean", a.mean}, {"sd", a.sd}});
    }
    nlohmann::json j = {
        {"algorithms", algorithms},
        {"datasets", s.n_datasets},
        {"pair", {s.target_pair.first, s.target_pair.second}},
        {"test", to_string(s.test)},
        {"alpha", s.alpha},
        {"correction", to_string(s.correction)},
        {"replicates", s.replicates},
        {"seed", s.seed},
        {"equal_mean", s.equal_mean},
    };
    if (s.num_comparisons) {
        j["comparisons"] = *s.num_comparisons;
    }
    return j;
}

inline nlohmann::json to_json(const power_estimate& e, const power_scenario& s,
                              std::string_view kind)
{
    return {
        {"schema", report_schema},
        {"kind", kind},
        {"scenario", to_json(s)},
        {"rejections", e.rejections},
        {"replicates", e.replicates},
        {"estimate", e.estimate},
        {"std_error", e.std_error},
        {"seed", e.seed},
    };
}

// ---------------------------------------------------------------------------
// human-readable text
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt(double v, int precision = 6)
{
    std::ostringstream out;
    out << std::setprecision(precision) << v;
    return out.str();
}

} // namespace detail

inline std::string render_text(const test_outcome& o)
{
    std::ostringstream out;
    out << "Friedman test: S = " << detail::fmt(o.statistic) << ", p = " << detail::fmt(o.p_value)
        << " (alpha = " << detail::fmt(o.alpha_effective) << ") -> "
        << (o.reject ? "reject H0" : "do not reject H0") << '\n';
    return out.str();
}

inline std::string render_text(const posthoc_report& r)
{
    std::ostringstream out;
    out << "Post-hoc: " << to_string(r.test) << ", correction " << to_string(r.policy.kind)
        << " (alpha = " << detail::fmt(r.policy.alpha) << ", comparisons = " << r.comparisons
        << ", per-comparison alpha = " << detail::fmt(r.per_comparison_alpha) << ")\n";
    if (r.z_critical) {
        out << "  z* = " << detail::fmt(*r.z_critical) << ", threshold on |mean-rank difference| = "
            << detail::fmt(*r.z_critical * mean_ranks_standard_error(r.pool_size, r.dataset_count))
            << '\n';
    }
    for (const auto& e : r.entries) {
        out << "  " << std::left << std::setw(24) << (e.first_name + " vs " + e.second_name);
        if (!e.testable) {
            out << e.note << '\n';
            continue;
        }
        out << "stat = " << std::setw(10) << detail::fmt(e.statistic)
            << " p_raw = " << std::setw(12) << detail::fmt(e.p_raw)
            << " p_adj = " << std::setw(12) << detail::fmt(e.p_adjusted);
        if (e.critical_value) {
            out << " threshold = " << std::setw(10) << detail::fmt(*e.critical_value);
        }
        out << (e.reject ? " SIGNIFICANT" : " not significant") << '\n';
    }
    if (r.test == posthoc_test::mean_ranks) {
        out << mean_ranks_caution << '\n';
    }
    return out.str();
}

inline std::string render_text(const analysis_result& a, const performance_matrix& perf)
{
    std::ostringstream out;
    out << "Algorithms: " << perf.algorithm_count() << ", datasets: " << perf.dataset_count()
        << '\n';
    out << "Mean ranks:";
    for (std::size_t i = 0; i < perf.algorithm_count(); ++i) {
        out << ' ' << perf.algorithms()[i] << '=' << detail::fmt(a.mean_ranks[i]);
    }
    out << '\n' << render_text(a.omnibus);
    if (a.posthoc) {
        out << render_text(*a.posthoc);
    }
    if (!a.note.empty()) {
        out << a.note << '\n';
    }
    return out.str();
}

inline std::string render_text(const stability_report& r)
{
    std::ostringstream out;
    out << "Subset stability of " << r.first_name << " vs " << r.second_name << " ("
        << to_string(r.test) << ", pools of " << r.pool_cardinality << "): "
        << r.pools_significant << '/' << r.pools_evaluated << " significant\n";
    for (const auto& p : r.per_pool) {
        out << "  {";
        for (std::size_t k = 0; k < p.members.size(); ++k) {
            out << (k ? "," : "") << p.members[k];
        }
        out << "} stat = " << detail::fmt(p.statistic) << " p_raw = " << detail::fmt(p.p_raw);
        if (p.critical_value) {
            out << " threshold = " << detail::fmt(*p.critical_value);
        }
        out << " friedman_p = " << detail::fmt(p.friedman_p)
            << (p.reject ? " SIGNIFICANT" : " not significant") << '\n';
    }
    if (r.test == posthoc_test::mean_ranks) {
        out << mean_ranks_caution << '\n';
    }
    return out.str();
}

inline std::string render_text(const power_estimate& e, const power_scenario& s,
                               std::string_view kind)
{
    std::ostringstream out;
    out << kind << " of " << to_string(s.test) << " (correction " << to_string(s.correction)
        << ", alpha = " << detail::fmt(s.alpha) << ", n = " << s.n_datasets << "): "
        << detail::fmt(e.estimate) << " +/- " << detail::fmt(e.std_error) << " ("
        << e.rejections << '/' << e.replicates << ", seed " << e.seed << ")\n";
    if (s.test == posthoc_test::mean_ranks) {
        out << mean_ranks_caution << '\n';
    }
    return out.str();
}

} // namespace rankjudge
