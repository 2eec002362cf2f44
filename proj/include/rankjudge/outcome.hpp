#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rankjudge {

enum class test_method {
    friedman,
    sign_exact,
    sign_normal,
    wilcoxon_exact,
    wilcoxon_normal, // normal approximation with tie and continuity correction
    mean_ranks,
};

// How `reject` was decided.
enum class decision_form {
    p_value,   // reject iff p_value <= alpha_effective
    threshold, // reject iff statistic >= critical_value
};

inline std::string_view to_string(test_method method)
{
    switch (method) {
    case test_method::friedman: return "friedman";
    case test_method::sign_exact: return "sign-exact";
    case test_method::sign_normal: return "sign-normal";
    case test_method::wilcoxon_exact: return "wilcoxon-exact";
    case test_method::wilcoxon_normal: return "wilcoxon-normal";
    case test_method::mean_ranks: return "mean-ranks";
    }
    return "unknown";
}

inline std::string_view to_string(decision_form form)
{
    return form == decision_form::p_value ? "p-value" : "threshold";
}

struct test_outcome {
    test_method method = test_method::friedman;
    decision_form form = decision_form::p_value;
    double statistic = 0.0;
    double p_value = 1.0;
    double alpha_effective = 0.05;
    std::optional<double> critical_value; // set for threshold-form decisions
    bool reject = false;
    std::string detail;
};

} // namespace rankjudge
