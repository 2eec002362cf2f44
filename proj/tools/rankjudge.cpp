// rankjudge: compare algorithms over datasets with rank-based tests.
//
//   rankjudge friedman  results.csv
//   rankjudge posthoc   results.csv --test wilcoxon --correction holm
//   rankjudge posthoc   results.csv --test sign --pair A,B
//   rankjudge stability results.csv --pair A,B --cardinality 3 --test mean-ranks
//   rankjudge power     --config scenario.json
//   rankjudge fwer      --config scenario.json
//   rankjudge reproduce --example 1
//
// Exit status: 0 success, 1 failed reproduction check or internal error,
// 2 usage, 3 parse error, 4 validation error, 5 degenerate data, 6 unknown name.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rankjudge/rankjudge.hpp"

namespace {

using namespace rankjudge;

enum exit_code : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_usage = 2,
    exit_parse = 3,
    exit_validation = 4,
    exit_degenerate = 5,
    exit_lookup = 6,
};

struct options {
    std::string input;
    std::string config;
    double alpha = 0.05;
    std::string test = "wilcoxon";
    std::string correction = "bonferroni";
    std::string direction = "higher";
    std::string orientation = "rows";
    std::vector<std::string> pair;
    std::size_t cardinality = 2;
    std::optional<std::size_t> comparisons;
    std::optional<std::size_t> replicates;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    bool force_posthoc = false;
    std::string format = "text";
    std::string example;
};

rank_direction parse_direction(const std::string& s)
{
    if (s == "higher" || s == "higher-is-better") return rank_direction::higher_is_better;
    if (s == "lower" || s == "lower-is-better") return rank_direction::lower_is_better;
    throw validation_error("unknown direction '" + s + "'");
}

output_format parse_format(const std::string& s)
{
    if (s == "text") return output_format::text;
    if (s == "structured" || s == "json") return output_format::structured;
    throw validation_error("unknown format '" + s + "'");
}

std::optional<std::uint64_t> env_seed()
{
    const char* v = std::getenv("RANKJUDGE_SEED");
    if (v == nullptr || *v == '\0') {
        return std::nullopt;
    }
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw validation_error(std::string("RANKJUDGE_SEED is not an integer: '") + v + "'");
    }
}

std::uint64_t resolve_seed(const options& o, std::uint64_t fallback)
{
    if (o.seed) return *o.seed;
    if (auto s = env_seed()) return *s;
    return fallback;
}

correction_policy make_policy(const options& o)
{
    return {parse_correction(o.correction), o.alpha, o.comparisons};
}

void emit(const nlohmann::json& doc) { std::cout << doc.dump(2) << '\n'; }

int run_friedman(const options& o)
{
    const auto perf = load_csv(o.input, parse_orientation(o.orientation));
    const auto direction = parse_direction(o.direction);
    const auto outcome = friedman(perf, o.alpha, direction);
    if (parse_format(o.format) == output_format::structured) {
        emit({{"schema", report_schema},
              {"kind", "friedman"},
              {"algorithms", perf.algorithms()},
              {"datasets", perf.dataset_count()},
              {"friedman", to_json(outcome)}});
    } else {
        std::cout << render_text(outcome);
    }
    return exit_ok;
}

int run_posthoc(const options& o)
{
    const auto perf = load_csv(o.input, parse_orientation(o.orientation));
    auto analysis = run_analysis(perf, o.alpha, parse_posthoc_test(o.test), make_policy(o),
                                 o.force_posthoc, parse_direction(o.direction));
    // --pair keeps one comparison (corrected over the full family); with nothing
    // else to report, an untestable pair is fatal
    std::string untestable;
    if (!o.pair.empty()) {
        if (o.pair.size() != 2) {
            throw validation_error("--pair needs exactly two algorithm names, e.g. --pair A,B");
        }
        const auto pair = resolve_pair(perf, o.pair[0], o.pair[1]);
        if (analysis.posthoc) {
            const auto kept = analysis.posthoc->entry(pair.first, pair.second);
            analysis.posthoc->entries = {kept};
            if (!kept.testable) untestable = kept.note;
        }
    }
    if (parse_format(o.format) == output_format::structured) {
        emit(to_json(analysis, perf));
    } else {
        std::cout << render_text(analysis, perf);
    }
    if (!untestable.empty()) {
        throw degenerate_data_error(untestable);
    }
    return exit_ok;
}

int run_stability(const options& o)
{
    const auto perf = load_csv(o.input, parse_orientation(o.orientation));
    if (o.pair.size() != 2) {
        throw validation_error("--pair needs exactly two algorithm names, e.g. --pair A,B");
    }
    const auto pair = resolve_pair(perf, o.pair[0], o.pair[1]);
    const auto report = subset_stability(perf, pair, o.cardinality, parse_posthoc_test(o.test),
                                         make_policy(o), parse_direction(o.direction));
    if (parse_format(o.format) == output_format::structured) {
        emit(to_json(report));
    } else {
        std::cout << render_text(report);
    }
    return exit_ok;
}

power_scenario scenario_with_overrides(const options& o, CLI::App& cmd)
{
    auto s = load_scenario(o.config);
    if (o.replicates) s.replicates = *o.replicates;
    s.seed = resolve_seed(o, s.seed);
    if (cmd.count("--alpha")) s.alpha = o.alpha;
    if (cmd.count("--test")) s.test = parse_posthoc_test(o.test);
    if (cmd.count("--correction")) s.correction = parse_correction(o.correction);
    if (o.comparisons) s.num_comparisons = o.comparisons;
    if (o.pair.size() == 2) s.target_pair = {o.pair[0], o.pair[1]};
    return s;
}

int run_power(const options& o, CLI::App& cmd, bool fwer)
{
    const auto s = scenario_with_overrides(o, cmd);
    const unsigned workers = o.workers.value_or(default_workers());
    const auto estimate = fwer ? estimate_fwer(s, workers) : estimate_power(s, workers);
    const std::string_view kind = fwer ? "fwer" : "power";
    if (parse_format(o.format) == output_format::structured) {
        emit(to_json(estimate, s, kind));
    } else {
        std::cout << render_text(estimate, s, fwer ? "FWER" : "Power");
    }
    return exit_ok;
}

int run_reproduce(const options& o)
{
    const auto r = reproduce_example(o.example, o.replicates.value_or(100'000),
                                     resolve_seed(o, 20160101),
                                     o.workers.value_or(default_workers()));
    if (parse_format(o.format) == output_format::structured) {
        emit(to_json(r));
    } else {
        std::cout << render_text(r);
    }
    return r.all_pass() ? exit_ok : exit_failure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rank-based comparison of algorithms over multiple datasets"};
    app.require_subcommand(1);
    options o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--format", o.format, "Output format: text | structured");
    };
    auto add_table = [&](CLI::App* cmd) {
        cmd->add_option("input", o.input, "CSV file of performance scores")->required();
        cmd->add_option("--direction", o.direction, "higher | lower is better");
        cmd->add_option("--orientation", o.orientation,
                        "rows (algorithms in rows) | columns (algorithms in columns)");
    };
    auto add_posthoc = [&](CLI::App* cmd) {
        cmd->add_option("--test", o.test, "sign | sign-normal | wilcoxon | mean-ranks");
        cmd->add_option("--correction", o.correction, "none | bonferroni | holm");
        cmd->add_option("--comparisons", o.comparisons,
                        "Override the number of comparisons used by the correction");
    };
    auto add_mc = [&](CLI::App* cmd) {
        cmd->add_option("--replicates", o.replicates, "Monte Carlo replicates");
        cmd->add_option("--seed", o.seed, "Monte Carlo seed (default: RANKJUDGE_SEED or built-in)");
        cmd->add_option("--workers", o.workers, "Worker threads");
    };

    auto* friedman_cmd = app.add_subcommand("friedman", "Friedman omnibus test");
    add_common(friedman_cmd);
    add_table(friedman_cmd);

    auto* posthoc_cmd = app.add_subcommand("posthoc", "Friedman test followed by pairwise comparisons");
    add_common(posthoc_cmd);
    add_table(posthoc_cmd);
    add_posthoc(posthoc_cmd);
    posthoc_cmd->add_option("--pair", o.pair, "Report only this pair, e.g. A,B")->delimiter(',');
    posthoc_cmd->add_flag("--force-posthoc", o.force_posthoc,
                          "Run pairwise comparisons even if the Friedman test does not reject");

    auto* stability_cmd = app.add_subcommand("stability", "Decision stability of one pair across pools");
    add_common(stability_cmd);
    add_table(stability_cmd);
    add_posthoc(stability_cmd);
    stability_cmd->add_option("--pair", o.pair, "Pair to follow, e.g. A,B")->delimiter(',')->required();
    stability_cmd->add_option("--cardinality", o.cardinality, "Pool size including the pair")->required();

    auto* power_cmd = app.add_subcommand("power", "Monte Carlo power of a pairwise test");
    auto* fwer_cmd = app.add_subcommand("fwer", "Monte Carlo family-wise Type I error");
    for (auto* cmd : {power_cmd, fwer_cmd}) {
        add_common(cmd);
        add_posthoc(cmd);
        add_mc(cmd);
        cmd->add_option("--config", o.config, "Scenario JSON file")->required();
        cmd->add_option("--pair", o.pair, "Target pair, e.g. A,B")->delimiter(',');
    }

    auto* reproduce_cmd = app.add_subcommand("reproduce", "Run a built-in worked example");
    add_common(reproduce_cmd);
    add_mc(reproduce_cmd);
    reproduce_cmd->add_option("--example", o.example, "1 | 2 | 4_4")
        ->required()
        ->check(CLI::IsMember({"1", "2", "4_4"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*friedman_cmd) return run_friedman(o);
        if (*posthoc_cmd) return run_posthoc(o);
        if (*stability_cmd) return run_stability(o);
        if (*power_cmd) return run_power(o, *power_cmd, false);
        if (*fwer_cmd) return run_power(o, *fwer_cmd, true);
        if (*reproduce_cmd) return run_reproduce(o);
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_parse;
    } catch (const degenerate_data_error& e) {
        std::cerr << "degenerate data: " << e.what() << '\n';
        return exit_degenerate;
    } catch (const lookup_error& e) {
        std::cerr << "lookup error: " << e.what() << '\n';
        return exit_lookup;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const domain_error& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}
