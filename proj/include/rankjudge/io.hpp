#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "rankjudge/error.hpp"
#include "rankjudge/matrix.hpp"
#include "rankjudge/montecarlo.hpp"
#include "rankjudge/posthoc.hpp"

namespace rankjudge {

enum class table_orientation {
    algorithms_in_rows,    // header row names datasets, first column names algorithms
    algorithms_in_columns, // header row names algorithms, first column names datasets
};

inline table_orientation parse_orientation(std::string_view name)
{
    if (name == "rows" || name == "algorithms-in-rows") return table_orientation::algorithms_in_rows;
    if (name == "columns" || name == "algorithms-in-columns") return table_orientation::algorithms_in_columns;
    throw validation_error("unknown orientation '" + std::string(name) + "'");
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t column)
{
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (!cell.empty() && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw parse_error("row " + std::to_string(row) + ", column " + std::to_string(column)
                          + ": cannot parse '" + cell + "' as a finite number");
    }
    return value;
}

inline void require_unique_names(const std::vector<std::string>& names, std::string_view where)
{
    std::unordered_set<std::string> seen;
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k].empty()) {
            throw parse_error(std::string(where) + " " + std::to_string(k + 2) + ": empty name");
        }
        if (!seen.insert(names[k]).second) {
            throw parse_error(std::string(where) + " " + std::to_string(k + 2)
                              + ": duplicate name '" + names[k] + "'");
        }
    }
}

} // namespace detail

// Comma-separated table with a header row and a leading name column. Row and
// column numbers in error messages are 1-based and count the header.
inline performance_matrix parse_csv(std::istream& in, table_orientation orientation)
{
    std::vector<std::vector<std::string>> lines;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (detail::trim(line).empty()) {
            continue;
        }
        lines.push_back(detail::split_csv_line(line));
        line_numbers.push_back(number);
    }
    if (lines.size() < 2 || lines.front().size() < 2) {
        throw validation_error("table is empty: need a header row and at least one data row");
    }

    const std::size_t width = lines.front().size();
    std::vector<std::string> header(lines.front().begin() + 1, lines.front().end());
    detail::require_unique_names(header, "column");

    std::vector<std::string> row_names;
    std::vector<std::vector<double>> body;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& cells = lines[r];
        if (cells.size() != width) {
            throw parse_error("row " + std::to_string(line_numbers[r]) + ": expected "
                              + std::to_string(width) + " cells, found "
                              + std::to_string(cells.size()));
        }
        row_names.push_back(cells[0]);
        std::vector<double> values;
        for (std::size_t c = 1; c < width; ++c) {
            values.push_back(detail::parse_cell(cells[c], line_numbers[r], c + 1));
        }
        body.push_back(std::move(values));
    }
    detail::require_unique_names(row_names, "row");

    if (orientation == table_orientation::algorithms_in_rows) {
        return {std::move(row_names), std::move(header), std::move(body)};
    }
    std::vector<std::vector<double>> transposed(header.size(), std::vector<double>(body.size()));
    for (std::size_t r = 0; r < body.size(); ++r) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            transposed[c][r] = body[r][c];
        }
    }
    return {std::move(header), std::move(row_names), std::move(transposed)};
}

inline performance_matrix load_csv(const std::string& path, table_orientation orientation)
{
    std::ifstream in(path);
    if (!in) {
        throw parse_error("cannot open '" + path + "'");
    }
    return parse_csv(in, orientation);
}

inline std::string to_csv(const performance_matrix& perf,
                          table_orientation orientation = table_orientation::algorithms_in_rows)
{
    std::ostringstream out;
    out.precision(17);
    if (orientation == table_orientation::algorithms_in_rows) {
        out << "algorithm";
        for (const auto& d : perf.datasets()) {
            out << ',' << d;
        }
        out << '\n';
        for (std::size_t i = 0; i < perf.algorithm_count(); ++i) {
            out << perf.algorithms()[i];
            for (double v : perf.row(i)) {
                out << ',' << v;
            }
            out << '\n';
        }
    } else {
        out << "dataset";
        for (const auto& a : perf.algorithms()) {
            out << ',' << a;
        }
        out << '\n';
        for (std::size_t j = 0; j < perf.dataset_count(); ++j) {
            out << perf.datasets()[j];
            for (std::size_t i = 0; i < perf.algorithm_count(); ++i) {
                out << ',' << perf.at(i, j);
            }
            out << '\n';
        }
    }
    return out.str();
}

// Scenario configuration (JSON):
//   {
//     "algorithms": [{"name": "A", "mean": 0, "sd": 1}, ...],
//     "datasets": 20,
//     "pair": ["A", "B"],
//     "test": "sign-normal",
//     "alpha": 0.05,
//     "correction": "none",
//     "comparisons": 10,          (optional)
//     "replicates": 100000,
//     "seed": 1,
//     "equal_mean": ["A", "B"]    (FWER only)
//   }
inline power_scenario scenario_from_json(const nlohmann::json& j)
{
    power_scenario s;
    try {
        for (const auto& a : j.at("algorithms")) {
            s.algorithms.push_back({a.at("name").get<std::string>(), a.value("mean", 0.0),
                                    a.value("sd", 1.0)});
        }
        s.n_datasets = j.value("datasets", s.n_datasets);
        if (j.contains("pair")) {
            const auto& p = j.at("pair");
            if (!p.is_array() || p.size() != 2) {
                throw validation_error("scenario 'pair' must list exactly two names");
            }
            s.target_pair = {p[0].get<std::string>(), p[1].get<std::string>()};
        }
        s.test = parse_posthoc_test(j.value("test", std::string("sign")));
        s.alpha = j.value("alpha", s.alpha);
        s.correction = parse_correction(j.value("correction", std::string("none")));
        if (j.contains("comparisons")) {
            s.num_comparisons = j.at("comparisons").get<std::size_t>();
        }
        s.replicates = j.value("replicates", s.replicates);
        s.seed = j.value("seed", s.seed);
        if (j.contains("equal_mean")) {
            s.equal_mean = j.at("equal_mean").get<std::vector<std::string>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("scenario: ") + e.what());
    }
    return s;
}

inline power_scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw parse_error("cannot open '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("scenario '" + path + "': " + e.what());
    }
    return scenario_from_json(j);
}

} // namespace rankjudge
