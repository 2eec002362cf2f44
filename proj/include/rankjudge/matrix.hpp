#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rankjudge/error.hpp"

namespace rankjudge {

// m algorithms x n datasets of performance scores. Rows are algorithms,
// columns are datasets. Immutable after construction; all invariants are
// checked by the constructor.
class performance_matrix {
public:
    performance_matrix(std::vector<std::string> algorithms,
                       std::vector<std::string> datasets,
                       std::vector<std::vector<double>> rows)
        : algorithms_(std::move(algorithms)), datasets_(std::move(datasets))
    {
        if (algorithms_.size() < 2) {
            throw validation_error("performance matrix needs at least 2 algorithms, got "
                                   + std::to_string(algorithms_.size()));
        }
        if (datasets_.empty()) {
            throw validation_error("performance matrix needs at least 1 dataset");
        }
        if (rows.size() != algorithms_.size()) {
            throw validation_error("expected " + std::to_string(algorithms_.size())
                                   + " rows, got " + std::to_string(rows.size()));
        }
        require_unique(algorithms_, "algorithm");
        require_unique(datasets_, "dataset");

        values_.reserve(algorithms_.size() * datasets_.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != datasets_.size()) {
                throw validation_error("row '" + algorithms_[i] + "' has "
                                       + std::to_string(rows[i].size()) + " entries, expected "
                                       + std::to_string(datasets_.size()));
            }
            for (std::size_t j = 0; j < rows[i].size(); ++j) {
                if (!std::isfinite(rows[i][j])) {
                    throw validation_error("non-finite value at algorithm '" + algorithms_[i]
                                           + "', dataset '" + datasets_[j] + "'");
                }
                values_.push_back(rows[i][j]);
            }
        }
    }

    // Datasets named "1".."n"; convenient for generated matrices.
    static performance_matrix with_default_datasets(std::vector<std::string> algorithms,
                                                    std::vector<std::vector<double>> rows)
    {
        std::vector<std::string> datasets;
        const std::size_t n = rows.empty() ? 0 : rows.front().size();
        for (std::size_t j = 0; j < n; ++j) {
            datasets.push_back(std::to_string(j + 1));
        }
        return {std::move(algorithms), std::move(datasets), std::move(rows)};
    }

    std::size_t algorithm_count() const noexcept { return algorithms_.size(); }
    std::size_t dataset_count() const noexcept { return datasets_.size(); }

    const std::vector<std::string>& algorithms() const noexcept { return algorithms_; }
    const std::vector<std::string>& datasets() const noexcept { return datasets_; }

    double at(std::size_t algorithm, std::size_t dataset) const
    {
        return values_[algorithm * datasets_.size() + dataset];
    }

    std::span<const double> row(std::size_t algorithm) const
    {
        return std::span<const double>(values_).subspan(algorithm * datasets_.size(),
                                                        datasets_.size());
    }

    std::size_t index_of(const std::string& name) const
    {
        for (std::size_t i = 0; i < algorithms_.size(); ++i) {
            if (algorithms_[i] == name) {
                return i;
            }
        }
        throw lookup_error("unknown algorithm '" + name + "'");
    }

    friend bool operator==(const performance_matrix&, const performance_matrix&) = default;

private:
    static void require_unique(const std::vector<std::string>& names, const char* what)
    {
        std::unordered_set<std::string> seen;
        for (const auto& name : names) {
            if (!seen.insert(name).second) {
                throw validation_error(std::string("duplicate ") + what + " name '" + name + "'");
            }
        }
    }

    std::vector<std::string> algorithms_;
    std::vector<std::string> datasets_;
    std::vector<double> values_; // row-major, algorithms x datasets
};

// Pair of algorithm row indices. Order only affects sign conventions of
// directional statistics; every p-value and decision is symmetric.
struct algorithm_pair {
    std::size_t first = 0;
    std::size_t second = 1;

    friend bool operator==(const algorithm_pair&, const algorithm_pair&) = default;
};

inline algorithm_pair resolve_pair(const performance_matrix& perf, const std::string& a,
                                   const std::string& b)
{
    const std::size_t i = perf.index_of(a);
    const std::size_t j = perf.index_of(b);
    if (i == j) {
        throw validation_error("pair must name two distinct algorithms, got '" + a + "' twice");
    }
    return {i, j};
}

} // namespace rankjudge
