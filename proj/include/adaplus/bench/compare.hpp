#ifndef ADAPLUS_BENCH_COMPARE_HPP
#define ADAPLUS_BENCH_COMPARE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "adaplus/bench/record_io.hpp"
#include "adaplus/bench/runner.hpp"

namespace adaplus::bench {

class CompareError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Stat {
    double mean = 0.0;
    double stddev = 0.0; // sample stddev, 0 for a single seed
};

/// Metrics in rows, one column per record; the lowest mean in each row is
/// marked as best.
struct ComparisonTable {
    std::string problem;
    std::uint64_t aligned_step = 0;
    std::vector<std::string> columns;
    std::vector<std::string> row_names;
    std::vector<std::vector<Stat>> cells; // [row][column]
    std::vector<std::size_t> best_column; // per row

    std::string to_markdown() const {
        char buf[96];
        std::string out = "problem: " + (problem.empty() ? std::string("(unspecified)") : problem) +
                          ", aligned at step " + std::to_string(aligned_step) + "\n\n| metric |";
        for (const auto& c : columns) out += " " + c + " |";
        out += "\n|---|";
        for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
        out += "\n";
        for (std::size_t r = 0; r < row_names.size(); ++r) {
            out += "| " + row_names[r] + " |";
            for (std::size_t c = 0; c < columns.size(); ++c) {
                std::snprintf(buf, sizeof buf, "%.6g ± %.2g", cells[r][c].mean, cells[r][c].stddev);
                out += c == best_column[r] ? std::string(" **") + buf + "** |" : std::string(" ") + buf + " |";
            }
            out += "\n";
        }
        return out;
    }
};

namespace detail {

inline Stat mean_stddev(const std::vector<double>& xs) {
    Stat s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return s;
}

} // namespace detail

/// Aligns records on the last step every seed of every record has logged,
/// then reports final and best loss (mean ± stddev over seeds) up to it.
inline ComparisonTable compare(const std::vector<RunRecord>& records) {
    if (records.empty()) throw CompareError("nothing to compare");
    ComparisonTable table;
    for (const auto& r : records) {
        if (r.aborted) throw CompareError("record '" + r.optimizer + "' is from an aborted run");
        if (r.rows.empty()) throw CompareError("record '" + r.optimizer + "' has no rows");
        if (!r.problem.empty()) {
            if (table.problem.empty()) {
                table.problem = r.problem;
            } else if (table.problem != r.problem) {
                throw CompareError("mismatched problems: '" + table.problem + "' vs '" + r.problem + "'");
            }
        }
    }

    // Per record and seed, the rows in step order.
    std::vector<std::map<std::uint64_t, std::vector<const RunRow*>>> by_seed(records.size());
    std::uint64_t aligned = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (const auto& row : records[i].rows) by_seed[i][row.seed].push_back(&row);
        for (const auto& [seed, rows] : by_seed[i]) aligned = std::min(aligned, rows.back()->step);
    }
    table.aligned_step = aligned;

    table.row_names = {"final_loss", "best_loss"};
    table.cells.assign(2, {});
    std::map<std::string, int> seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::string label = records[i].optimizer.empty() ? "run" + std::to_string(i) : records[i].optimizer;
        if (int n = ++seen[label]; n > 1) label += "#" + std::to_string(n);
        table.columns.push_back(label);

        std::vector<double> finals, bests;
        for (const auto& [seed, rows] : by_seed[i]) {
            const RunRow* last = nullptr;
            double best = std::numeric_limits<double>::infinity();
            for (const RunRow* row : rows) {
                if (row->step > aligned) break;
                last = row;
                best = std::min(best, row->loss);
            }
            if (!last) {
                throw CompareError("record '" + label + "' seed " + std::to_string(seed) +
                                   " has no row at or before step " + std::to_string(aligned));
            }
            finals.push_back(last->loss);
            bests.push_back(best);
        }
        table.cells[0].push_back(detail::mean_stddev(finals));
        table.cells[1].push_back(detail::mean_stddev(bests));
    }

    for (const auto& row : table.cells) {
        const auto best = std::min_element(row.begin(), row.end(),
                                           [](const Stat& a, const Stat& b) { return a.mean < b.mean; });
        table.best_column.push_back(static_cast<std::size_t>(best - row.begin()));
    }
    return table;
}

} // namespace adaplus::bench

#endif
