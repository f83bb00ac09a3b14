#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "driftmon/errors.hpp"
#include "driftmon/stream.hpp"

namespace driftmon {

struct CsvOptions {
    char delimiter = ',';
    bool header = false;
};

// Shortest-round-trip double formatting; keeps output byte-stable.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Prefer the shortest representation that still round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char trial[40];
        std::snprintf(trial, sizeof(trial), "%.*g", prec, v);
        if (std::strtod(trial, nullptr) == v) return trial;
    }
    return buf;
}

// Rows are `d` numeric feature columns followed by one integer label column.
inline void write_stream_csv(std::ostream& os, const std::vector<Instance>& instances,
                             const CsvOptions& opts = {}) {
    if (opts.header && !instances.empty()) {
        const std::size_t d = instances.front().features.size();
        for (std::size_t i = 0; i < d; ++i) os << 'f' << i << opts.delimiter;
        os << "label\n";
    }
    for (const Instance& inst : instances) {
        for (double f : inst.features) os << format_double(f) << opts.delimiter;
        os << inst.label << '\n';
    }
}

inline std::vector<Instance> read_stream_csv(std::istream& is, const CsvOptions& opts = {}) {
    std::vector<Instance> out;
    std::string line;
    long seq = 0;
    bool first = true;
    std::size_t expected_cols = 0;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && opts.header) {
            first = false;
            continue;
        }
        first = false;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, opts.delimiter)) cells.push_back(cell);
        if (cells.size() < 2) throw SchemaError("CSV row needs at least one feature and a label");
        if (expected_cols == 0) {
            expected_cols = cells.size();
        } else if (cells.size() != expected_cols) {
            throw SchemaError("CSV row has " + std::to_string(cells.size()) + " columns, expected " +
                              std::to_string(expected_cols));
        }
        Instance inst;
        inst.features.reserve(cells.size() - 1);
        for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
            std::size_t pos = 0;
            double v = std::stod(cells[i], &pos);
            if (pos != cells[i].size()) throw SchemaError("non-numeric feature cell: " + cells[i]);
            inst.features.push_back(v);
        }
        std::size_t pos = 0;
        inst.label = std::stoi(cells.back(), &pos);
        if (pos != cells.back().size()) throw SchemaError("non-integer label cell: " + cells.back());
        inst.seq = ++seq;
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace driftmon
