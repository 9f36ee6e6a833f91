#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace maxreg::testing {

struct GoldenRow {
    std::string theta, p, alpha, q, verdict, rule, q_required;
};

inline std::vector<GoldenRow> load_planner_golden(const std::string& path) {
    std::ifstream in(path);
    std::vector<GoldenRow> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.emplace_back();
        if (f.size() != 7) continue;
        rows.push_back({f[0], f[1], f[2], f[3], f[4], f[5], f[6]});
    }
    return rows;
}

}  // namespace maxreg::testing
