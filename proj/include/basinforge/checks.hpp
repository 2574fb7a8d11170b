#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace basinforge {

// One verified inequality family. Slack is measured in the log domain where
// the quantity lives; anything >= -1e-9 passes.
struct CheckLine {
    std::string name;
    bool pass = true;
    double min_slack = 1e300;
    long long count = 0;
    std::string detail;

    void fold(double slack) {
        ++count;
        min_slack = std::min(min_slack, slack);
        if (slack < -1e-9) pass = false;
    }
    void fold_abs(double residual, double tol) { fold(tol - residual); }
};

struct CheckReport {
    std::vector<CheckLine> checks;
    bool pass = true;

    void add(CheckLine line) {
        pass = pass && line.pass;
        checks.push_back(std::move(line));
    }
    void merge(const CheckReport& other) {
        for (const auto& c : other.checks) add(c);
    }
    const CheckLine* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

} // namespace basinforge
