#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace selfsim {

// One named verdict: measured value against an accepted interval [lower, upper].
struct CheckEntry {
    std::string name;
    double measured = 0.0;
    double lower = -INFINITY;
    double upper = INFINITY;
    bool passed = false;
};

struct CheckReport {
    std::string suite;
    std::vector<CheckEntry> entries;

    // Records the verdict lower <= measured <= upper; NaN always fails.
    const CheckEntry& add(std::string name, double measured, double lower, double upper) {
        const bool ok = std::isfinite(measured) && measured >= lower && measured <= upper;
        entries.push_back({std::move(name), measured, lower, upper, ok});
        return entries.back();
    }
    const CheckEntry& add_upper(std::string name, double measured, double upper) {
        return add(std::move(name), measured, -INFINITY, upper);
    }

    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& e : entries) n += e.passed ? 0 : 1;
        return n;
    }
    bool passed() const { return failures() == 0; }
};

}  // namespace selfsim
