#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "selfsim/check.hpp"
#include "selfsim/grid.hpp"

namespace selfsim::cli {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct SuiteResult {
    CheckReport report;
    Table table;
};

// Literal kernel chain at `samples` seeded points (r, t) in [1, 20] x [0, 1).
SuiteResult run_kernel_suite(std::uint64_t seed, std::size_t samples);

// Closed-form match, L2 Rayleigh quotients against the proof constant, and the slope trace.
SuiteResult run_hilbert_suite(std::uint64_t seed, std::size_t grid_n, std::size_t probes);

// Weighted Hardy ratios for the (k, p, gamma) triples used in acceptance.
SuiteResult run_hardy_suite(std::uint64_t seed, std::size_t grid_n, std::size_t count);

// L^-1 L roundtrips on seeded profiles in X, plus the bordered-solve anchor.
SuiteResult run_linop_suite(std::uint64_t seed, std::size_t grid_n, std::size_t count);

// prod_{j=1..k} 1 / (j - 1/p - gamma), the sharp constant for the iterated inequality.
double hardy_constant(const WeightedNormSpec& spec);

}  // namespace selfsim::cli
