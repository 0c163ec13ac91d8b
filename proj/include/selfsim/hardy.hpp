#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/grid.hpp"

namespace selfsim {

// If(x) = int_0^x (f(y) - f(0) - y f'(0)) / y^2 dy.
GridFunction apply_I(const GridFunction& f);

// Values below y = 0.01 replaced by a polynomial fitted on [0.01, 0.05]; keeps repeated
// differentiation from amplifying rounding noise at the smallest nodes.
GridFunction smooth_near_origin(const GridFunction& f);

// The integrand of apply_I, i.e. (If)'.
GridFunction subtracted_quotient(const GridFunction& f);

struct HardyReport {
    WeightedNormSpec spec;
    double ratio = 0.0;
    std::string function_id;
    bool degenerate = false;  // both sides vanish; ratio is meaningless
};

// ||y^(gamma-k) f||_p / ||y^gamma f^(k)||_p. f and its first k-1 derivatives must vanish
// at 0 and gamma < (p-1)/p; otherwise PreconditionError.
HardyReport hardy_ratio(const GridFunction& f, const WeightedNormSpec& spec,
                        std::string function_id = "f");

// ||(If)'||_{W^{k,p}} / ||f''||_{W^{k,p}} and ||y If/(1+y^2)||_{W^{k,p}} / ||f'||_{W^{max(k-1,1),p}}.
std::pair<HardyReport, HardyReport> check_I_bounds(const GridFunction& f, int k, double p,
                                                   std::string function_id = "f");

// Seeded member of the admissible family y^k (b0 + b1 y + b2 y^2) exp(-(y/w)^2).
struct HardyProbe {
    std::size_t index = 0;
    int order = 1;
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double width = 1.0;
    double operator()(double y) const;
    GridFunction sample(GridPtr grid) const;
    std::string id() const;
};

HardyProbe hardy_probe(std::uint64_t seed, std::size_t index, int order);

// Ratios for `count` seeded probes vanishing to order spec.k at 0.
std::vector<HardyReport> hardy_suite(const WeightedNormSpec& spec, std::size_t count,
                                     std::uint64_t seed, GridPtr grid);

}  // namespace selfsim
