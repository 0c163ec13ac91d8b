#pragma once

// Internal engine shared by the fractional Hilbert transform and its derivative identities.

#include <span>
#include <vector>

#include "selfsim/grid.hpp"
#include "selfsim/hilbert.hpp"

namespace selfsim::detail {

// Integrand data: nodal values plus the models used outside [y_min, y_max].
struct PvIntegrand {
    std::span<const double> values;
    double value_at_zero = 0.0;   // left model phi0 + phi1 y + phi2 y^2
    double slope_at_zero = 0.0;
    double curvature_at_zero = 0.0;
    double tail_exponent = 1.0;   // right model sum_k c_k y^-(e+k), k < 3
};

// Kernel family in the ratio t = y/x:
//   result(x) = (1/pi) PV int_0^inf 2r t^q / (1 - t^(2r)) phi(x t) d(ln t).
// q = 2r gives H^(r); q = k with phi = f^(k) gives the k-th derivative identity.
struct PvKernel {
    double r = 1.0;
    double q = 2.0;
};

struct ExtendedIntegrand {
    long pad = 0;                 // extra nodes on each side
    std::vector<double> values;   // indices -pad .. n-1+pad, stored from 0
    TailDiagnostics tail;
};

// Number of extension nodes covering two decades at the grid's log step.
long extension_nodes(const Grid& grid);

ExtendedIntegrand extend(const Grid& grid, const PvIntegrand& phi);

// Annihilates the (-1)^i mode in place with a five-point filter of symbol 1 - w^4/16
// (one-sided weights at the two nodes next to each end).
void remove_odd_even(std::vector<double>& v);

// Odd-offset trapezoid sums; the two interleaved sub-rules differ by their quadrature
// error, which shows up as a (-1)^i component and is filtered out before returning.
std::vector<double> pv_apply(const Grid& grid, const PvKernel& kernel, const ExtendedIntegrand& ext,
                             const PvIntegrand& phi);

// -(2r/pi) int_0^inf phi(y)/y dy, the x -> 0 limit of H^(r) phi. Requires phi(0) = 0.
double hilbert_at_zero(const Grid& grid, double r, const ExtendedIntegrand& ext,
                       const PvIntegrand& phi);

// Least-squares slope at 0 of a function with known value at 0, allowing the
// y^2 log y and y^(2r) terms that a fractional transform produces.
double fit_slope_at_zero(const Grid& grid, std::span<const double> values, double value_at_zero,
                         double r);

// Extrapolated value and slope at 0 (no value known in advance).
std::array<double, 2> fit_jet_at_zero(const Grid& grid, std::span<const double> values);

}  // namespace selfsim::detail
