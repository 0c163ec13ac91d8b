#pragma once

#include <array>
#include <cstdint>

#include "selfsim/grid.hpp"

namespace selfsim {

/// Diagnostics of the far-field model used beyond y_max.
///
/// Past the last node the integrand is modelled as c0 y^-e + c1 y^-(e+1) + c2 y^-(e+2),
/// interpolating the last node and the nodes one and two octaves further in.
struct TailDiagnostics {
    static constexpr int kTerms = 3;
    std::array<double, kTerms> coeffs{};
    double fit_residual = 0.0;  // relative misfit of the model at a third node
    double decay_ratio = 0.0;   // |f(y_max)| * y_max / max|f|
    bool warning = false;       // set when f does not decay like 1/y
};

/// Fractional Hilbert transform
///   H^(r) f(x) = (1/pi) PV int_0^inf 2r y^(2r-1) f(y) / (x^(2r) - y^(2r)) dy,  r >= 1.
///
/// The integral is evaluated in ln y, where the kernel depends only on ln(y/x): on the
/// log-uniform grid every node sees the same weights. The simple pole at y = x is handled by
/// the alternating-node (odd/even) trapezoid rule, which is spectrally accurate for a
/// principal value on a uniform grid. The grid is extended by two decades at both ends with
/// the jet at 0 on the left and the tail model on the right; beyond that the integrals are
/// summed in closed form from the kernel's geometric series.
///
/// value_at_zero is -(2r/pi) int f(y)/y dy; slope_at_zero is a one-sided fit.
GridFunction apply_fractional_hilbert(const GridFunction& f, double r,
                                      TailDiagnostics* diagnostics = nullptr);

/// (H^(r) f)^{(k)}(x) = (1/pi) PV int 2r x^(2r-k) y^(k-1) f^{(k)}(y) / (x^(2r) - y^(2r)) dy,
/// k = 1, 2. Requires f(0) = 0.
/// H^(r) f at 0 alone, i.e. -(2r/pi) int_0^inf f(y)/y dy. Requires f(0) = 0.
double hilbert_value_at_zero(const GridFunction& f, double r);

GridFunction hilbert_derivative(const GridFunction& f, double r, int k);

struct KernelEval {
    double r = 1.0;
    double t = 0.0;
    double k1 = 0.0;  // 2r t^(2r-1) / (1 - t^(2r))
    double k2 = 0.0;  // 2t / (1 - t^2)
    double k3 = 0.0;  // 2r t / (1 - t^(2r))
    double k4 = 0.0;  // k1 + 2r
    // Literal chain k1 <= k2 <= k3 <= k4 (up to 1e-12 relative slack).
    bool chain_holds = false;
    // Cleared-denominator forms: (r-1)t^2r + 1 >= r t^(2r-2), t^2r + r - 1 >= r t^2,
    // |t - t^(2r-1)| <= |1 - t^2r|.
    bool cleared_forms_hold = false;
    // The verdict used for t in [0,1) is the literal chain, for t > 1 the cleared forms.
    bool ordered() const { return t < 1.0 ? chain_holds : cleared_forms_hold; }
};

/// Throws DomainError at t = 1 and ParameterError for r < 1 or t < 0.
KernelEval kernel_chain(double r, double t);

/// Proof constant of the L^2 bound: ||H^(r)|| <= (1 + 20 sqrt(2) / (3 pi)) r.
double l2_bound_constant();

struct NormEstimate {
    double r = 1.0;
    double estimated_norm = 0.0;
    double bound = 0.0;
    std::size_t probes = 0;
};

/// Smooth decaying probe used by estimate_l2_norm: (a1 y + a3 y^3) exp(-((y - c)/w)^2).
struct HilbertProbe {
    double a1 = 1.0;
    double a3 = 0.0;
    double center = 0.0;
    double width = 1.0;
    double operator()(double y) const;
    GridFunction sample(GridPtr grid) const;
};

HilbertProbe random_probe(std::uint64_t seed, std::size_t index);

/// Largest ||H^(r) f|| / ||f|| (L^2 on the grid) over seeded probes.
NormEstimate estimate_l2_norm(double r, std::size_t probe_count, std::uint64_t seed,
                              GridPtr grid = nullptr);

struct SlopeCheck {
    double measured = 0.0;
    double predicted = 0.0;
};

/// Measured slope at 0 of H^(1/alpha) f versus f'(0) cot(alpha pi / 2). Requires f(0) = 0.
SlopeCheck hilbert_slope_at_zero(const GridFunction& f, double alpha);

/// Deterministic uniform double in [0,1) from a seed and a stream position (splitmix64).
double seeded_uniform(std::uint64_t seed, std::uint64_t position);

}  // namespace selfsim
