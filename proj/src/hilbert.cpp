#include "selfsim/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pv_quadrature.hpp"
#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

void require_r(double r) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw ParameterError("fractional Hilbert transform needs r >= 1");
}

}  // namespace

GridFunction apply_fractional_hilbert(const GridFunction& f, double r, TailDiagnostics* diagnostics) {
    require_r(r);
    if (!f.all_finite()) throw NumericalError("apply_fractional_hilbert: non-finite input");
    const Grid& grid = f.grid();

    detail::PvIntegrand phi{f.values(), f.value_at_zero(), f.slope_at_zero(), fit_taylor_at_zero(f)[0], 1.0};
    const auto ext = detail::extend(grid, phi);
    auto values = detail::pv_apply(grid, {r, 2.0 * r}, ext, phi);
    if (diagnostics) *diagnostics = ext.tail;

    const double scale = std::max(f.max_abs(), 1e-300);
    double at_zero;
    double slope;
    if (std::abs(f.value_at_zero()) <= 1e-10 * scale) {
        detail::PvIntegrand centred = phi;
        centred.value_at_zero = 0.0;
        at_zero = detail::hilbert_at_zero(grid, r, ext, centred);
        slope = detail::fit_slope_at_zero(grid, values, at_zero, r);
    } else {
        // A jump of the odd extension makes the transform log-singular at 0; report the
        // first node and flag it.
        at_zero = values.front();
        slope = 0.0;
        if (diagnostics) diagnostics->warning = true;
    }
    return GridFunction(f.grid_ptr(), std::move(values), at_zero, slope);
}

double hilbert_value_at_zero(const GridFunction& f, double r) {
    require_r(r);
    if (std::abs(f.value_at_zero()) > 1e-10 * std::max(f.max_abs(), 1e-300)) {
        throw PreconditionError("hilbert_value_at_zero: requires f(0) = 0");
    }
    detail::PvIntegrand phi{f.values(), 0.0, f.slope_at_zero(), fit_taylor_at_zero(f)[0], 1.0};
    return detail::hilbert_at_zero(f.grid(), r, detail::extend(f.grid(), phi), phi);
}

GridFunction hilbert_derivative(const GridFunction& f, double r, int k) {
    require_r(r);
    if (k != 1 && k != 2) throw ParameterError("hilbert_derivative: k must be 1 or 2");
    if (std::abs(f.value_at_zero()) > 1e-10 * std::max(f.max_abs(), 1e-300)) {
        throw PreconditionError("hilbert_derivative: requires f(0) = 0");
    }
    const GridFunction d = differentiate(f, k);
    const Grid& grid = f.grid();
    detail::PvIntegrand phi{d.values(), d.value_at_zero(), d.slope_at_zero(), fit_taylor_at_zero(d)[0], 1.0 + k};
    const auto ext = detail::extend(grid, phi);
    auto values = detail::pv_apply(grid, {r, static_cast<double>(k)}, ext, phi);
    const auto jet = detail::fit_jet_at_zero(grid, values);
    return GridFunction(f.grid_ptr(), std::move(values), jet[0], jet[1]);
}

KernelEval kernel_chain(double r, double t) {
    if (!(r >= 1.0)) throw ParameterError("kernel_chain: r must be >= 1");
    if (!(t >= 0.0)) throw ParameterError("kernel_chain: t must be >= 0");
    if (t == 1.0) throw DomainError("kernel_chain: kernels are singular at t = 1");

    KernelEval ev;
    ev.r = r;
    ev.t = t;
    const double lt = std::log(t);  // -inf at t = 0, handled by pow below
    const double one_minus_t2r = t == 0.0 ? 1.0 : -std::expm1(2.0 * r * lt);
    const double t2r1 = std::pow(t, 2.0 * r - 1.0);
    ev.k1 = 2.0 * r * t2r1 / one_minus_t2r;
    ev.k2 = 2.0 * t / (t == 0.0 ? 1.0 : -std::expm1(2.0 * lt));
    ev.k3 = 2.0 * r * t / one_minus_t2r;
    ev.k4 = ev.k1 + 2.0 * r;

    auto le = [](double a, double b) {
        return a <= b + 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    ev.chain_holds = le(ev.k1, ev.k2) && le(ev.k2, ev.k3) && le(ev.k3, ev.k4);

    const double t2r = std::pow(t, 2.0 * r);
    const bool first = le(r * std::pow(t, 2.0 * r - 2.0), (r - 1.0) * t2r + 1.0);
    const bool second = le(r * t * t, t2r + r - 1.0);
    const bool third = le(std::abs(t - t2r1), std::abs(1.0 - t2r));
    ev.cleared_forms_hold = first && second && third;
    return ev;
}

double l2_bound_constant() { return 1.0 + 20.0 * std::numbers::sqrt2 / (3.0 * std::numbers::pi); }

double seeded_uniform(std::uint64_t seed, std::uint64_t position) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (position + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double HilbertProbe::operator()(double y) const {
    const double g = (y - center) / width;
    return (a1 * y + a3 * y * y * y) * std::exp(-g * g);
}

GridFunction HilbertProbe::sample(GridPtr grid) const {
    const double g0 = center / width;
    return GridFunction::sample(std::move(grid), *this, 0.0, a1 * std::exp(-g0 * g0));
}

HilbertProbe random_probe(std::uint64_t seed, std::size_t index) {
    const std::uint64_t base = 8 * static_cast<std::uint64_t>(index);
    HilbertProbe p;
    p.a1 = 2.0 * seeded_uniform(seed, base) - 1.0;
    p.a3 = 2.0 * seeded_uniform(seed, base + 1) - 1.0;
    p.center = 5.0 * seeded_uniform(seed, base + 2);
    p.width = 0.2 + 4.8 * seeded_uniform(seed, base + 3);
    if (std::abs(p.a1) < 0.05) p.a1 = 0.05;
    return p;
}

NormEstimate estimate_l2_norm(double r, std::size_t probe_count, std::uint64_t seed, GridPtr grid) {
    require_r(r);
    if (probe_count < 1) throw ParameterError("estimate_l2_norm: need at least one probe");
    if (!grid) grid = make_grid(std::min(1.0, 1.0 / r));
    NormEstimate est;
    est.r = r;
    est.bound = l2_bound_constant() * r;
    est.probes = probe_count;
    for (std::size_t i = 0; i < probe_count; ++i) {
        const GridFunction f = random_probe(seed, i).sample(grid);
        const GridFunction hf = apply_fractional_hilbert(f, r);
        const double ratio = weighted_lp_norm(hf, 2.0, 0.0) / weighted_lp_norm(f, 2.0, 0.0);
        est.estimated_norm = std::max(est.estimated_norm, ratio);
    }
    return est;
}

SlopeCheck hilbert_slope_at_zero(const GridFunction& f, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("hilbert_slope_at_zero: alpha in (0,1]");
    if (std::abs(f.value_at_zero()) > 1e-10 * std::max(f.max_abs(), 1e-300)) {
        throw PreconditionError("hilbert_slope_at_zero: requires f(0) = 0");
    }
    SlopeCheck out;
    out.measured = apply_fractional_hilbert(f, 1.0 / alpha).slope_at_zero();
    out.predicted = alpha == 1.0 ? 0.0 : f.slope_at_zero() / std::tan(alpha * std::numbers::pi / 2.0);
    return out;
}

}  // namespace selfsim
