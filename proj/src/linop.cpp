#include "selfsim/linop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "selfsim/errors.hpp"
#include "selfsim/hilbert.hpp"

namespace selfsim {

namespace {

constexpr double kYTolerance = 1e-6;

void require_vanishing(const GridFunction& f, const char* what) {
    if (std::abs(f.value_at_zero()) > 1e-10 * std::max(f.max_abs(), 1e-300)) {
        throw PreconditionError(std::string(what) + ": requires f(0) = 0");
    }
}

// (Hf)'(0) = f'(0) cot(alpha pi / 2); exact, unlike a fit to the sampled transform.
double hilbert_slope_from_trace(const GridFunction& f, const BasePoint& base) {
    return base.alpha == 1.0 ? 0.0 : f.slope_at_zero() * base.c / base.s;
}

// Intercept of Hf(y) - y (Hf)'(0) from the smallest nodes. Matches the sampled values to
// rounding level, which the separately computed Hf(0) does not; h divides that gap by y.
double consistent_intercept(const GridFunction& hf, double h1, double r) {
    const Grid& g = hf.grid();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.size() && g.nodes[i] <= 1e-4; ++i) idx.push_back(i);
    const bool frac = std::abs(r - 1.0) > 0.025 && 2.0 * r < 4.0;
    const int cols = frac ? 4 : 3;
    if (idx.size() < static_cast<std::size_t>(cols) + 2) return hf.value_at_zero();
    // Hf - y (Hf)'(0) = Hf(0) + O(y^2 log y) + O(y^(2r)); powers scaled to the window.
    Eigen::MatrixXd a(idx.size(), cols);
    Eigen::VectorXd rhs(idx.size());
    for (std::size_t row = 0; row < idx.size(); ++row) {
        const double t = g.nodes[idx[row]] / 1e-4;
        a(row, 0) = 1.0;
        a(row, 1) = t * t;
        a(row, 2) = t * t * std::log(t);
        if (frac) a(row, 3) = std::pow(t, 2.0 * r);
        rhs(row) = hf[idx[row]] - g.nodes[idx[row]] * h1;
    }
    return a.colPivHouseholderQr().solve(rhs)(0);
}

double y_scale(const GridFunction& f) {
    return std::max({f.max_abs(), std::abs(f.slope_at_zero()), 1e-300});
}

}  // namespace

BasePoint make_base_point(double alpha, GridPtr grid) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("make_base_point: alpha in (0, 1]");
    BasePoint b;
    b.alpha = alpha;
    b.r = 1.0 / alpha;
    b.c = std::cos(alpha * std::numbers::pi / 2.0);
    b.s = std::sin(alpha * std::numbers::pi / 2.0);
    b.cos_pi_alpha = std::cos(alpha * std::numbers::pi);
    b.exact = exact_profile(alpha, grid);
    const double c = b.c;
    b.D = GridFunction::sample(grid, [c](double y) { return 1.0 + 2.0 * c * y + y * y; }, 1.0, 2.0 * c);
    b.y_wbar_y = GridFunction::sample(grid, [alpha](double y) { return y * exact_w_slope(alpha, y); }, 0.0,
                                      -2.0 * b.s);
    b.anchor = y_functional(b.y_wbar_y, b);
    if (std::abs(b.anchor) < 1e-14) throw NumericalError("make_base_point: degenerate base point");
    return b;
}

GridFunction apply_L(const GridFunction& v, const BasePoint& base) {
    require_vanishing(v, "apply_L");
    const GridFunction hv = apply_fractional_hilbert(v, base.r);
    GridFunction out = v + differentiate(v, 1).times_y();
    out -= base.exact.w * hv;
    out -= v * base.exact.hw;
    return out;
}

GridFunction compute_g(const GridFunction& f, const BasePoint& base) {
    require_vanishing(f, "compute_g");
    const Grid& g = f.grid();
    const double f1 = f.slope_at_zero();
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i] / g.nodes[i] - f1 / base.D[i];
    const double c2 = fit_taylor_at_zero(f)[0];
    return GridFunction(f.grid_ptr(), std::move(v), 0.0, c2 + 2.0 * base.c * f1);
}

GridFunction compute_h(const GridFunction& hf, double h0, double h1, const BasePoint& base) {
    const Grid& g = hf.grid();
    const double c = base.c;
    std::vector<double> v(hf.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double y = g.nodes[i];
        const double d = base.D[i];
        if (y >= kHFormSwitch) {
            v[i] = (hf[i] - h0) / y + 2.0 * (c + y) / d * h0;
        } else {
            v[i] = (hf[i] - h0 - y * h1) / y - 2.0 * y * (base.cos_pi_alpha + y * c) / d * h0;
        }
    }
    const double slope = v.front() / g.nodes.front();
    return GridFunction(hf.grid_ptr(), std::move(v), 0.0, slope);
}

GridFunction compute_h(const GridFunction& f, const BasePoint& base) {
    require_vanishing(f, "compute_h");
    const GridFunction hf = apply_fractional_hilbert(f, base.r);
    const double h1 = hilbert_slope_from_trace(f, base);
    return compute_h(hf, consistent_intercept(hf, h1, base.r), h1, base);
}

double y_functional(const GridFunction& f, const BasePoint& base) {
    return f.slope_at_zero() + 2.0 * base.s * hilbert_value_at_zero(f, base.r);
}

GridFunction apply_L_inverse(const GridFunction& f, const BasePoint& base, bool strict) {
    require_vanishing(f, "apply_L_inverse");
    const GridFunction hf = apply_fractional_hilbert(f, base.r);
    if (strict) {
        const double defect = f.slope_at_zero() + 2.0 * base.s * hf.value_at_zero();
        if (std::abs(defect) > kYTolerance * y_scale(f)) {
            throw PreconditionError("apply_L_inverse: input is not in Y");
        }
    }
    const GridFunction g = compute_g(f, base);
    const double h1 = hilbert_slope_from_trace(f, base);
    const GridFunction h = compute_h(hf, consistent_intercept(hf, h1, base.r), h1, base);

    const Grid& grid = f.grid();
    const double s = base.s;
    const double c = base.c;
    const std::size_t n = f.size();
    // The y-weighted pieces of both integrals are merged into single coefficients, so the
    // two contributions that grow linearly and cancel never appear separately.
    std::vector<double> i1(n), i2(n), i3(n), i4(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = grid.nodes[i];
        i1[i] = s / y * g[i] + (c / y + 2.0) * h[i];
        i2[i] = -(c / y + 2.0) * g[i] + s / y * h[i];
        i3[i] = y * h[i];
        i4[i] = y * g[i];
    }
    const auto G1 = cumulative_integral(grid, i1);
    const auto G2 = cumulative_integral(grid, i2);
    const auto Gh = cumulative_integral(grid, i3, 2.0);
    const auto Gg = cumulative_integral(grid, i4, 2.0);

    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.nodes[i];
        const double d2 = base.D[i] * base.D[i];
        const double a = x * (1.0 - x * x) * s / d2;
        const double b = x * ((1.0 + x * x) * c + 2.0 * x) / d2;
        const double ch = 2.0 * s * x * (c + x) / d2;
        const double cg = x * (x * x + 2.0 * c * x + base.cos_pi_alpha) / d2;
        v[i] = a * G1[i] - b * G2[i] + ch * Gh[i] + cg * Gg[i];
    }
    return GridFunction(f.grid_ptr(), std::move(v), 0.0, 0.0);
}

BorderedSolution solve_bordered(const GridFunction& rhs, const BasePoint& base, bool check_residual) {
    require_vanishing(rhs, "solve_bordered");
    BorderedSolution out;
    const double denom = base.anchor / base.alpha;
    out.mu = y_functional(rhs, base) / denom;
    const GridFunction direction = base.y_wbar_y * (1.0 / base.alpha);
    const GridFunction projected = rhs - out.mu * direction;
    out.v = apply_L_inverse(projected, base, false);
    if (check_residual) {
        const GridFunction r = apply_L(out.v, base) + out.mu * direction - rhs;
        out.residual = weighted_lp_norm(r, 2.0, 0.0);
    }
    return out;
}

}  // namespace selfsim
