#include "selfsim/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <Eigen/Dense>

#include "selfsim/errors.hpp"
#include "selfsim/hilbert.hpp"

namespace selfsim {

namespace {

constexpr double kSmoothSwitch = 0.01;
constexpr int kSmoothDegree = 6;
constexpr double kFlatTolerance = 1e-8;

double scale_of(const GridFunction& f) {
    return std::max({f.max_abs(), std::abs(f.value_at_zero()), 1e-300});
}

// sum_{j<=k} ||u^(j)||_p, re-smoothing each derivative near 0 before differentiating again.
double sobolev_norm(const GridFunction& u, int k, double p) {
    GridFunction d = u;
    double total = weighted_lp_norm(d, p, 0.0);
    for (int j = 1; j <= k; ++j) {
        d = differentiate(smooth_near_origin(d), 1);
        total += weighted_lp_norm(d, p, 0.0);
    }
    return total;
}

double lp_of_samples(const Grid& g, std::vector<double> v, double p, double lead) {
    for (double& x : v) x = std::pow(std::abs(x), p);
    return std::pow(integrate(g, v, lead), 1.0 / p);
}

}  // namespace

GridFunction smooth_near_origin(const GridFunction& f) {
    const Grid& g = f.grid();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.nodes[i] >= kSmoothSwitch && g.nodes[i] <= 5.0 * kSmoothSwitch) idx.push_back(i);
    }
    if (idx.size() < kSmoothDegree + 3) throw NumericalError("smooth_near_origin: grid too coarse");
    Eigen::MatrixXd a(idx.size(), kSmoothDegree + 1);
    Eigen::VectorXd rhs(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const double t = g.nodes[idx[r]] / kSmoothSwitch;
        double pw = 1.0;
        for (int c = 0; c <= kSmoothDegree; ++c, pw *= t) a(r, c) = pw;
        rhs(r) = f[idx[r]];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
    std::vector<double> v(f.values().begin(), f.values().end());
    for (std::size_t i = 0; i < v.size() && g.nodes[i] < kSmoothSwitch; ++i) {
        const double t = g.nodes[i] / kSmoothSwitch;
        double p = 0.0;
        for (int k = kSmoothDegree; k >= 0; --k) p = p * t + c(k);
        v[i] = p;
    }
    return GridFunction(f.grid_ptr(), std::move(v), c(0), c(1) / kSmoothSwitch);
}

GridFunction subtracted_quotient(const GridFunction& f) {
    const Grid& g = f.grid();
    std::vector<double> q(f.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double y = g.nodes[i];
        q[i] = (f[i] - f.value_at_zero() - y * f.slope_at_zero()) / (y * y);
    }
    return smooth_near_origin(GridFunction(f.grid_ptr(), std::move(q), 0.0, 0.0));
}

GridFunction apply_I(const GridFunction& f) {
    const GridFunction q = subtracted_quotient(f);
    const Grid& g = f.grid();
    auto values = cumulative_integral(g, q.values());
    // Exact origin segment for the linear jet of q.
    const double y0 = g.nodes[0];
    const double shift = q.value_at_zero() * y0 + 0.5 * q.slope_at_zero() * y0 * y0 - values[0];
    for (double& v : values) v += shift;
    return GridFunction(f.grid_ptr(), std::move(values), 0.0, q.value_at_zero());
}

HardyReport hardy_ratio(const GridFunction& f, const WeightedNormSpec& spec, std::string function_id) {
    if (spec.k < 1 || spec.k > 2) throw ParameterError("hardy_ratio: k must be 1 or 2");
    if (!(spec.p > 1.0)) throw ParameterError("hardy_ratio: p must exceed 1");
    if (!(spec.gamma < (spec.p - 1.0) / spec.p)) {
        throw PreconditionError("hardy_ratio: need gamma < (p-1)/p");
    }
    if (!(spec.gamma * spec.p > -1.0)) throw PreconditionError("hardy_ratio: weight not integrable at 0");
    const double scale = scale_of(f);
    if (std::abs(f.value_at_zero()) > kFlatTolerance * scale) {
        throw PreconditionError("hardy_ratio: f(0) must vanish");
    }
    if (spec.k == 2 && std::abs(f.slope_at_zero()) > kFlatTolerance * scale) {
        throw PreconditionError("hardy_ratio: f'(0) must vanish for k = 2");
    }

    const Grid& g = f.grid();
    std::vector<double> lhs(f.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] = std::pow(g.nodes[i], spec.gamma - spec.k) * f[i];
    const double num = lp_of_samples(g, std::move(lhs), spec.p, spec.gamma * spec.p);
    const double den = weighted_lp_norm(differentiate(f, spec.k), spec.p, spec.gamma);

    HardyReport rep;
    rep.spec = spec;
    rep.function_id = std::move(function_id);
    if (den == 0.0) {
        rep.degenerate = true;
        if (num != 0.0) throw NumericalError("hardy_ratio: zero derivative but nonzero function");
        return rep;
    }
    rep.ratio = num / den;
    if (!std::isfinite(rep.ratio)) throw NumericalError("hardy_ratio: non-finite ratio");
    return rep;
}

std::pair<HardyReport, HardyReport> check_I_bounds(const GridFunction& f, int k, double p,
                                                   std::string function_id) {
    if (k < 0 || k > 2) throw ParameterError("check_I_bounds: k must be 0, 1 or 2");
    const GridFunction If = apply_I(f);
    const GridFunction dIf = subtracted_quotient(f);
    const GridFunction weighted = If.times([](double y) { return y / (1.0 + y * y); }, 0.0, 1.0);
    // Derivatives of f taken through g = f - f(0) - y f'(0) = y^2 (If)'. Differencing f itself
    // turns the rounding of f(0) into noise of order eps |f(0)| / h near y_min.
    const GridFunction g = dIf.times_y().times_y();
    const GridFunction g1 = differentiate(g, 1);
    const GridFunction f1 = g1 + GridFunction::sample(f.grid_ptr(), [&](double) { return f.slope_at_zero(); },
                                                      f.slope_at_zero(), 0.0);
    const GridFunction f2 = differentiate(smooth_near_origin(g1), 1);

    const WeightedNormSpec same{k, p, 0.0};
    const WeightedNormSpec lower{std::max(k - 1, 1), p, 0.0};
    auto norm = [](const GridFunction& u, const WeightedNormSpec& s) { return sobolev_norm(u, s.k, s.p); };

    // f'' = 0 exactly when f is affine, and then (If)' = 0 as well: 0/0 at every k. Decided on
    // the L^p parts, since higher derivatives of rounding-level data are noise.
    const double reference = weighted_lp_norm(f1, p, 0.0);
    const bool affine = weighted_lp_norm(f2, p, 0.0) <= 1e-9 * reference &&
                        weighted_lp_norm(dIf, p, 0.0) <= 1e-9 * reference;
    auto make = [&](double num, double den, const WeightedNormSpec& s, bool degenerate) {
        HardyReport r;
        r.spec = s;
        r.function_id = function_id;
        if (degenerate || (num == 0.0 && den == 0.0)) {
            r.degenerate = true;
        } else {
            r.ratio = num / den;
        }
        return r;
    };
    return {make(norm(dIf, same), norm(f2, same), same, affine),
            make(norm(weighted, same), norm(f1, lower), lower, false)};
}

double HardyProbe::operator()(double y) const {
    const double g = y / width;
    return std::pow(y, order) * (b0 + y * (b1 + y * b2)) * std::exp(-g * g);
}

GridFunction HardyProbe::sample(GridPtr grid) const {
    return GridFunction::sample(std::move(grid), *this, 0.0, order == 1 ? b0 : 0.0);
}

std::string HardyProbe::id() const {
    return "k" + std::to_string(order) + "_" + std::to_string(index);
}

HardyProbe hardy_probe(std::uint64_t seed, std::size_t index, int order) {
    if (order < 1 || order > 2) throw ParameterError("hardy_probe: order must be 1 or 2");
    const std::uint64_t base = 16 * static_cast<std::uint64_t>(index) + 1000003ULL * order;
    HardyProbe p;
    p.index = index;
    p.order = order;
    p.b0 = 2.0 * seeded_uniform(seed, base) - 1.0;
    p.b1 = 2.0 * seeded_uniform(seed, base + 1) - 1.0;
    p.b2 = 2.0 * seeded_uniform(seed, base + 2) - 1.0;
    p.width = 0.3 + 4.7 * seeded_uniform(seed, base + 3);
    if (std::abs(p.b0) < 0.05) p.b0 = 0.05;
    return p;
}

std::vector<HardyReport> hardy_suite(const WeightedNormSpec& spec, std::size_t count,
                                     std::uint64_t seed, GridPtr grid) {
    std::vector<HardyReport> out(count);
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < count; ++i) {
        try {
            const HardyProbe probe = hardy_probe(seed, i, spec.k);
            out[i] = hardy_ratio(probe.sample(grid), spec, probe.id());
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace selfsim
