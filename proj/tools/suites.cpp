#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "selfsim/exact.hpp"
#include "selfsim/format.hpp"
#include "selfsim/hardy.hpp"
#include "selfsim/hilbert.hpp"
#include "selfsim/linop.hpp"

namespace selfsim::cli {

namespace {

const std::vector<double> kAlphas = {0.3, 0.5, 1.0 / std::numbers::pi, 0.9};
const std::vector<double> kRoundtripAlphas = {0.3, 0.5, 0.9};

std::string verdict(bool ok) { return ok ? "pass" : "fail"; }

Table entries_table(const CheckReport& report) {
    Table t{{"check", "measured", "lower", "upper", "verdict"}, {}};
    for (const auto& e : report.entries) {
        t.rows.push_back({e.name, format_double(e.measured), format_double(e.lower), format_double(e.upper),
                          verdict(e.passed)});
    }
    return t;
}

// Short form for check names; numeric columns keep full precision.
std::string label(double v) {
    if (std::abs(v - 1.0 / std::numbers::pi) < 1e-15) return "1/pi";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

double hardy_constant(const WeightedNormSpec& spec) {
    double c = 1.0;
    for (int j = 1; j <= spec.k; ++j) c /= j - 1.0 / spec.p - spec.gamma;
    return c;
}

SuiteResult run_kernel_suite(std::uint64_t seed, std::size_t samples) {
    SuiteResult out;
    out.report.suite = "kernel";
    out.table.header = {"index", "r", "t", "k1", "k2", "k3", "k4", "verdict"};
    for (std::size_t i = 0; i < samples; ++i) {
        const double r = 1.0 + 19.0 * seeded_uniform(seed, 2 * i);
        const double t = seeded_uniform(seed, 2 * i + 1);
        const KernelEval ev = kernel_chain(r, t);
        const bool ok = ev.ordered();
        // Largest violation of the three links, relative to the larger side.
        const double slack = std::max({ev.k1 - ev.k2, ev.k2 - ev.k3, ev.k3 - ev.k4}) /
                             std::max({1.0, std::abs(ev.k3), std::abs(ev.k4)});
        out.report.entries.push_back({"sample " + std::to_string(i), slack, -INFINITY, 1e-12, ok});
        out.table.rows.push_back({std::to_string(i), format_double(r), format_double(t), format_double(ev.k1),
                                  format_double(ev.k2), format_double(ev.k3), format_double(ev.k4),
                                  verdict(ok)});
    }
    return out;
}

SuiteResult run_hilbert_suite(std::uint64_t seed, std::size_t grid_n, std::size_t probes) {
    SuiteResult out;
    CheckReport& rep = out.report;
    rep.suite = "hilbert";

    for (double alpha : kAlphas) {
        const GridPtr grid = make_grid(alpha, grid_n);
        const ExactProfile ex = exact_profile(alpha, grid);
        const GridFunction hw = apply_fractional_hilbert(ex.w, 1.0 / alpha);
        double err = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double y = grid->nodes[i];
            if (y < 1e-3 || y > 1e2) continue;
            err = std::max(err, std::abs(hw[i] - ex.hw[i]) / std::abs(ex.hw[i]));
        }
        rep.add_upper("closed_form alpha=" + label(alpha), err, 1e-6);
    }

    for (double r : {1.0, 1.5, 2.0, 3.0, 5.0, 10.0}) {
        const NormEstimate est = estimate_l2_norm(r, probes, seed, make_grid(std::min(1.0, 1.0 / r), grid_n));
        rep.add_upper("l2_norm_over_r r=" + label(r), est.estimated_norm / r, l2_bound_constant());
        if (r == 1.0) rep.add("l2_norm_classical r=1", est.estimated_norm, 0.98, 1.0);
    }

    for (double alpha : kRoundtripAlphas) {
        const GridPtr grid = make_grid(alpha, grid_n);
        for (std::size_t i = 0; i < 10; ++i) {
            const HardyProbe probe = hardy_probe(seed, i, 1);
            const SlopeCheck sc = hilbert_slope_at_zero(probe.sample(grid), alpha);
            const double rel = std::abs(sc.measured - sc.predicted) / std::abs(sc.predicted);
            rep.add_upper("slope_trace alpha=" + label(alpha) + " f=" + probe.id(), rel, 1e-3);
        }
    }
    out.table = entries_table(rep);
    return out;
}

SuiteResult run_hardy_suite(std::uint64_t seed, std::size_t grid_n, std::size_t count) {
    SuiteResult out;
    out.report.suite = "hardy";
    out.table.header = {"function_id", "k", "p", "gamma", "ratio", "bound", "verdict"};
    const GridPtr grid = make_grid(1.0, grid_n);
    for (const WeightedNormSpec spec : {WeightedNormSpec{1, 2.0, 0.0}, WeightedNormSpec{2, 2.0, 0.0},
                                        WeightedNormSpec{1, 3.0, 0.5}}) {
        const double bound = hardy_constant(spec) * (1.0 + 1e-3);
        for (const HardyReport& r : hardy_suite(spec, count, seed, grid)) {
            // Degenerate probes have no ratio to judge.
            const bool ok = r.degenerate || (std::isfinite(r.ratio) && r.ratio <= bound);
            out.report.entries.push_back({r.function_id, r.ratio, 0.0, bound, ok});
            out.table.rows.push_back({r.function_id, std::to_string(spec.k), format_double(spec.p),
                                      format_double(spec.gamma), format_double(r.ratio), format_double(bound),
                                      verdict(ok)});
        }
    }
    return out;
}

SuiteResult run_linop_suite(std::uint64_t seed, std::size_t grid_n, std::size_t count) {
    SuiteResult out;
    CheckReport& rep = out.report;
    rep.suite = "linop";
    out.table.header = {"kind", "alpha", "function_id", "grid_n", "measured", "upper", "verdict"};
    auto row = [&](const std::string& kind, double alpha, const std::string& id, double measured, double upper) {
        const CheckEntry& e = rep.add_upper(kind + " alpha=" + label(alpha) + " f=" + id, measured, upper);
        out.table.rows.push_back({kind, format_double(alpha), id, std::to_string(grid_n), format_double(measured),
                                  format_double(upper), verdict(e.passed)});
    };
    const WeightedNormSpec h2{2, 2.0, 0.0};
    for (double alpha : kRoundtripAlphas) {
        const GridPtr grid = make_grid(alpha, grid_n);
        const BasePoint base = make_base_point(alpha, grid);
        for (std::size_t i = 0; i < count; ++i) {
            const HardyProbe probe = hardy_probe(seed, i, 2);
            const GridFunction v = probe.sample(grid);
            const GridFunction back = apply_L_inverse(apply_L(v, base), base, false);
            row("roundtrip", alpha, probe.id(), norm(back - v, h2) / norm(v, h2), 1e-3);
        }
    }
    for (double alpha : kAlphas) {
        const BasePoint base = make_base_point(alpha, make_grid(alpha, grid_n));
        const double expected = -2.0 * std::sin(alpha * std::numbers::pi / 2.0);
        row("anchor", alpha, "yW'", std::abs(base.anchor - expected), 1e-8);
    }
    return out;
}

}  // namespace selfsim::cli
