#include "pv_quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "selfsim/errors.hpp"

namespace selfsim::detail {

namespace {

constexpr double kExtensionDecades = 2.0;

double node_at(const Grid& grid, long j) {
    return std::exp(grid.log_min() + static_cast<double>(j) * grid.log_step);
}

// 2r t^q / (1 - t^2r) with t = e^s, evaluated without overflow on either side of s = 0.
double kernel_value(double r, double q, double s) {
    if (s < 0.0) return 2.0 * r * std::exp(q * s) / -std::expm1(2.0 * r * s);
    return 2.0 * r * std::exp((q - 2.0 * r) * s) / std::expm1(-2.0 * r * s);
}

// int_{-inf}^{S} kernel(s) e^{m s} ds for S < 0, from 1/(1-t^2r) = sum t^(2rk).
double left_tail(double r, double q, double m, double s_end) {
    double sum = 0.0;
    for (int k = 0; k < 400; ++k) {
        const double expo = q + m + 2.0 * r * k;
        const double term = std::exp(expo * s_end) / expo;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return 2.0 * r * sum;
}

// int_{S}^{inf} kernel(s) e^{m s} ds for S > 0; requires 2r > q + m.
double right_tail(double r, double q, double m, double s_start) {
    double sum = 0.0;
    for (int k = 0; k < 400; ++k) {
        const double expo = 2.0 * r * (k + 1) - q - m;
        const double term = std::exp(-expo * s_start) / expo;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return -2.0 * r * sum;
}

}  // namespace

long extension_nodes(const Grid& grid) {
    return static_cast<long>(std::ceil(kExtensionDecades * std::log(10.0) / grid.log_step));
}

ExtendedIntegrand extend(const Grid& grid, const PvIntegrand& phi) {
    const long n = static_cast<long>(grid.size());
    if (static_cast<long>(phi.values.size()) != n) throw ParameterError("pv: size mismatch");

    ExtendedIntegrand ext;
    ext.pad = extension_nodes(grid);

    // Tail model interpolating y_max and one and two octaves inward.
    constexpr int kTerms = TailDiagnostics::kTerms;
    const long m = std::max(1L, std::lround(std::log(2.0) / grid.log_step));
    const double e = phi.tail_exponent;
    Eigen::Matrix3d lhs;
    Eigen::Vector3d rhs;
    for (int row = 0; row < kTerms; ++row) {
        const long i = std::max(0L, n - 1 - row * m);
        const double y = grid.nodes[i];
        for (int col = 0; col < kTerms; ++col) lhs(row, col) = std::pow(y, -col);
        rhs(row) = phi.values[i] * std::pow(y, e);
    }
    const Eigen::Vector3d c = lhs.fullPivLu().solve(rhs);
    for (int k = 0; k < kTerms; ++k) ext.tail.coeffs[k] = c(k);
    auto model = [&](double y) {
        double v = 0.0;
        for (int k = 0; k < kTerms; ++k) v += c(k) * std::pow(y, -e - k);
        return v;
    };
    const long i1 = n - 1;
    const long i3 = std::max(0L, n - 1 - kTerms * m);
    const double y1 = grid.nodes[i1];

    double max_abs = 0.0;
    for (double v : phi.values) max_abs = std::max(max_abs, std::abs(v));
    const double y3 = grid.nodes[i3];
    const double scale3 = std::max(std::abs(phi.values[i3]), 1e-300);
    ext.tail.fit_residual = std::abs(model(y3) - phi.values[i3]) / scale3;
    ext.tail.decay_ratio =
        max_abs > 0.0 ? std::abs(phi.values[i1]) * std::pow(y1, e) / max_abs : 0.0;
    ext.tail.warning = ext.tail.decay_ratio > 10.0 ||
                       (ext.tail.fit_residual > 1e-2 && std::abs(phi.values[i3]) > 1e-12 * max_abs);

    ext.values.resize(static_cast<std::size_t>(n + 2 * ext.pad));
    for (long j = -ext.pad; j < n + ext.pad; ++j) {
        double v;
        if (j < 0) {
            const double y = node_at(grid, j);
            v = phi.value_at_zero + y * (phi.slope_at_zero + y * phi.curvature_at_zero);
        } else if (j < n) {
            v = phi.values[j];
        } else {
            v = model(node_at(grid, j));
        }
        ext.values[static_cast<std::size_t>(j + ext.pad)] = v;
    }
    return ext;
}

void remove_odd_even(std::vector<double>& v) {
    constexpr std::array<double, 5> kInterior{-1.0 / 16, 4.0 / 16, 10.0 / 16, 4.0 / 16, -1.0 / 16};
    constexpr std::array<double, 5> kEnd{15.0 / 16, 4.0 / 16, -6.0 / 16, 4.0 / 16, -1.0 / 16};
    constexpr std::array<double, 5> kNextToEnd{1.0 / 16, 12.0 / 16, 6.0 / 16, -4.0 / 16, 1.0 / 16};
    const std::size_t n = v.size();
    if (n < 5) return;
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        for (std::size_t k = 0; k < 5; ++k) out[i] += kInterior[k] * v[i - 2 + k];
    }
    for (std::size_t k = 0; k < 5; ++k) {
        out[0] += kEnd[k] * v[k];
        out[1] += kNextToEnd[k] * v[k];
        out[n - 1] += kEnd[k] * v[n - 1 - k];
        out[n - 2] += kNextToEnd[k] * v[n - 1 - k];
    }
    v = std::move(out);
}

std::vector<double> pv_apply(const Grid& grid, const PvKernel& kernel, const ExtendedIntegrand& ext,
                             const PvIntegrand& phi) {
    const long n = static_cast<long>(grid.size());
    const long pad = ext.pad;
    const double h = grid.log_step;
    const double r = kernel.r;
    const double q = kernel.q;

    // Kernel at every offset d = j - i in [-(n-1+pad), n-1+pad].
    const long span = n - 1 + pad;
    std::vector<double> table(static_cast<std::size_t>(2 * span + 1), 0.0);
    for (long d = -span; d <= span; ++d) {
        if (d != 0) table[static_cast<std::size_t>(d + span)] = kernel_value(r, q, d * h);
    }

    const double e = phi.tail_exponent;
    const auto& c = ext.tail.coeffs;
    auto tail_model = [&](double y) {
        double v = 0.0;
        for (int k = 0; k < TailDiagnostics::kTerms; ++k) v += c[k] * std::pow(y, -e - k);
        return v;
    };
    std::vector<double> out(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const double x = grid.nodes[i];
        // Nodes j with j - i odd; endpoints carry half weight.
        long j_lo = -pad;
        if (((j_lo - i) & 1L) == 0) ++j_lo;
        long j_hi = n - 1 + pad;
        if (((j_hi - i) & 1L) == 0) --j_hi;

        const double* k = table.data() + span - i;
        const double* v = ext.values.data() + pad;
        double sum = 0.5 * (k[j_lo] * v[j_lo] + k[j_hi] * v[j_hi]);
        for (long j = j_lo + 2; j < j_hi; j += 2) sum += k[j] * v[j];
        sum *= 2.0 * h;

        const double s_lo = static_cast<double>(j_lo - i) * h;
        const double s_hi = static_cast<double>(j_hi - i) * h;

        // Euler-Maclaurin end correction -(H^2/12)(F'(b) - F'(a)) with H = 2h; the
        // integrand is analytic in the extension, so F' comes from a central difference.
        auto left_f = [&](double s) {
            const double y = x * std::exp(s);
            return kernel_value(r, q, s) *
                   (phi.value_at_zero + y * (phi.slope_at_zero + y * phi.curvature_at_zero));
        };
        auto right_f = [&](double s) {
            const double y = x * std::exp(s);
            return kernel_value(r, q, s) * tail_model(y);
        };
        constexpr double delta = 1e-3;
        const double d_lo = (left_f(s_lo + delta) - left_f(s_lo - delta)) / (2.0 * delta);
        const double d_hi = (right_f(s_hi + delta) - right_f(s_hi - delta)) / (2.0 * delta);
        sum -= (4.0 * h * h / 12.0) * (d_hi - d_lo);
        double tails = phi.value_at_zero * left_tail(r, q, 0.0, s_lo) +
                       phi.slope_at_zero * x * left_tail(r, q, 1.0, s_lo) +
                       phi.curvature_at_zero * x * x * left_tail(r, q, 2.0, s_lo);
        for (int kk = 0; kk < TailDiagnostics::kTerms; ++kk) {
            tails += c[kk] * std::pow(x, -e - kk) * right_tail(r, q, -e - kk, s_hi);
        }

        out[static_cast<std::size_t>(i)] = (sum + tails) / std::numbers::pi;
    }
    remove_odd_even(out);
    return out;
}

double hilbert_at_zero(const Grid& grid, double r, const ExtendedIntegrand& ext,
                       const PvIntegrand& phi) {
    const long n = static_cast<long>(grid.size());
    const long pad = ext.pad;
    double sum = 0.0;
    const std::size_t total = ext.values.size();
    for (std::size_t j = 0; j < total; ++j) {
        const double w = (j == 0 || j + 1 == total) ? 0.5 : 1.0;
        sum += w * ext.values[j];
    }
    sum *= grid.log_step;
    const double y_lo = node_at(grid, -pad);
    const double y_hi = node_at(grid, n - 1 + pad);
    const double e = phi.tail_exponent;
    // End corrections in ln y: d/du of the left and right models.
    const double d_lo = y_lo * (phi.slope_at_zero + 2.0 * y_lo * phi.curvature_at_zero);
    double d_hi = 0.0;
    double tail = 0.0;
    for (int k = 0; k < TailDiagnostics::kTerms; ++k) {
        const double term = ext.tail.coeffs[k] * std::pow(y_hi, -e - k);
        d_hi -= (e + k) * term;
        tail += term / (e + k);
    }
    sum -= grid.log_step * grid.log_step / 12.0 * (d_hi - d_lo);
    sum += y_lo * (phi.slope_at_zero + 0.5 * y_lo * phi.curvature_at_zero) + tail;
    return -2.0 * r * sum / std::numbers::pi;
}

namespace {

std::vector<std::size_t> window(const Grid& grid, double lo, double hi) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.nodes[i] >= lo && grid.nodes[i] <= hi) idx.push_back(i);
    }
    return idx;
}

}  // namespace

double fit_slope_at_zero(const Grid& grid, std::span<const double> values, double value_at_zero,
                         double r) {
    const auto idx = window(grid, 1e-5, 3e-3);
    const double frac_power = 2.0 * r - 1.0;
    const bool use_frac = std::abs(frac_power - 1.0) > 0.05 && std::abs(frac_power - 2.0) > 0.05 &&
                          frac_power < 3.0;
    const int cols = use_frac ? 5 : 4;
    if (idx.size() < static_cast<std::size_t>(cols) + 2) {
        throw NumericalError("fit_slope_at_zero: too few nodes near the origin");
    }
    Eigen::MatrixXd a(idx.size(), cols);
    Eigen::VectorXd rhs(idx.size());
    for (std::size_t row = 0; row < idx.size(); ++row) {
        const double y = grid.nodes[idx[row]];
        a(row, 0) = 1.0;
        a(row, 1) = y;
        a(row, 2) = y * std::log(y);
        a(row, 3) = y * y;
        if (use_frac) a(row, 4) = std::pow(y, frac_power);
        rhs(row) = (values[idx[row]] - value_at_zero) / y;
    }
    // Column scaling keeps the QR well conditioned.
    Eigen::VectorXd scale = a.colwise().norm().transpose();
    for (int c = 0; c < cols; ++c) a.col(c) /= scale(c);
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
    return c(0) / scale(0);
}

std::array<double, 2> fit_jet_at_zero(const Grid& grid, std::span<const double> values) {
    const auto idx = window(grid, 1e-5, 3e-3);
    if (idx.size() < 5) throw NumericalError("fit_jet_at_zero: too few nodes near the origin");
    Eigen::MatrixXd a(idx.size(), 3);
    Eigen::VectorXd rhs(idx.size());
    for (std::size_t row = 0; row < idx.size(); ++row) {
        const double y = grid.nodes[idx[row]];
        a(row, 0) = 1.0;
        a(row, 1) = y;
        a(row, 2) = y * y;
        rhs(row) = values[idx[row]];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
    return {c(0), c(1)};
}

}  // namespace selfsim::detail
