#include "selfsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

// Fornberg's recursion: weights for derivatives 0..2 at x0 from the given nodes.
void fornberg_weights(double x0, std::span<const double> x,
                      std::array<std::array<double, Grid::kStencil>, 3>& c) {
    const int n = static_cast<int>(x.size());
    const int m = 2;
    for (auto& row : c) row.fill(0.0);
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
}

double leading_power_of(const GridFunction& f, double p, double gamma) {
    const double scale = std::max(f.max_abs(), std::abs(f.value_at_zero()));
    if (std::abs(f.value_at_zero()) > 1e-12 * scale) return gamma * p;
    return (gamma + 1.0) * p;
}

}  // namespace

std::vector<double> geometric_nodes(std::size_t n, double y_min, double y_max) {
    if (n < 2 || !(y_min > 0.0) || !(y_max > y_min)) {
        throw ParameterError("geometric_nodes: need n >= 2 and 0 < y_min < y_max");
    }
    std::vector<double> nodes(n);
    const double a = std::log(y_min);
    const double b = std::log(y_max);
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    nodes.front() = y_min;
    nodes.back() = y_max;
    return nodes;
}

double Grid::log_min() const { return std::log(y_min); }

double Grid::log_index(double y) const { return (std::log(y) - log_min()) / log_step; }

GridPtr make_grid(double alpha, std::size_t n, double y_min, double y_max) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("make_grid: alpha must lie in (0, 1]");
    if (n < kMinGridNodes) throw ParameterError("make_grid: need at least 64 nodes");
    if (!(y_min > 0.0 && y_min < 1.0 && y_max > 1.0) || !std::isfinite(y_max)) {
        throw ParameterError("make_grid: need 0 < y_min < 1 < y_max");
    }
    if (y_min > 1e-4) throw ParameterError("make_grid: smallest node must be <= 1e-4");

    auto grid = std::make_shared<Grid>();
    grid->alpha = alpha;
    grid->y_min = y_min;
    grid->y_max = y_max;
    grid->nodes = geometric_nodes(n, y_min, y_max);
    grid->log_step = (std::log(y_max) - std::log(y_min)) / static_cast<double>(n - 1);

    grid->stencil_start.resize(n);
    grid->d1_weights.resize(n);
    grid->d2_weights.resize(n);
    constexpr int half = Grid::kStencil / 2;
    std::array<std::array<double, Grid::kStencil>, 3> c{};
    for (std::size_t i = 0; i < n; ++i) {
        const auto lo = static_cast<std::size_t>(
            std::clamp<long>(static_cast<long>(i) - half, 0, static_cast<long>(n) - Grid::kStencil));
        grid->stencil_start[i] = lo;
        fornberg_weights(grid->nodes[i], std::span<const double>(grid->nodes).subspan(lo, Grid::kStencil),
                         c);
        grid->d1_weights[i] = c[1];
        grid->d2_weights[i] = c[2];
    }
    return grid;
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values, double value_at_zero,
                           double slope_at_zero)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      value_at_zero_(value_at_zero),
      slope_at_zero_(slope_at_zero) {
    if (!grid_) throw ParameterError("GridFunction: null grid");
    if (values_.size() != grid_->size()) {
        throw ParameterError("GridFunction: values length " + std::to_string(values_.size()) +
                             " does not match grid size " + std::to_string(grid_->size()));
    }
    if (!std::isfinite(value_at_zero_) || !std::isfinite(slope_at_zero_)) {
        throw NumericalError("GridFunction: value and slope at zero must be finite");
    }
}

GridFunction GridFunction::zeros(GridPtr grid) {
    const auto n = grid->size();
    return GridFunction(std::move(grid), std::vector<double>(n, 0.0), 0.0, 0.0);
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(double)>& f,
                                  double value_at_zero, double slope_at_zero) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->nodes[i]);
    return GridFunction(std::move(grid), std::move(v), value_at_zero, slope_at_zero);
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool GridFunction::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    if (other.size() != size()) throw ParameterError("GridFunction: size mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    value_at_zero_ += other.value_at_zero_;
    slope_at_zero_ += other.slope_at_zero_;
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    if (other.size() != size()) throw ParameterError("GridFunction: size mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    value_at_zero_ -= other.value_at_zero_;
    slope_at_zero_ -= other.slope_at_zero_;
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (double& v : values_) v *= c;
    value_at_zero_ *= c;
    slope_at_zero_ *= c;
    return *this;
}

GridFunction GridFunction::times_y() const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = grid_->nodes[i] * values_[i];
    return GridFunction(grid_, std::move(v), 0.0, value_at_zero_);
}

GridFunction GridFunction::times(const std::function<double(double)>& w, double w0, double w1) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w(grid_->nodes[i]) * values_[i];
    return GridFunction(grid_, std::move(v), w0 * value_at_zero_,
                        w0 * slope_at_zero_ + w1 * value_at_zero_);
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }
GridFunction operator*(GridFunction a, double c) { return a *= c; }

GridFunction operator*(const GridFunction& a, const GridFunction& b) {
    if (a.size() != b.size()) throw ParameterError("GridFunction: size mismatch");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
    return GridFunction(a.grid_ptr(), std::move(v), a.value_at_zero() * b.value_at_zero(),
                        a.value_at_zero() * b.slope_at_zero() + a.slope_at_zero() * b.value_at_zero());
}

std::array<double, 2> fit_taylor_at_zero(const GridFunction& f) {
    // Least squares for (f - f0 - f1 y) / y^2 = c2 + c3 y + c4 y^2 on y in [1e-4, 1e-2].
    const Grid& g = f.grid();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.nodes[i] >= 1e-4 && g.nodes[i] <= 1e-2) idx.push_back(i);
    }
    if (idx.size() < 3) return {0.0, 0.0};
    Eigen::MatrixXd a(idx.size(), 3);
    Eigen::VectorXd rhs(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const double y = g.nodes[idx[r]];
        a(r, 0) = 1.0;
        a(r, 1) = y;
        a(r, 2) = y * y;
        rhs(r) = (f[idx[r]] - f.value_at_zero() - f.slope_at_zero() * y) / (y * y);
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
    return {c(0), c(1)};
}

GridFunction differentiate(const GridFunction& f, int order) {
    if (order != 1 && order != 2) throw ParameterError("differentiate: order must be 1 or 2");
    const Grid& g = f.grid();
    const auto& weights = order == 1 ? g.d1_weights : g.d2_weights;
    std::vector<double> d(f.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t lo = g.stencil_start[i];
        // Differences against f[i]: the weights sum to zero, and at the smallest nodes they are
        // large enough that summing raw values would leave rounding noise of order eps / h^2.
        double s = 0.0;
        for (int k = 0; k < Grid::kStencil; ++k) s += weights[i][k] * (f[lo + k] - f[i]);
        d[i] = s;
    }
    const auto [c2, c3] = fit_taylor_at_zero(f);
    if (order == 1) return GridFunction(f.grid_ptr(), std::move(d), f.slope_at_zero(), 2.0 * c2);
    return GridFunction(f.grid_ptr(), std::move(d), 2.0 * c2, 6.0 * c3);
}

double interpolate(const GridFunction& f, double x) {
    const Grid& g = f.grid();
    if (!(x >= 0.0)) throw RangeError("interpolate: x must be >= 0");
    if (x > g.y_max * (1.0 + 1e-14)) throw RangeError("interpolate: x beyond y_max; use a tail model");
    if (x == 0.0) return f.value_at_zero();
    if (x < g.y_min) {
        const double y0 = g.nodes[0];
        const double c2 = (f[0] - f.value_at_zero() - f.slope_at_zero() * y0) / (y0 * y0);
        return f.value_at_zero() + x * (f.slope_at_zero() + c2 * x);
    }
    const auto n = static_cast<long>(g.size());
    const double s = g.log_index(x);
    long j = static_cast<long>(std::floor(s));
    j = std::clamp(j, 0L, n - 2);
    const double frac = s - static_cast<double>(j);
    if (std::abs(frac) < 1e-12) return f[static_cast<std::size_t>(j)];
    if (std::abs(frac - 1.0) < 1e-12) return f[static_cast<std::size_t>(j + 1)];
    const long lo = std::clamp(j - 1, 0L, n - 4);
    double result = 0.0;
    for (long a = lo; a < lo + 4; ++a) {
        double w = 1.0;
        for (long b = lo; b < lo + 4; ++b) {
            if (b != a) w *= (x - g.nodes[b]) / (g.nodes[a] - g.nodes[b]);
        }
        result += w * f[static_cast<std::size_t>(a)];
    }
    return result;
}

double integrate(const Grid& grid, std::span<const double> integrand, double leading_power) {
    if (integrand.size() != grid.size()) throw ParameterError("integrate: size mismatch");
    if (!(leading_power > -1.0)) throw NumericalError("integrate: integrand not integrable at 0");
    const std::size_t n = grid.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        s += w * integrand[i] * grid.nodes[i];
    }
    s *= grid.log_step;
    s += grid.nodes[0] * integrand[0] / (leading_power + 1.0);
    if (!std::isfinite(s)) throw NumericalError("integrate: non-finite result");
    return s;
}

std::vector<double> cumulative_integral(const Grid& grid, std::span<const double> integrand,
                                        double leading_power) {
    const std::size_t n = grid.size();
    if (integrand.size() != n) throw ParameterError("cumulative_integral: size mismatch");
    std::vector<double> j(n);
    for (std::size_t i = 0; i < n; ++i) j[i] = integrand[i] * grid.nodes[i];
    const double h24 = grid.log_step / 24.0;
    std::vector<double> out(n);
    out[0] = grid.nodes[0] * integrand[0] / (leading_power + 1.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double piece;
        if (i == 0) {
            piece = h24 * (9.0 * j[0] + 19.0 * j[1] - 5.0 * j[2] + j[3]);
        } else if (i + 2 == n) {
            piece = h24 * (j[n - 4] - 5.0 * j[n - 3] + 19.0 * j[n - 2] + 9.0 * j[n - 1]);
        } else {
            piece = h24 * (-j[i - 1] + 13.0 * j[i] + 13.0 * j[i + 1] - j[i + 2]);
        }
        out[i + 1] = out[i] + piece;
    }
    return out;
}

double weighted_lp_norm(const GridFunction& f, double p, double gamma) {
    if (!(p > 1.0)) throw ParameterError("weighted_lp_norm: p must exceed 1");
    if (!f.all_finite()) throw NumericalError("weighted_lp_norm: non-finite values");
    const Grid& g = f.grid();
    std::vector<double> integrand(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        integrand[i] = std::pow(std::abs(std::pow(g.nodes[i], gamma) * f[i]), p);
    }
    const double lead = leading_power_of(f, p, gamma);
    if (!(lead > -1.0)) throw NumericalError("weighted_lp_norm: weight not integrable at 0");
    return std::pow(integrate(g, integrand, lead), 1.0 / p);
}

double norm(const GridFunction& f, const WeightedNormSpec& spec, bool bar) {
    if (spec.k < 0) throw ParameterError("norm: k must be >= 0");
    double total = 0.0;
    auto accumulate = [&](const GridFunction& base) {
        GridFunction d = base;
        for (int j = 0; j <= spec.k; ++j) {
            if (j == 1) d = differentiate(base, 1);
            if (j == 2) d = differentiate(base, 2);
            if (j > 2) d = differentiate(d, 1);
            total += weighted_lp_norm(d, spec.p, spec.gamma);
        }
    };
    accumulate(f);
    if (bar) accumulate(differentiate(f, 1).times_y());
    return total;
}

}  // namespace selfsim
