#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace selfsim {

/// Geometric (log-uniform) grid on the half-line in the tilde coordinate y = |x|^alpha.
///
/// The origin is not a node; functions carry their value and slope at 0 separately.
/// Finite-difference weights for the first two derivatives are precomputed here so
/// that every GridFunction sharing the grid differentiates consistently.
struct Grid {
    std::vector<double> nodes;
    double y_min = 0.0;
    double y_max = 0.0;
    double alpha = 1.0;
    double log_step = 0.0;  // ln(nodes[i+1] / nodes[i])

    static constexpr int kStencil = 5;
    // Stencil start index and weights per node, for d/dy and d^2/dy^2.
    std::vector<std::size_t> stencil_start;
    std::vector<std::array<double, kStencil>> d1_weights;
    std::vector<std::array<double, kStencil>> d2_weights;

    std::size_t size() const { return nodes.size(); }
    double log_min() const;
    // Fractional index of y in log space; nodes[i] has index i.
    double log_index(double y) const;
};

using GridPtr = std::shared_ptr<const Grid>;

inline constexpr std::size_t kMinGridNodes = 64;
inline constexpr std::size_t kDefaultGridNodes = 4096;
inline constexpr double kDefaultYMin = 1e-6;
inline constexpr double kDefaultYMax = 1e3;

/// Log-uniform nodes from y_min to y_max inclusive. Requires 0 < y_min < 1 < y_max and n >= 64.
GridPtr make_grid(double alpha, std::size_t n = kDefaultGridNodes, double y_min = kDefaultYMin,
                  double y_max = kDefaultYMax);

/// Same nodes as make_grid without the node-count floor; for tiny illustrative grids.
std::vector<double> geometric_nodes(std::size_t n, double y_min, double y_max);

/// Real function sampled on a Grid, plus its value and first derivative at y = 0.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(GridPtr grid, std::vector<double> values, double value_at_zero,
                 double slope_at_zero);

    static GridFunction zeros(GridPtr grid);
    static GridFunction sample(GridPtr grid, const std::function<double(double)>& f,
                               double value_at_zero, double slope_at_zero);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double value_at_zero() const { return value_at_zero_; }
    double slope_at_zero() const { return slope_at_zero_; }

    double max_abs() const;
    bool all_finite() const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double c);

    // y * f(y); exact on the jet: value 0, slope f(0).
    GridFunction times_y() const;
    // f(y) * w(y) for an analytic weight with known value and slope at 0.
    GridFunction times(const std::function<double(double)>& w, double w0, double w1) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
    double value_at_zero_ = 0.0;
    double slope_at_zero_ = 0.0;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);
GridFunction operator*(GridFunction a, double c);
// Pointwise product; the jet at 0 follows the product rule.
GridFunction operator*(const GridFunction& a, const GridFunction& b);

/// Derivative of order 1 or 2 by sliding five-point Lagrange stencils.
GridFunction differentiate(const GridFunction& f, int order);

/// Taylor coefficients f''(0)/2 and f'''(0)/6 fitted from nodes near the origin,
/// given the stored value and slope at 0.
std::array<double, 2> fit_taylor_at_zero(const GridFunction& f);

/// Cubic local interpolation; x = 0 returns value_at_zero. Throws RangeError for x > y_max.
double interpolate(const GridFunction& f, double x);

struct WeightedNormSpec {
    int k = 0;          // derivative count
    double p = 2.0;     // in (1, inf)
    double gamma = 0.0; // weight y^gamma
};

/// sum_{j=0..k} || y^gamma f^{(j)} ||_{L^p(0, y_max)}; with `bar` the same sum for y f' is added.
double norm(const GridFunction& f, const WeightedNormSpec& spec, bool bar = false);

/// || y^gamma f ||_{L^p(0, y_max)}.
double weighted_lp_norm(const GridFunction& f, double p, double gamma);

/// Quadrature of sampled integrand values over (0, y_max): trapezoid in ln y on the nodes,
/// plus the segment (0, y_min) treated as c * y^leading_power.
double integrate(const Grid& grid, std::span<const double> integrand, double leading_power = 0.0);

/// Running integral F(y_i) = int_0^{y_i} integrand, fourth order in ln y.
std::vector<double> cumulative_integral(const Grid& grid, std::span<const double> integrand,
                                        double leading_power = 0.0);

// Serialization: CSV "y,value" plus a JSON sidecar (path + ".json") carrying the jet at 0
// and the grid parameters.
void write_grid_function(const GridFunction& f, const std::filesystem::path& csv_path);
GridFunction read_grid_function(const std::filesystem::path& csv_path);

}  // namespace selfsim
