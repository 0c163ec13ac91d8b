#include "selfsim/exact.hpp"

#include <cmath>
#include <numbers>

#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
}

}  // namespace

double exact_w(double alpha, double y) {
    const double c = std::cos(alpha * std::numbers::pi / 2.0);
    const double s = std::sin(alpha * std::numbers::pi / 2.0);
    return -2.0 * s * y / (y * y + 2.0 * c * y + 1.0);
}

double exact_hw(double alpha, double y) {
    const double c = std::cos(alpha * std::numbers::pi / 2.0);
    return 2.0 * (c * y + 1.0) / (y * y + 2.0 * c * y + 1.0);
}

double exact_w_slope(double alpha, double y) {
    const double c = std::cos(alpha * std::numbers::pi / 2.0);
    const double s = std::sin(alpha * std::numbers::pi / 2.0);
    const double d = y * y + 2.0 * c * y + 1.0;
    return -2.0 * s * (1.0 - y * y) / (d * d);
}

ExactProfile exact_profile(double alpha, GridPtr grid) {
    require_alpha(alpha);
    const double c = std::cos(alpha * std::numbers::pi / 2.0);
    const double s = std::sin(alpha * std::numbers::pi / 2.0);
    ExactProfile p;
    p.alpha = alpha;
    p.w = GridFunction::sample(grid, [alpha](double y) { return exact_w(alpha, y); }, 0.0, -2.0 * s);
    // HW(y) = 2 (1 + c y)(1 - 2 c y + ...) -> slope 2c - 4c = -2c at 0.
    p.hw = GridFunction::sample(grid, [alpha](double y) { return exact_hw(alpha, y); }, 2.0, -2.0 * c);
    p.lambda = 0.0;
    return p;
}

double self_similar_evaluate(const GridFunction& profile, double lambda, double alpha, double x,
                             double t) {
    require_alpha(alpha);
    if (!(t < 1.0)) throw DomainError("self_similar_evaluate: t must be < 1");
    if (x == 0.0) return 0.0;
    const double arg = std::pow(std::abs(x), alpha) / std::pow(1.0 - t, 1.0 + lambda);
    const double sign = x > 0.0 ? 1.0 : -1.0;
    return sign * interpolate(profile, arg) / (1.0 - t);
}

double clm_exact_solution(double x, double t) {
    if (!(t < 1.0)) throw DomainError("clm_exact_solution: t must be < 1");
    const double w0 = -2.0 * x / (1.0 + x * x);
    const double hw0 = 2.0 / (1.0 + x * x);
    const double d = 2.0 - t * hw0;
    return 4.0 * w0 / (d * d + t * t * w0 * w0);
}

}  // namespace selfsim
