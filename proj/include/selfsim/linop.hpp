#pragma once

#include "selfsim/exact.hpp"
#include "selfsim/grid.hpp"

namespace selfsim {

// Data of the a = 0 solution that the linearization is taken around.
struct BasePoint {
    double alpha = 1.0;
    double r = 1.0;          // 1 / alpha
    double c = 0.0;          // cos(alpha pi / 2)
    double s = 1.0;          // sin(alpha pi / 2)
    double cos_pi_alpha = -1.0;
    ExactProfile exact;
    GridFunction D;          // 1 + 2 c y + y^2
    GridFunction y_wbar_y;   // y W'(y)
    double anchor = 0.0;     // y_functional(y W'), analytically -2s
};

BasePoint make_base_point(double alpha, GridPtr grid);

// L V = V + y V' - W HV - V HW with H = H^(1/alpha). Requires V(0) = 0.
GridFunction apply_L(const GridFunction& v, const BasePoint& base);

// g = f/y - f'(0)/D.
GridFunction compute_g(const GridFunction& f, const BasePoint& base);

// h = (Hf - Hf(0))/y + 2(c+y)/D Hf(0) for y >= delta; below delta the form with (Hf)'(0)
// also subtracted, which is exact on Y.
inline constexpr double kHFormSwitch = 1e-3;
GridFunction compute_h(const GridFunction& f, const BasePoint& base);
GridFunction compute_h(const GridFunction& hf, double hf_at_zero, double hf_slope, const BasePoint& base);

// f'(0) + 2 s Hf(0); zero exactly on Y.
double y_functional(const GridFunction& f, const BasePoint& base);

// Closed-form inverse of L from Y onto X. With `strict`, inputs whose Y defect exceeds
// 1e-6 ||f|| are rejected with PreconditionError.
GridFunction apply_L_inverse(const GridFunction& f, const BasePoint& base, bool strict = true);

struct BorderedSolution {
    GridFunction v;
    double mu = 0.0;
    double residual = 0.0;  // L2 norm of L V + mu y W'/alpha - rhs
};

// Solves L V + mu y W'/alpha = rhs with V in X; mu removes the Y defect of rhs.
// With check_residual false the residual is not evaluated (saves one transform).
BorderedSolution solve_bordered(const GridFunction& rhs, const BasePoint& base,
                                bool check_residual = true);

}  // namespace selfsim
