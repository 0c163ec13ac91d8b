#pragma once

#include "selfsim/grid.hpp"

namespace selfsim {

/// The explicit a = 0 steady state in the tilde variable,
///   W(y)  = -2 sin(a pi/2) y / (y^2 + 2 cos(a pi/2) y + 1),
///   HW(y) =  2 (cos(a pi/2) y + 1) / (y^2 + 2 cos(a pi/2) y + 1),
/// with lambda = 0.
struct ExactProfile {
    double alpha = 1.0;
    GridFunction w;
    GridFunction hw;
    double lambda = 0.0;
};

ExactProfile exact_profile(double alpha, GridPtr grid);

double exact_w(double alpha, double y);
double exact_hw(double alpha, double y);
// dW/dy of the exact profile.
double exact_w_slope(double alpha, double y);

/// sgn(x) (1-t)^-1 W(|x|^alpha / (1-t)^(1+lambda)), where W is the tilde profile.
/// Throws DomainError for t >= 1 and RangeError when the argument leaves the grid.
double self_similar_evaluate(const GridFunction& profile, double lambda, double alpha, double x,
                             double t);

/// Closed-form Constantin-Lax-Majda solution (a = 0) for the datum -2x/(1+x^2).
double clm_exact_solution(double x, double t);

}  // namespace selfsim
