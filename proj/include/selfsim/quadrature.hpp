#pragma once

#include <vector>

namespace selfsim {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss rule for int_0^1 F(s) s^beta ds, beta > -1, by Golub-Welsch on the Jacobi
// recurrence with weight (1+x)^beta on [-1, 1].
QuadratureRule gauss_jacobi_unit(int n, double beta);

}  // namespace selfsim
