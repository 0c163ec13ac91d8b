#include "selfsim/quadrature.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "selfsim/errors.hpp"

namespace selfsim {

QuadratureRule gauss_jacobi_unit(int n, double beta) {
    if (n < 1) throw ParameterError("gauss_jacobi_unit: need at least one node");
    if (!(beta > -1.0)) throw ParameterError("gauss_jacobi_unit: beta must exceed -1");
    const double a = 0.0;
    const double b = beta;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        j(k, k) = k == 0 ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
        if (k + 1 < n) {
            const double m = k + 1.0;
            const double t = 2.0 * m + a + b;
            const double off = 4.0 * m * (m + a) * (m + b) * (m + a + b) / (t * t * (t + 1.0) * (t - 1.0));
            j(k, k + 1) = j(k + 1, k) = std::sqrt(off);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j);
    if (eig.info() != Eigen::Success) throw NumericalError("gauss_jacobi_unit: eigensolver failed");
    // mu0 = int_{-1}^{1} (1+x)^b dx; the map s = (1+x)/2 scales weights by 2^-(b+1).
    const double mu0 = std::pow(2.0, b + 1.0) / (b + 1.0);
    const double scale = std::pow(0.5, b + 1.0);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = eig.eigenvectors()(0, i);
        rule.nodes[i] = 0.5 * (1.0 + eig.eigenvalues()(i));
        rule.weights[i] = scale * mu0 * v0 * v0;
    }
    return rule;
}

}  // namespace selfsim
