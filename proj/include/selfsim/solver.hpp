#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selfsim/grid.hpp"

namespace selfsim {

struct SolverConfig {
    std::size_t grid_n = kDefaultGridNodes;
    double y_min = kDefaultYMin;
    double y_max = kDefaultYMax;
    double tolerance = 1e-10;     // on the discrete L2 norm of Phi
    int max_iterations = 50;
    double step = 0.005;          // continuation step in a * alpha
    int quadrature_nodes = 64;    // per panel of the velocity-ratio rule

    void validate() const;  // throws ParameterError
};

enum class SolveStatus { converged, max_iterations, numerical_failure };

const char* to_string(SolveStatus status);

/// One self-similar profile: Omega = W/alpha in the tilde variable, with its exponent lambda.
struct ProfileSolution {
    double alpha = 1.0;
    double a = 0.0;
    double lambda = 0.0;
    GridFunction omega;
    double residual_l2 = 0.0;
    int iterations = 0;
    std::vector<double> history;  // residual before each update, then the final one
    SolveStatus status = SolveStatus::converged;
    std::string message;

    bool ok() const { return status == SolveStatus::converged; }
};

/// Q(y) = (1/alpha) int_0^1 HW(y s) s^(1/alpha - 1) ds at every node. The s^(1/alpha-1) weight
/// is absorbed into a Gauss-Jacobi panel on [0, min(1, 1/y)]; the remainder of [0, 1] is
/// covered by Gauss-Legendre panels growing by a factor 4.
GridFunction compute_velocity_ratio(const GridFunction& hw, double alpha, int nodes = 64);

/// Phi = (1+lambda) y Omega' + a alpha Q[alpha H Omega] y Omega' + (1 - alpha H Omega) Omega,
/// H = H^(1/alpha). Requires Omega(0) = 0.
GridFunction residual_Phi(const GridFunction& omega, double lambda, double a, double alpha,
                          int quadrature_nodes = 64);

/// Chord iteration with the frozen derivative at the a = 0 solution. Never throws for
/// non-convergence; the status field reports it.
ProfileSolution solve_profile(double a, double alpha, const SolverConfig& config,
                              const std::optional<ProfileSolution>& warm_start = std::nullopt);

/// Warm-started sweep in a * alpha. Targets must be sorted by |a|; positive and negative
/// branches each start from a = 0. Stops after the first failed solve, which is included.
std::vector<ProfileSolution> continuation(const std::vector<double>& a_targets, double alpha,
                                          const SolverConfig& config);

/// Least-squares fit lambda(a) = sum_{k=1..4} p_k a^k over converged solutions.
struct LambdaFit {
    std::vector<double> coefficients;  // p_1 .. p_4
    double residual = 0.0;             // max |fit - lambda|
    double max_abs_lambda = 0.0;
};

LambdaFit fit_lambda(const std::vector<ProfileSolution>& solutions, int degree = 4);

}  // namespace selfsim
