#include "selfsim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

#include <Eigen/Dense>

#include "selfsim/errors.hpp"
#include "selfsim/hilbert.hpp"
#include "selfsim/linop.hpp"
#include "selfsim/quadrature.hpp"

namespace selfsim {

void SolverConfig::validate() const {
    if (!(tolerance > 0.0)) throw ParameterError("solver: tolerance must be positive");
    if (!(step > 0.0)) throw ParameterError("solver: continuation step must be positive");
    if (max_iterations < 1) throw ParameterError("solver: max_iterations must be >= 1");
    if (quadrature_nodes < 2) throw ParameterError("solver: need at least two quadrature nodes");
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iterations: return "max_iterations";
        case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
}

constexpr double kPanelGrowth = 4.0;

}  // namespace

GridFunction compute_velocity_ratio(const GridFunction& hw, double alpha, int nodes) {
    require_alpha(alpha);
    if (!hw.all_finite()) throw NumericalError("compute_velocity_ratio: non-finite input");
    const double beta = 1.0 / alpha - 1.0;
    const QuadratureRule jacobi = gauss_jacobi_unit(nodes, beta);
    const QuadratureRule legendre = gauss_jacobi_unit(nodes, 0.0);
    const Grid& grid = hw.grid();
    std::vector<double> q(grid.size());

#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double y = grid.nodes[i];
        const double s1 = std::min(1.0, 1.0 / y);
        double sum = 0.0;
        for (std::size_t k = 0; k < jacobi.nodes.size(); ++k) {
            sum += jacobi.weights[k] * interpolate(hw, y * s1 * jacobi.nodes[k]);
        }
        sum *= std::pow(s1, beta + 1.0);
        for (double lo = s1; lo < 1.0;) {
            const double hi = std::min(1.0, kPanelGrowth * lo);
            double panel = 0.0;
            for (std::size_t k = 0; k < legendre.nodes.size(); ++k) {
                const double s = lo + (hi - lo) * legendre.nodes[k];
                panel += legendre.weights[k] * std::pow(s, beta) * interpolate(hw, y * s);
            }
            sum += (hi - lo) * panel;
            lo = hi;
        }
        q[i] = sum / alpha;
    }
    // Q(0) = HW(0); Q'(0) = HW'(0) / (alpha (beta + 2)) = HW'(0) / (1 + alpha).
    return GridFunction(hw.grid_ptr(), std::move(q), hw.value_at_zero(),
                        hw.slope_at_zero() / (1.0 + alpha));
}

GridFunction residual_Phi(const GridFunction& omega, double lambda, double a, double alpha,
                          int quadrature_nodes) {
    require_alpha(alpha);
    if (std::abs(omega.value_at_zero()) > 1e-12 * std::max(1.0, omega.max_abs())) {
        throw PreconditionError("residual_Phi: requires Omega(0) = 0");
    }
    const GridFunction transport = differentiate(omega, 1).times_y();
    const GridFunction hw = alpha * apply_fractional_hilbert(omega, 1.0 / alpha);
    GridFunction phi = (1.0 + lambda) * transport;
    if (a != 0.0) {
        const GridFunction q = compute_velocity_ratio(hw, alpha, quadrature_nodes);
        phi += (a * alpha) * (q * transport);
    }
    return phi + (omega - hw * omega);
}

namespace {

GridPtr grid_for(double alpha, const SolverConfig& config) {
    return make_grid(alpha, config.grid_n, config.y_min, config.y_max);
}

bool same_grid(const Grid& g, double alpha, const SolverConfig& config) {
    return g.alpha == alpha && g.size() == config.grid_n && g.y_min == config.y_min &&
           g.y_max == config.y_max;
}

ProfileSolution iterate(double a, const BasePoint& base, const SolverConfig& config,
                        GridFunction omega, double lambda) {
    const double alpha = base.alpha;
    ProfileSolution out;
    out.alpha = alpha;
    out.a = a;
    try {
        for (int it = 0;; ++it) {
            const GridFunction phi = residual_Phi(omega, lambda, a, alpha, config.quadrature_nodes);
            const double res = weighted_lp_norm(phi, 2.0, 0.0);
            out.history.push_back(res);
            out.iterations = it;
            if (!std::isfinite(res)) {
                out.status = SolveStatus::numerical_failure;
                out.message = "non-finite residual";
                break;
            }
            if (res <= config.tolerance) {
                out.status = SolveStatus::converged;
                break;
            }
            if (it == config.max_iterations) {
                out.status = SolveStatus::max_iterations;
                out.message = "no convergence within the iteration limit";
                break;
            }
            const BorderedSolution step = solve_bordered(phi, base, false);
            omega -= step.v;
            lambda -= step.mu;
        }
    } catch (const std::exception& e) {
        out.status = SolveStatus::numerical_failure;
        out.message = e.what();
    }
    out.omega = std::move(omega);
    out.lambda = lambda;
    out.residual_l2 = out.history.empty() ? NAN : out.history.back();
    return out;
}

GridFunction base_omega(const BasePoint& base) { return (1.0 / base.alpha) * base.exact.w; }

}  // namespace

ProfileSolution solve_profile(double a, double alpha, const SolverConfig& config,
                              const std::optional<ProfileSolution>& warm_start) {
    require_alpha(alpha);
    config.validate();
    if (!std::isfinite(a)) throw ParameterError("solve_profile: a must be finite");
    const BasePoint base = make_base_point(alpha, grid_for(alpha, config));
    if (warm_start && warm_start->alpha == alpha && warm_start->omega.size() > 0 &&
        same_grid(warm_start->omega.grid(), alpha, config)) {
        return iterate(a, base, config, warm_start->omega, warm_start->lambda);
    }
    return iterate(a, base, config, base_omega(base), 0.0);
}

std::vector<ProfileSolution> continuation(const std::vector<double>& a_targets, double alpha,
                                          const SolverConfig& config) {
    require_alpha(alpha);
    config.validate();
    for (std::size_t i = 1; i < a_targets.size(); ++i) {
        if (std::abs(a_targets[i]) < std::abs(a_targets[i - 1])) {
            throw ParameterError("continuation: targets must be sorted by |a|");
        }
    }
    const BasePoint base = make_base_point(alpha, grid_for(alpha, config));
    ProfileSolution start;
    start.alpha = alpha;
    start.omega = base_omega(base);
    ProfileSolution positive = start;
    ProfileSolution negative = start;

    std::vector<ProfileSolution> out;
    for (double target : a_targets) {
        if (!std::isfinite(target)) throw ParameterError("continuation: non-finite target");
        ProfileSolution& branch = target < 0.0 ? negative : positive;
        const double from = branch.a * alpha;
        const double to = target * alpha;
        const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(to - from) / config.step - 1e-9)));
        for (int k = 1; k <= steps; ++k) {
            const double a_k = k == steps ? target : (from + (to - from) * k / steps) / alpha;
            ProfileSolution next = iterate(a_k, base, config, branch.omega, branch.lambda);
            if (!next.ok()) {
                out.push_back(std::move(next));
                return out;
            }
            branch = std::move(next);
        }
        out.push_back(branch);
    }
    return out;
}

LambdaFit fit_lambda(const std::vector<ProfileSolution>& solutions, int degree) {
    if (degree < 1) throw ParameterError("fit_lambda: degree must be >= 1");
    std::vector<std::pair<double, double>> pts;
    LambdaFit fit;
    for (const auto& s : solutions) {
        if (!s.ok()) continue;
        pts.emplace_back(s.a, s.lambda);
        fit.max_abs_lambda = std::max(fit.max_abs_lambda, std::abs(s.lambda));
    }
    double a_scale = 0.0;
    for (const auto& [a, l] : pts) a_scale = std::max(a_scale, std::abs(a));
    if (a_scale == 0.0) {
        fit.coefficients.assign(static_cast<std::size_t>(degree), 0.0);
        return fit;
    }
    // Unknowns p_k a_scale^k keep the columns of comparable size.
    Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), degree);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double u = pts[i].first / a_scale;
        for (int k = 0; k < degree; ++k) m(static_cast<Eigen::Index>(i), k) = std::pow(u, k + 1);
        rhs(static_cast<Eigen::Index>(i)) = pts[i].second;
    }
    const Eigen::VectorXd p = m.completeOrthogonalDecomposition().solve(rhs);
    for (int k = 0; k < degree; ++k) fit.coefficients.push_back(p(k) / std::pow(a_scale, k + 1));
    const Eigen::VectorXd err = m * p - rhs;
    fit.residual = err.cwiseAbs().maxCoeff();
    return fit;
}

}  // namespace selfsim
