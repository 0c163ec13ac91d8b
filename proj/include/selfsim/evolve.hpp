#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "selfsim/solver.hpp"

namespace selfsim {

/// Half-line nodes x_j = tan(theta_j pi / 2), theta_j = j/n for j = 1 .. n-1. The odd
/// extension is implied; theta = 0 and theta = 1 (x = 0 and x = inf) carry w = 0.
struct EvolutionGrid {
    std::size_t n = 0;
    std::vector<double> theta;
    std::vector<double> x;

    std::size_t size() const { return x.size(); }
};

using EvolutionGridPtr = std::shared_ptr<const EvolutionGrid>;

inline constexpr std::size_t kDefaultEvolutionNodes = 2048;

EvolutionGridPtr make_evolution_grid(std::size_t n = kDefaultEvolutionNodes);

/// Hilbert transform of the odd extension of w sampled on the grid, (1/pi) PV int w(y)/(x-y) dy.
/// `decay` is the exponent p of the tail w ~ x^-p, used for the endpoint correction of the
/// constant term; p = 1 for data with 1/x tails.
class EvolutionHilbert {
public:
    explicit EvolutionHilbert(EvolutionGridPtr grid);
    std::vector<double> apply(const std::vector<double>& w, double decay = 1.0) const;
    const EvolutionGrid& grid() const { return *grid_; }

private:
    EvolutionGridPtr grid_;
    std::vector<double> kernel_;  // row-major (n-1)^2, zero where i - j is even
};

struct EvolveConfig {
    std::size_t n = kDefaultEvolutionNodes;
    double dt_max = 0.005;
    double snapshot_interval = 0.05;
    std::vector<double> snapshot_times;  // overrides the interval when non-empty
    double growth_limit = 1e3;           // stop when sup|w| exceeds this multiple of sup|w0|
    double min_dt = 1e-10;
    double alpha = 1.0;                  // Hoelder exponent of the datum at 0 (metadata)
    double decay = 1.0;                  // tail exponent p of the datum, w ~ x^-p

    void validate() const;
};

struct Trajectory {
    EvolutionGridPtr grid;
    double a = 0.0;
    double alpha = 1.0;
    std::vector<double> times;
    std::vector<std::vector<double>> snapshots;
    std::vector<double> sup_norms;
    bool reached_end = true;
    std::string termination;  // "t_end", "growth_limit" or "step_underflow"
    std::size_t steps = 0;
};

/// Method of lines for w_t + a u w_x = u_x w, u_x = Hw, u(0) = 0, with classical RK4 and
/// dt = min(dt_max, 0.5 min dx/|a u|, 0.2/max|Hw|), shortened to land on snapshot times.
Trajectory evolve(EvolutionGridPtr grid, const std::vector<double>& w0, double a, double t_end,
                  const EvolveConfig& config);

std::vector<double> sample_on(const EvolutionGrid& grid, const std::function<double(double)>& w);

/// Original-variable profile w(x) = alpha Omega(x^alpha) for x > 0. Beyond y_max Omega is
/// continued by its power tail y^-1/(1+lambda).
double profile_value(const ProfileSolution& profile, double x);

/// Tail exponent alpha/(1+lambda) of the original-variable profile.
double profile_decay(const ProfileSolution& profile);

struct CollapseReport {
    std::vector<double> times;
    std::vector<double> deviations;  // sup |(1-t) w(x,t) - w0(x/(1-t)^beta)| / sup|w0|
    bool degenerate = false;         // zero datum
};

/// beta = (1+lambda)/alpha. Probes are the grid nodes whose rescaled point stays on the grid.
CollapseReport check_self_similar_collapse(const Trajectory& traj, const ProfileSolution& profile);

struct BlowupEstimate {
    double t_star = 0.0;
    double fit_quality = 0.0;  // coefficient of determination of 1/sup|w| against t
    bool conclusive = false;
    std::string reason;
};

/// Straight-line fit of 1/sup|w| over the last half of the snapshots; T* is its zero.
BlowupEstimate detect_blowup(const Trajectory& traj);

}  // namespace selfsim
