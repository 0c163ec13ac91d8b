#include "selfsim/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "selfsim/errors.hpp"

namespace selfsim {

EvolutionGridPtr make_evolution_grid(std::size_t n) {
    if (n < 8) throw ParameterError("make_evolution_grid: need n >= 8");
    auto g = std::make_shared<EvolutionGrid>();
    g->n = n;
    for (std::size_t j = 1; j < n; ++j) {
        const double th = static_cast<double>(j) / static_cast<double>(n);
        g->theta.push_back(th);
        g->x.push_back(std::tan(th * std::numbers::pi / 2.0));
    }
    return g;
}

EvolutionHilbert::EvolutionHilbert(EvolutionGridPtr grid) : grid_(std::move(grid)) {
    if (!grid_) throw ParameterError("EvolutionHilbert: null grid");
    const std::size_t m = grid_->size();
    const double w = 1.0 / static_cast<double>(grid_->n);
    const double pi = std::numbers::pi;
    kernel_.assign(m * m, 0.0);
    // Alternating cot sum on the circle x = tan(psi/2); the odd extension folds the
    // mirrored node into the second cotangent.
    for (std::size_t i = 0; i < m; ++i) {
        const double phi = pi * grid_->theta[i];
        for (std::size_t j = (i + 1) % 2; j < m; j += 2) {
            const double psi = pi * grid_->theta[j];
            kernel_[i * m + j] = w * (1.0 / std::tan((phi - psi) / 2.0) - 1.0 / std::tan((phi + psi) / 2.0));
        }
    }
}

namespace {

// int_0^1 w(x) x dtheta, the value at x = inf of the circle transform. Trapezoid on the
// nodes plus the generalized Euler-Maclaurin term -zeta(1-q) b' h^q for each tail piece
// b x^-q, where x ~ (2/pi)/(1-theta) turns it into b (2/pi)^(1-q) (1-theta)^(q-1).
double infinity_constant(const EvolutionGrid& g, const std::vector<double>& w, double decay) {
    const std::size_t m = g.size();
    const double h = 1.0 / static_cast<double>(g.n);
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) sum += w[j] * g.x[j];
    sum *= h;

    const std::size_t l = m - 1;
    const std::size_t k = m - 4;
    const double p = decay;
    const double xl = g.x[l];
    const double xk = g.x[k];
    // w = b1 x^-p + b2 x^-2p through the last node and the node at a quarter of its x.
    const double a11 = std::pow(xl, -p), a12 = std::pow(xl, -2.0 * p);
    const double a21 = std::pow(xk, -p), a22 = std::pow(xk, -2.0 * p);
    const double det = a11 * a22 - a12 * a21;
    if (det == 0.0 || !std::isfinite(det)) return sum;
    const double b1 = (w[l] * a22 - a12 * w[k]) / det;
    const double b2 = (a11 * w[k] - a21 * w[l]) / det;
    for (const auto& [b, q] : {std::pair{b1, p}, std::pair{b2, 2.0 * p}}) {
        const double bp = b * std::pow(2.0 / std::numbers::pi, 1.0 - q);
        sum -= std::riemann_zeta(1.0 - q) * bp * std::pow(h, q);
    }
    return sum;
}

}  // namespace

std::vector<double> EvolutionHilbert::apply(const std::vector<double>& w, double decay) const {
    const std::size_t m = grid_->size();
    if (w.size() != m) throw ParameterError("EvolutionHilbert: size mismatch");
    if (!(decay > 0.0)) throw ParameterError("EvolutionHilbert: decay exponent must be positive");
    const double c = infinity_constant(*grid_, w, decay);
    std::vector<double> out(m);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = kernel_.data() + i * m;
        double s = 0.0;
        for (std::size_t j = (i + 1) % 2; j < m; j += 2) s += row[j] * w[j];
        out[i] = s - c;
    }
    return out;
}

void EvolveConfig::validate() const {
    if (n < 8) throw ParameterError("evolve: n must be >= 8");
    if (!(dt_max > 0.0)) throw ParameterError("evolve: dt_max must be positive");
    if (snapshot_times.empty() && !(snapshot_interval > 0.0)) {
        throw ParameterError("evolve: snapshot interval must be positive");
    }
    if (!(growth_limit > 1.0)) throw ParameterError("evolve: growth limit must exceed 1");
    if (!(min_dt > 0.0)) throw ParameterError("evolve: min_dt must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("evolve: alpha must lie in (0, 1]");
    if (!(decay > 0.0)) throw ParameterError("evolve: decay exponent must be positive");
}

namespace {

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct Rhs {
    const EvolutionHilbert& hilbert;
    double a;
    double decay;
    std::vector<double> hw, u, wx;

    // Fills hw, u, wx for w and returns dw/dt.
    std::vector<double> operator()(const std::vector<double>& w) {
        const EvolutionGrid& g = hilbert.grid();
        const std::size_t m = g.size();
        hw = hilbert.apply(w, decay);
        u.assign(m, 0.0);
        wx.assign(m, 0.0);
        if (a != 0.0) {
            // u(0) = 0; Hw is even, so the first segment uses the nearest value.
            u[0] = g.x[0] * hw[0];
            for (std::size_t j = 1; j < m; ++j) u[j] = u[j - 1] + 0.5 * (g.x[j] - g.x[j - 1]) * (hw[j] + hw[j - 1]);
            // Differences in theta; the node nearest 0 is one-sided so that a cusp of the
            // odd extension at 0 is never straddled. w = 0 at theta = 1.
            const double h = 1.0 / static_cast<double>(g.n);
            for (std::size_t j = 0; j < m; ++j) {
                double d;
                if (j == 0) {
                    d = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h);
                } else if (j == m - 1) {
                    d = -w[j - 1] / (2.0 * h);
                } else if (j == 1 || j == m - 2) {
                    d = (w[j + 1] - w[j - 1]) / (2.0 * h);
                } else {
                    d = (w[j - 2] - 8.0 * w[j - 1] + 8.0 * w[j + 1] - w[j + 2]) / (12.0 * h);
                }
                wx[j] = d / (0.5 * std::numbers::pi * (1.0 + g.x[j] * g.x[j]));
            }
        }
        std::vector<double> out(m);
        for (std::size_t j = 0; j < m; ++j) out[j] = hw[j] * w[j] - a * u[j] * wx[j];
        return out;
    }
};

std::vector<double> schedule(const EvolveConfig& config, double t_end) {
    std::vector<double> times;
    if (!config.snapshot_times.empty()) {
        for (double t : config.snapshot_times) {
            if (t > 0.0 && t <= t_end) times.push_back(t);
        }
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
    } else {
        for (int k = 1;; ++k) {
            const double t = k * config.snapshot_interval;
            if (t > t_end + 1e-12) break;
            times.push_back(std::min(t, t_end));
        }
    }
    if (times.empty() || times.back() < t_end - 1e-12) times.push_back(t_end);
    return times;
}

}  // namespace

Trajectory evolve(EvolutionGridPtr grid, const std::vector<double>& w0, double a, double t_end,
                  const EvolveConfig& config) {
    config.validate();
    if (!grid) throw ParameterError("evolve: null grid");
    if (w0.size() != grid->size()) throw ParameterError("evolve: datum size does not match the grid");
    if (!(t_end > 0.0 && t_end < 1e6)) throw ParameterError("evolve: t_end must be positive");
    for (double v : w0) {
        if (!std::isfinite(v)) throw NumericalError("evolve: non-finite datum");
    }

    const EvolutionHilbert hilbert(grid);
    Rhs rhs{hilbert, a, config.decay, {}, {}, {}};
    const std::size_t m = grid->size();
    const std::vector<double> marks = schedule(config, t_end);

    Trajectory traj;
    traj.grid = grid;
    traj.a = a;
    traj.alpha = config.alpha;
    traj.times.push_back(0.0);
    traj.snapshots.push_back(w0);
    const double sup0 = sup_abs(w0);
    traj.sup_norms.push_back(sup0);
    traj.termination = "t_end";

    std::vector<double> w = w0;
    double t = 0.0;
    std::size_t next = 0;
    auto axpy = [m](const std::vector<double>& x, double s, const std::vector<double>& k) {
        std::vector<double> out(m);
        for (std::size_t j = 0; j < m; ++j) out[j] = x[j] + s * k[j];
        return out;
    };

    while (next < marks.size()) {
        const std::vector<double> k1 = rhs(w);
        double dt = config.dt_max;
        const double hmax = sup_abs(rhs.hw);
        if (hmax > 0.0) dt = std::min(dt, 0.2 / hmax);
        if (a != 0.0) {
            for (std::size_t j = 0; j < m; ++j) {
                const double speed = std::abs(a * rhs.u[j]);
                const double dx = grid->x[j] - (j == 0 ? 0.0 : grid->x[j - 1]);
                if (speed > 0.0) dt = std::min(dt, 0.5 * dx / speed);
            }
        }
        if (dt < config.min_dt) {
            traj.reached_end = false;
            traj.termination = "step_underflow";
            break;
        }
        const bool lands = t + dt >= marks[next] - 1e-13;
        if (lands) dt = marks[next] - t;

        const std::vector<double> k2 = rhs(axpy(w, 0.5 * dt, k1));
        const std::vector<double> k3 = rhs(axpy(w, 0.5 * dt, k2));
        const std::vector<double> k4 = rhs(axpy(w, dt, k3));
        for (std::size_t j = 0; j < m; ++j) w[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        t = lands ? marks[next] : t + dt;
        ++traj.steps;

        const double sup = sup_abs(w);
        const bool blown = !std::isfinite(sup) || (sup0 > 0.0 && sup > config.growth_limit * sup0);
        if (lands || blown) {
            traj.times.push_back(t);
            traj.snapshots.push_back(w);
            traj.sup_norms.push_back(sup);
        }
        if (blown) {
            traj.reached_end = false;
            traj.termination = "growth_limit";
            break;
        }
        if (lands) ++next;
    }
    return traj;
}

std::vector<double> sample_on(const EvolutionGrid& grid, const std::function<double(double)>& w) {
    std::vector<double> out(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) out[j] = w(grid.x[j]);
    return out;
}

double profile_decay(const ProfileSolution& profile) { return profile.alpha / (1.0 + profile.lambda); }

double profile_value(const ProfileSolution& profile, double x) {
    if (x == 0.0) return 0.0;
    const double sign = x > 0.0 ? 1.0 : -1.0;
    const double y = std::pow(std::abs(x), profile.alpha);
    const Grid& g = profile.omega.grid();
    double omega;
    if (y <= g.y_max) {
        omega = interpolate(profile.omega, y);
    } else {
        omega = profile.omega[g.size() - 1] * std::pow(g.y_max / y, 1.0 / (1.0 + profile.lambda));
    }
    return sign * profile.alpha * omega;
}

CollapseReport check_self_similar_collapse(const Trajectory& traj, const ProfileSolution& profile) {
    if (traj.alpha != profile.alpha) {
        throw ParameterError("check_self_similar_collapse: trajectory and profile alpha differ");
    }
    if (traj.snapshots.empty()) throw ParameterError("check_self_similar_collapse: empty trajectory");
    CollapseReport report;
    const EvolutionGrid& g = *traj.grid;
    const double norm = sup_abs(traj.snapshots.front());
    report.degenerate = norm == 0.0;
    const double beta = (1.0 + profile.lambda) / profile.alpha;
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        const double t = traj.times[s];
        report.times.push_back(t);
        if (report.degenerate) {
            report.deviations.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double stretch = std::pow(1.0 - t, -beta);
        double dev = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double predicted = profile_value(profile, g.x[j] * stretch);
            dev = std::max(dev, std::abs((1.0 - t) * traj.snapshots[s][j] - predicted));
        }
        report.deviations.push_back(dev / norm);
    }
    return report;
}

BlowupEstimate detect_blowup(const Trajectory& traj) {
    BlowupEstimate est;
    const std::size_t m = traj.sup_norms.size();
    if (m < 10) {
        est.reason = "fewer than 10 snapshots";
        return est;
    }
    for (std::size_t i = 1; i < m; ++i) {
        if (!(traj.sup_norms[i] > traj.sup_norms[i - 1])) {
            est.reason = "sup norm not increasing";
            return est;
        }
    }
    const std::size_t first = m / 2;
    const double count = static_cast<double>(m - first);
    double st = 0.0, sz = 0.0;
    for (std::size_t i = first; i < m; ++i) {
        st += traj.times[i];
        sz += 1.0 / traj.sup_norms[i];
    }
    const double tm = st / count;
    const double zm = sz / count;
    double stt = 0.0, stz = 0.0, szz = 0.0;
    for (std::size_t i = first; i < m; ++i) {
        const double dt = traj.times[i] - tm;
        const double dz = 1.0 / traj.sup_norms[i] - zm;
        stt += dt * dt;
        stz += dt * dz;
        szz += dz * dz;
    }
    const double slope = stz / stt;
    if (!(slope < 0.0)) {
        est.reason = "1/sup norm not decreasing";
        return est;
    }
    const double intercept = zm - slope * tm;
    est.t_star = -intercept / slope;
    double ss_res = 0.0;
    for (std::size_t i = first; i < m; ++i) {
        const double r = 1.0 / traj.sup_norms[i] - (intercept + slope * traj.times[i]);
        ss_res += r * r;
    }
    est.fit_quality = szz > 0.0 ? 1.0 - ss_res / szz : 1.0;
    est.conclusive = std::isfinite(est.t_star);
    if (!est.conclusive) est.reason = "non-finite zero crossing";
    return est;
}

}  // namespace selfsim
