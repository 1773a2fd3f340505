#pragma once

// Structural checks on computed solutions and the epsilon -> 0 sweep.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halfgl/domain.hpp"
#include "halfgl/energy.hpp"
#include "halfgl/extension.hpp"
#include "halfgl/halfharmonic.hpp"
#include "halfgl/parallel.hpp"
#include "halfgl/solver.hpp"

namespace halfgl {

struct MonotonicityTrace {
    Point center{0.0, 0.0};
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<std::string> warnings;

    /// Indices i with values[i+1] < values[i] - slack * max(values).
    std::vector<std::size_t> violations(double slack = 0.02) const {
        double scale = 0.0;
        for (double v : values) scale = std::max(scale, std::abs(v));
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i + 1 < values.size(); ++i)
            if (values[i + 1] < values[i] - slack * scale) out.push_back(i);
        return out;
    }
    bool monotone(double slack = 0.02) const { return violations(slack).empty(); }
};

/// r^{1-n} E_eps(u, B_r^+(x0)) at the given radii.
inline MonotonicityTrace monotonicity_trace(const ExtensionField& u, const WindowDomain& omega, double eps, Point x0,
                                            std::vector<double> radii) {
    const GridSpec& g = u.base();
    HALFGL_REQUIRE(omega.grid() == g, "monotonicity_trace: window and slab use different grids");
    HALFGL_REQUIRE(!radii.empty(), "monotonicity_trace: no radii");
    const double reach = omega.half_width() - std::hypot(x0[0], x0[1]);
    HALFGL_REQUIRE(reach > 0.0, "monotonicity_trace: center outside the window");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        HALFGL_REQUIRE(radii[i] > 0.0, "monotonicity_trace: radii must be positive");
        HALFGL_REQUIRE(i == 0 || radii[i] > radii[i - 1], "monotonicity_trace: radii must increase strictly");
        HALFGL_REQUIRE(radii[i] < reach, "monotonicity_trace: radius " + std::to_string(radii[i]) +
                                             " reaches the window boundary (distance " + std::to_string(reach) + ")");
    }
    MonotonicityTrace tr;
    tr.center = x0;
    tr.radii = std::move(radii);
    tr.values.resize(tr.radii.size());
    parallel_for(tr.radii.size(), [&](std::size_t i) {
        const double r = tr.radii[i];
        tr.values[i] = std::pow(r, 1 - g.n) * boundary_gl_energy(u, HalfBall{x0, r}, eps);
    });
    for (double r : tr.radii)
        if (r < 4.0 * g.dx()) tr.warnings.push_back("radius " + std::to_string(r) + " below 4 dx; quadrature noise likely");
    return tr;
}

struct ClearingOutReport {
    double eta = 0.0;
    double radius = 0.0;
    std::size_t balls_checked = 0;
    std::size_t balls_applicable = 0;
    std::vector<Point> violations;
    double min_modulus = 1.0;  // over the applicable half-radius balls

    bool applicable() const { return balls_applicable > 0; }
    bool pass() const { return violations.empty(); }
};

/// For balls B_R^+(x0), x0 on a floor-node lattice of omega with D_R inside omega,
/// whose rescaled energy R^{1-n} E_eps is at most eta, checks |u| >= 1/2 on
/// the closed half-ball of radius R/2.
inline ClearingOutReport clearing_out_check(const ExtensionField& u, const WindowDomain& omega, double eps,
                                            double eta = 0.05, double radius = 1.0, std::size_t max_balls = 64) {
    const GridSpec& g = u.base();
    HALFGL_REQUIRE(eps > 0.0 && eta > 0.0 && radius > 0.0, "clearing_out_check: eps, eta and radius must be positive");
    HALFGL_REQUIRE(radius <= u.hgrid().top(), "clearing_out_check: radius exceeds the slab height");
    ClearingOutReport rep;
    rep.eta = eta;
    rep.radius = radius;
    std::vector<std::size_t> centers;
    for (std::size_t k : omega.nodes()) {
        const Point p = g.point(k);
        if (std::hypot(p[0], p[1]) + radius <= omega.half_width()) centers.push_back(k);
    }
    if (centers.empty()) return rep;
    const std::size_t stride = (centers.size() + max_balls - 1) / max_balls;
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < centers.size(); i += stride) picked.push_back(centers[i]);
    rep.balls_checked = picked.size();

    std::vector<double> energy(picked.size()), low(picked.size(), 1e300);
    parallel_for(picked.size(), [&](std::size_t i) {
        const Point x0 = g.point(picked[i]);
        energy[i] = std::pow(radius, 1 - g.n) * boundary_gl_energy(u, HalfBall{x0, radius}, eps);
        if (energy[i] > eta) return;
        const double half = 0.5 * radius;
        for (std::size_t j = 0; j < u.hgrid().layers() && u.hgrid().height(j) <= half; ++j) {
            const double t = u.hgrid().height(j);
            for (std::size_t k = 0; k < g.nodes(); ++k) {
                const Point p = g.point(k);
                const double d0 = p[0] - x0[0], d1 = p[1] - x0[1];
                if (d0 * d0 + d1 * d1 + t * t > half * half) continue;
                low[i] = std::min(low[i], std::sqrt(u.norm2_at(j, k)));
            }
        }
    });
    for (std::size_t i = 0; i < picked.size(); ++i) {
        if (energy[i] > eta) continue;
        ++rep.balls_applicable;
        rep.min_modulus = std::min(rep.min_modulus, low[i]);
        if (low[i] < 0.5) rep.violations.push_back(g.point(picked[i]));
    }
    return rep;
}

struct EpsRegularityReport {
    bool applicable = false;
    double energy = 0.0;
    double threshold = 0.0;
    double sup_grad2 = 0.0;
    double sup_potential = 0.0;
    double c_hat = 0.0;
    double c0 = 0.0;

    bool pass() const { return !applicable || c_hat <= c0; }
};

/// If E_eps(u, B_R^+(x0)) <= eta0 R^{n-1}, reports C = (sup |grad u|^2 on B_{R/4}^+
/// + sup (1-|u|^2)^2/eps^2 on D_{R/4}) R^2 / eta0.
inline EpsRegularityReport eps_regularity_check(const ExtensionField& u, double eps, double R, Point x0,
                                                double eta0 = 0.05, double c0 = 100.0) {
    HALFGL_REQUIRE(eps > 0.0 && R > 0.0 && eta0 > 0.0, "eps_regularity_check: eps, R and eta0 must be positive");
    HALFGL_REQUIRE(eps <= R, "eps_regularity_check: requires eps <= R, got eps=" + std::to_string(eps) +
                                 " R=" + std::to_string(R));
    const GridSpec& g = u.base();
    EpsRegularityReport rep;
    rep.c0 = c0;
    rep.threshold = eta0 * std::pow(R, g.n - 1);
    rep.energy = boundary_gl_energy(u, HalfBall{x0, R}, eps);
    rep.applicable = rep.energy <= rep.threshold;
    if (!rep.applicable) return rep;
    const double q = 0.25 * R;
    for (std::size_t j = 0; j < u.hgrid().layers() && u.hgrid().height(j) <= q; ++j) {
        const double t = u.hgrid().height(j);
        for (std::size_t k = 0; k < g.nodes(); ++k) {
            const Point p = g.point(k);
            const double d0 = p[0] - x0[0], d1 = p[1] - x0[1];
            if (d0 * d0 + d1 * d1 + t * t > q * q) continue;
            const auto grad = node_gradient(u, j, k);
            double s = 0.0;
            for (const auto& axis : grad)
                for (double x : axis) s += x * x;
            rep.sup_grad2 = std::max(rep.sup_grad2, s);
            if (j == 0) {
                const double d = (1.0 - u.norm2_at(0, k)) / eps;
                rep.sup_potential = std::max(rep.sup_potential, d * d);
            }
        }
    }
    rep.c_hat = (rep.sup_grad2 + rep.sup_potential) * R * R / eta0;
    return rep;
}

struct DefectReport {
    std::vector<std::size_t> points;
    std::vector<double> densities;
    double eta = 0.0;
    double threshold = 0.0;
    double radius = 0.0;
    std::vector<double> epsilons;
    std::vector<Field> density_fields;
    /// Largest density estimate per epsilon.
    std::vector<double> peak;
};

/// Volume of the unit ball in R^k for k = 0, 1.
inline double unit_ball_volume(int k) { return k == 0 ? 1.0 : 2.0; }

namespace detail {

/// mu(B_r(x)) / (omega_{n-1} r^{n-1}) for a density on omega.
inline double ball_density(const Field& e, const WindowDomain& omega, std::size_t x, double r) {
    const GridSpec& g = e.grid();
    const Point c = g.point(x);
    std::vector<double> vals;
    for (std::size_t y : omega.nodes()) {
        const Point p = g.point(y);
        if (std::hypot(p[0] - c[0], p[1] - c[1]) < r) vals.push_back(e(y, 0));
    }
    return pairwise_sum(vals) * g.cell() / (unit_ball_volume(g.n - 1) * std::pow(r, g.n - 1));
}

}  // namespace detail

/// Concentration detection from per-epsilon energy densities. The density at
/// a node is extrapolated to r -> 0 from the radii r0 and 2 r0 (r0 = 4 dx),
/// which removes the part growing linearly in r that a bounded density has.
inline DefectReport defect_detect_density(const std::vector<std::pair<double, Field>>& sweep, const WindowDomain& omega,
                                          double eta = 0.05) {
    HALFGL_REQUIRE(sweep.size() >= 3, "defect_detect: need at least three epsilon samples");
    for (std::size_t i = 1; i < sweep.size(); ++i)
        HALFGL_REQUIRE(sweep[i].first < sweep[i - 1].first, "defect_detect: epsilon list must decrease strictly");
    HALFGL_REQUIRE(eta > 0.0, "defect_detect: eta must be positive");
    const GridSpec& g = omega.grid();
    DefectReport rep;
    rep.eta = eta;
    rep.threshold = eta / unit_ball_volume(g.n - 1);
    rep.radius = 4.0 * g.dx();
    const auto nodes = omega.nodes();
    std::vector<double> last(nodes.size());
    for (const auto& [eps, e] : sweep) {
        HALFGL_REQUIRE(e.grid() == g && e.components() == 1, "defect_detect: density fields must be scalar on the window grid");
        std::vector<double> theta(nodes.size(), 0.0);
        parallel_for(nodes.size(), [&](std::size_t i) {
            // a ball cut by the window edge fakes a concentration there
            const Point p = g.point(nodes[i]);
            if (std::hypot(p[0], p[1]) + 2.0 * rep.radius >= omega.half_width()) return;
            const double a = detail::ball_density(e, omega, nodes[i], rep.radius);
            const double b = detail::ball_density(e, omega, nodes[i], 2.0 * rep.radius);
            theta[i] = std::max(0.0, 2.0 * a - b);
        });
        rep.epsilons.push_back(eps);
        rep.density_fields.push_back(e);
        rep.peak.push_back(theta.empty() ? 0.0 : *std::max_element(theta.begin(), theta.end()));
        last = std::move(theta);
    }
    // One representative per cluster of above-threshold nodes: the node with
    // the largest raw density inside the cluster.
    const Field& e = sweep.back().second;
    std::vector<std::size_t> hot;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (last[i] >= rep.threshold) hot.push_back(i);
    std::vector<bool> used(hot.size(), false);
    for (std::size_t s = 0; s < hot.size(); ++s) {
        if (used[s]) continue;
        std::vector<std::size_t> cluster{s};
        used[s] = true;
        for (std::size_t q = 0; q < cluster.size(); ++q) {
            const Point p = g.point(nodes[hot[cluster[q]]]);
            for (std::size_t t = 0; t < hot.size(); ++t) {
                if (used[t]) continue;
                const Point r = g.point(nodes[hot[t]]);
                if (std::hypot(p[0] - r[0], p[1] - r[1]) < 1.5 * g.dx()) {
                    used[t] = true;
                    cluster.push_back(t);
                }
            }
        }
        std::size_t best = hot[cluster.front()];
        for (std::size_t c : cluster)
            if (e(nodes[hot[c]], 0) > e(nodes[best], 0)) best = hot[c];
        rep.points.push_back(nodes[best]);
        rep.densities.push_back(last[best]);
    }
    return rep;
}

/// GL energy density e(v, omega) + (1/4 eps)(1 - |v|^2)^2 on omega.
inline Field gl_density(const Field& v, const WindowDomain& omega, double eps, const KernelTable& table) {
    Field e = nonlocal_density(v, omega, table);
    for (std::size_t k = 0; k < v.nodes(); ++k) {
        if (!omega.contains(k)) {
            e(k, 0) = 0.0;
            continue;
        }
        const double d = 1.0 - v.norm2_at(k);
        e(k, 0) += d * d / (4.0 * eps);
    }
    return e;
}

inline DefectReport defect_detect(const std::vector<std::pair<double, Field>>& sweep, const WindowDomain& omega,
                                  double eta = 0.05, OperatorKind op = OperatorKind::spectral) {
    HALFGL_REQUIRE(sweep.size() >= 3, "defect_detect: need at least three epsilon samples");
    const KernelTable table = KernelTable::make(omega.grid(), op);
    std::vector<std::pair<double, Field>> dens(sweep.size());
    parallel_for(sweep.size(), [&](std::size_t i) {
        dens[i] = {sweep[i].first, gl_density(sweep[i].second, omega, sweep[i].first, table)};
    });
    return defect_detect_density(dens, omega, eta);
}

struct SweepEntry {
    double epsilon = 0.0;
    double total = 0.0;
    double potential_l1_k = 0.0;
    double multiplier_l2_err = 0.0;
    double step_l2 = 0.0;  // distance to the previous solution; 0 for the first
    int iterations = 0;
    bool converged = false;
    Field v;
    Field multiplier;
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    Field limit_multiplier;
    DefectReport defects;
};

/// Warm-started solves down the epsilon list, then per-epsilon diagnostics on
/// the compact K = {|x| <= a/2}.
inline SweepReport epsilon_sweep(const Field& g, const WindowDomain& omega, const std::vector<double>& eps_list,
                                 SolverConfig cfg, double eta = 0.05) {
    HALFGL_REQUIRE(!eps_list.empty(), "epsilon_sweep: empty epsilon list");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        HALFGL_REQUIRE(eps_list[i] < eps_list[i - 1], "epsilon_sweep: epsilon list must decrease strictly");
    const GridSpec& grid = g.grid();
    SweepReport rep;
    std::optional<Field> warm;
    for (double eps : eps_list) {
        cfg.epsilon = eps;
        SolveResult r = minimize_gl(g, omega, cfg, warm);
        SweepEntry e;
        e.epsilon = eps;
        e.iterations = r.iterations;
        e.converged = r.converged;
        e.v = std::move(r.v);
        warm = e.v;
        rep.entries.push_back(std::move(e));
    }

    const KernelTable table = KernelTable::make(grid, cfg.op);
    std::vector<std::size_t> K;
    for (std::size_t k : omega.nodes()) {
        const Point p = grid.point(k);
        if (std::hypot(p[0], p[1]) <= 0.5 * omega.half_width()) K.push_back(k);
    }
    rep.limit_multiplier = el_multiplier_field(project_sphere(rep.entries.back().v), table);
    const Field& lam = rep.limit_multiplier;
    parallel_for(rep.entries.size(), [&](std::size_t i) {
        SweepEntry& e = rep.entries[i];
        e.total = gl_energy(e.v, omega, e.epsilon, table).total;
        e.multiplier = Field(grid, 1);
        std::vector<double> pot, diff, ref;
        for (std::size_t k : omega.nodes()) e.multiplier(k, 0) = (1.0 - e.v.norm2_at(k)) / e.epsilon;
        for (std::size_t k : K) {
            const double d = 1.0 - e.v.norm2_at(k);
            pot.push_back(d * d / e.epsilon);
            const double m = e.multiplier(k, 0) - lam(k, 0);
            diff.push_back(m * m);
            ref.push_back(lam(k, 0) * lam(k, 0));
        }
        e.potential_l1_k = pairwise_sum(pot) * grid.cell();
        const double rn = pairwise_sum(ref);
        e.multiplier_l2_err = rn > 0.0 ? std::sqrt(pairwise_sum(diff) / rn) : std::sqrt(pairwise_sum(diff) * grid.cell());
        if (i > 0) {
            std::vector<double> d2;
            for (std::size_t k : omega.nodes())
                for (int c = 0; c < g.components(); ++c) {
                    const double d = e.v(k, c) - rep.entries[i - 1].v(k, c);
                    d2.push_back(d * d);
                }
            e.step_l2 = std::sqrt(pairwise_sum(d2) * grid.cell());
        }
    });
    if (rep.entries.size() >= 3) {
        std::vector<std::pair<double, Field>> sweep;
        for (const auto& e : rep.entries) sweep.emplace_back(e.epsilon, e.v);
        rep.defects = defect_detect(sweep, omega, eta, cfg.op);
    }
    return rep;
}

}  // namespace halfgl
