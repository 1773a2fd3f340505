#pragma once

// Gradient flow for the Ginzburg-Landau energy on a window with the exterior
// held fixed.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "halfgl/domain.hpp"
#include "halfgl/energy.hpp"
#include "halfgl/extension.hpp"
#include "halfgl/fft.hpp"
#include "halfgl/fraclap.hpp"
#include "halfgl/kernel.hpp"
#include "halfgl/parallel.hpp"

namespace halfgl {

enum class Scheme { semi_implicit, explicit_euler };

inline const char* to_string(Scheme s) { return s == Scheme::semi_implicit ? "semi_implicit" : "explicit"; }

struct SolverConfig {
    double epsilon = 0.1;
    double tau = 10.0;
    int max_iters = 20000;
    double tol_residual = 1e-8;
    Scheme scheme = Scheme::semi_implicit;
    OperatorKind op = OperatorKind::spectral;
    unsigned long long seed = 0;
    /// Off only for max-principle experiments with |g| != 1 outside omega.
    bool require_unit_exterior = true;

    void validate() const {
        HALFGL_REQUIRE(epsilon > 0.0, "SolverConfig: epsilon must be positive");
        HALFGL_REQUIRE(tau > 0.0, "SolverConfig: tau must be positive");
        HALFGL_REQUIRE(max_iters >= 1, "SolverConfig: max_iters must be at least 1");
        HALFGL_REQUIRE(tol_residual > 0.0, "SolverConfig: tol_residual must be positive");
    }
};

struct SolveResult {
    Field v;
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<double> energy_trace;
    std::vector<double> residual_trace;
    bool converged = false;
    std::string diagnostic;
};

struct ResidualReport {
    Field r;
    double norm = 0.0;
};

namespace detail {

inline double omega_norm(const Field& f, const WindowDomain& omega) {
    std::vector<double> vals;
    vals.reserve(omega.nodes().size());
    for (std::size_t k : omega.nodes()) vals.push_back(f.norm2_at(k));
    return std::sqrt(pairwise_sum(vals) * f.grid().cell());
}

/// A v - eps^{-1} (1 - |v|^2) v on omega, zero elsewhere; Av supplied.
inline Field gl_gradient(const Field& v, const Field& Av, const WindowDomain& omega, double eps) {
    Field G(v.grid(), v.components());
    for (std::size_t k : omega.nodes()) {
        const double s = (1.0 - v.norm2_at(k)) / eps;
        for (int c = 0; c < v.components(); ++c) G(k, c) = Av(k, c) - s * v(k, c);
    }
    return G;
}

inline double quadratic_form(const Field& v, const Field& Av) {
    std::vector<double> vals(v.nodes());
    for (std::size_t k = 0; k < v.nodes(); ++k) {
        double s = 0.0;
        for (int c = 0; c < v.components(); ++c) s += v(k, c) * Av(k, c);
        vals[k] = s;
    }
    return 0.5 * pairwise_sum(vals) * v.grid().cell();
}

/// (cell/4) sum over exterior pairs of w |g(x) - g(y)|^2; the part of the
/// full-torus quadratic form that the window energy leaves out.
inline double exterior_pair_energy(const Field& g, const WindowDomain& omega, const KernelTable& table) {
    const GridSpec& grid = g.grid();
    std::vector<double> rows(grid.nodes(), 0.0);
    parallel_for(grid.nodes(), [&](std::size_t x) {
        if (omega.contains(x)) return;
        std::vector<double> terms;
        terms.reserve(grid.nodes());
        for (std::size_t y = 0; y < grid.nodes(); ++y) {
            if (y == x || omega.contains(y)) continue;
            terms.push_back(table.weight[grid.offset_between(x, y)] * diff2_at(g, x, y));
        }
        rows[x] = pairwise_sum(terms);
    });
    return 0.25 * pairwise_sum(rows) * grid.cell();
}

inline void require_unit_exterior(const Field& g, const WindowDomain& omega) {
    for (std::size_t k = 0; k < g.nodes(); ++k) {
        if (omega.contains(k)) continue;
        const double r = std::sqrt(g.norm2_at(k));
        if (std::abs(r - 1.0) > 1e-10) {
            throw InvalidArgument("minimize_gl: |g| = " + std::to_string(r) + " outside omega at node " +
                                  std::to_string(k));
        }
    }
}

/// Interpolates g across omega, then projects to the sphere where |v| > 1/2;
/// smaller values are replaced by seeded random unit vectors.
inline Field initial_guess(const Field& g, const WindowDomain& omega, unsigned long long seed) {
    const GridSpec& grid = g.grid();
    const int m = g.components();
    Field v = g;
    const auto nodes = omega.nodes();
    if (grid.n == 1) {
        const std::size_t lo = (nodes.front() + grid.nodes() - 1) % grid.nodes();
        const std::size_t hi = (nodes.back() + 1) % grid.nodes();
        const double span = static_cast<double>(nodes.size() + 1);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double s = static_cast<double>(i + 1) / span;
            for (int c = 0; c < m; ++c) v(nodes[i], c) = (1.0 - s) * g(lo, c) + s * g(hi, c);
        }
    } else {
        // SOR sweeps of the five-point Laplacian, exterior fixed
        for (std::size_t k : nodes)
            for (int c = 0; c < m; ++c) v(k, c) = 0.0;
        const int sweeps = 4 * grid.N;
        for (int it = 0; it < sweeps; ++it) {
            for (std::size_t k : nodes) {
                const auto idx = grid.multi(k);
                const std::size_t nb[4] = {grid.flat(idx[0] - 1, idx[1]), grid.flat(idx[0] + 1, idx[1]),
                                           grid.flat(idx[0], idx[1] - 1), grid.flat(idx[0], idx[1] + 1)};
                for (int c = 0; c < m; ++c) {
                    const double avg = 0.25 * (v(nb[0], c) + v(nb[1], c) + v(nb[2], c) + v(nb[3], c));
                    v(k, c) += 1.8 * (avg - v(k, c));
                }
            }
        }
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k : nodes) {
        double r = std::sqrt(v.norm2_at(k));
        if (r <= 0.5) {
            do {
                for (int c = 0; c < m; ++c) v(k, c) = normal(rng);
                r = std::sqrt(v.norm2_at(k));
            } while (r < 1e-3);
        }
        for (int c = 0; c < m; ++c) v(k, c) /= r;
    }
    return v;
}

/// Solves (alpha + A_{omega omega}) d = rhs on omega by preconditioned CG;
/// the preconditioner is the full-torus inverse (alpha + symbol)^{-1}.
class ImplicitSolve {
public:
    ImplicitSolve(const KernelTable& table, const WindowDomain& omega) : table_(table), omega_(omega) {}

    Field solve(const Field& rhs, double alpha) const {
        const GridSpec& g = rhs.grid();
        const int m = rhs.components();
        Field d(g, m);
        for (int c = 0; c < m; ++c) solve_component(rhs.component(c), d.component(c), alpha);
        return d;
    }

private:
    void apply(std::span<const double> z, std::span<double> out, double alpha, bool inverse) const {
        const GridSpec& g = table_.grid;
        ComplexVector buf(g.nodes(), 0.0);
        for (std::size_t k : omega_.nodes()) buf[k] = z[k];
        fft_forward(g, buf);
        for (std::size_t k = 0; k < g.nodes(); ++k)
            buf[k] *= inverse ? 1.0 / (alpha + table_.symbol[k]) : alpha + table_.symbol[k];
        fft_inverse(g, buf);
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t k : omega_.nodes()) out[k] = buf[k].real();
    }

    double dot(std::span<const double> a, std::span<const double> b) const {
        std::vector<double> vals;
        vals.reserve(omega_.nodes().size());
        for (std::size_t k : omega_.nodes()) vals.push_back(a[k] * b[k]);
        return pairwise_sum(vals);
    }

    void solve_component(std::span<const double> b, std::span<double> x, double alpha) const {
        const std::size_t n = b.size();
        std::vector<double> r(n, 0.0), z(n), p(n), q(n);
        for (std::size_t k : omega_.nodes()) r[k] = b[k];
        const double bnorm = std::sqrt(dot(r, r));
        std::fill(x.begin(), x.end(), 0.0);
        if (bnorm == 0.0) return;
        apply(r, z, alpha, true);
        p = z;
        double rz = dot(r, z);
        for (int it = 0; it < 200; ++it) {
            apply(p, q, alpha, false);
            const double step = rz / dot(p, q);
            for (std::size_t k : omega_.nodes()) {
                x[k] += step * p[k];
                r[k] -= step * q[k];
            }
            if (std::sqrt(dot(r, r)) <= 1e-14 * bnorm) break;
            apply(r, z, alpha, true);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t k : omega_.nodes()) p[k] = z[k] + beta * p[k];
        }
    }

    const KernelTable& table_;
    const WindowDomain& omega_;
};

inline void require_psd(const KernelTable& table) {
    double top = 0.0, bottom = 0.0;
    for (double s : table.symbol) {
        top = std::max(top, s);
        bottom = std::min(bottom, s);
    }
    HALFGL_REQUIRE(bottom >= -1e-10 * std::max(1.0, top), "gradient flow: operator symbol is not nonnegative");
}

/// The flow itself; every energy and residual uses `table`, so the descent
/// check compares like with like.
inline SolveResult gradient_flow(const Field& g, const WindowDomain& omega, const SolverConfig& cfg,
                                 const KernelTable& table, const std::optional<Field>& initial) {
    cfg.validate();
    HALFGL_REQUIRE(g.grid() == omega.grid(), "minimize_gl: exterior data and window use different grids");
    HALFGL_REQUIRE(table.grid == g.grid(), "minimize_gl: operator table built for a different grid");
    HALFGL_REQUIRE(all_finite(g), "minimize_gl: exterior data is not finite");
    if (cfg.require_unit_exterior) require_unit_exterior(g, omega);
    require_psd(table);

    const double eps = cfg.epsilon;
    Field v;
    if (initial) {
        HALFGL_REQUIRE(initial->grid() == g.grid() && initial->components() == g.components(),
                       "minimize_gl: initial guess has the wrong shape");
        v = g;
        for (std::size_t k : omega.nodes())
            for (int c = 0; c < g.components(); ++c) v(k, c) = (*initial)(k, c);
    } else {
        v = initial_guess(g, omega, cfg.seed);
    }

    const double exterior = exterior_pair_energy(g, omega, table);
    const double gmax = max_modulus(g);
    ImplicitSolve implicit(table, omega);

    SolveResult res;
    Field Av = apply_kernel(table, v);
    auto energy = [&](const Field& f, const Field& Af) {
        return quadratic_form(f, Af) - exterior + potential_energy(f, omega, eps);
    };
    res.energy_trace.push_back(energy(v, Av));

    int increases = 0;
    bool violated = false;
    for (int it = 0;; ++it) {
        Field G = gl_gradient(v, Av, omega, eps);
        const double rn = omega_norm(G, omega);
        res.residual_trace.push_back(rn);
        if (!std::isfinite(rn)) throw NumericalError("minimize_gl: non-finite residual at iteration " + std::to_string(it));
        if (rn < cfg.tol_residual) {
            res.converged = true;
            break;
        }
        if (it == cfg.max_iters) break;

        Field next = v;
        if (cfg.scheme == Scheme::explicit_euler) {
            for (std::size_t k : omega.nodes())
                for (int c = 0; c < v.components(); ++c) next(k, c) -= cfg.tau * G(k, c);
        } else {
            double M = std::max({1.0, gmax, max_modulus(v)});
            for (int attempt = 0; attempt < 3; ++attempt) {
                const double lip = (3.0 * M * M - 1.0) / eps;
                const double alpha = 1.0 / cfg.tau + std::max(0.0, 0.5 * lip - 1.0 / cfg.tau);
                Field rhs(v.grid(), v.components());
                for (std::size_t k : omega.nodes())
                    for (int c = 0; c < v.components(); ++c) rhs(k, c) = -G(k, c);
                const Field d = implicit.solve(rhs, alpha);
                next = v;
                for (std::size_t k : omega.nodes())
                    for (int c = 0; c < v.components(); ++c) next(k, c) += d(k, c);
                const double reached = max_modulus(next);
                if (reached <= M) break;
                M = reached;
            }
        }
        if (!all_finite(next)) throw NumericalError("minimize_gl: non-finite iterate at iteration " + std::to_string(it));

        Field Anext = apply_kernel(table, next);
        const double e_new = energy(next, Anext);
        const double e_old = res.energy_trace.back();
        const double slack = 1e-12 * std::max({1.0, std::abs(e_old), exterior});
        if (e_new > e_old + slack) {
            violated = true;
            if (++increases >= 10) {
                throw NumericalError("minimize_gl: energy increased for 10 consecutive steps (iteration " +
                                     std::to_string(it) + ", tau=" + std::to_string(cfg.tau) + ")");
            }
        } else {
            increases = 0;
        }
        res.energy_trace.push_back(e_new);
        v = std::move(next);
        Av = std::move(Anext);
        res.iterations = it + 1;
    }
    res.final_residual = res.residual_trace.back();
    res.v = std::move(v);
    if (violated) {
        res.converged = false;
        res.diagnostic = "energy trace not monotone";
    } else if (!res.converged) {
        res.diagnostic = "max_iters reached with residual " + std::to_string(res.final_residual);
    }
    return res;
}

}  // namespace detail

/// Minimizes the GL energy over v with v = g outside omega.
inline SolveResult minimize_gl(const Field& g, const WindowDomain& omega, const SolverConfig& cfg,
                               const std::optional<Field>& initial = std::nullopt) {
    const KernelTable table = KernelTable::make(g.grid(), cfg.op);
    return detail::gradient_flow(g, omega, cfg, table, initial);
}

/// (-Delta)^{1/2} v - eps^{-1} (1 - |v|^2) v restricted to omega, L2 norm over omega.
inline ResidualReport el_residual(const Field& v, const WindowDomain& omega, double eps,
                                  OperatorKind op = OperatorKind::spectral) {
    HALFGL_REQUIRE(eps > 0.0, "el_residual: epsilon must be positive");
    const KernelTable table = KernelTable::make(v.grid(), op);
    ResidualReport out;
    out.r = detail::gl_gradient(v, apply_kernel(table, v), omega, eps);
    out.norm = detail::omega_norm(out.r, omega);
    return out;
}

struct BoundaryReactionResult {
    SolveResult boundary;
    ExtensionField u;
    /// dtn(u) - eps^{-1} (1 - |u|^2) u on omega, from the explicit extension.
    double neumann_residual = 0.0;
};

/// Same flow, with the operator realized as extend-then-differentiate.
inline BoundaryReactionResult solve_boundary_reaction(const Field& g, const WindowDomain& omega,
                                                      const HalfSpaceGrid& hgrid, const SolverConfig& cfg,
                                                      const std::optional<Field>& initial = std::nullopt) {
    HALFGL_REQUIRE(hgrid.base() == g.grid(), "solve_boundary_reaction: slab base differs from data grid");
    const KernelTable table = KernelTable::from_symbol(g.grid(), dtn_symbol(hgrid), OperatorKind::dtn);
    BoundaryReactionResult out{detail::gradient_flow(g, omega, cfg, table, initial), ExtensionField(hgrid, g.components()),
                               0.0};
    out.u = poisson_extend(out.boundary.v, hgrid);
    const Field D = dtn(out.u);
    out.neumann_residual = detail::omega_norm(detail::gl_gradient(out.boundary.v, D, omega, cfg.epsilon), omega);
    return out;
}

}  // namespace halfgl
