#pragma once

// Energies on omega: the Dirichlet 1/2-energy, its density, the
// Ginzburg-Landau 1/2-energy, the boundary energy of an extension, the
// stress-energy tensor, and the first inner variation.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "halfgl/domain.hpp"
#include "halfgl/extension.hpp"
#include "halfgl/fraclap.hpp"
#include "halfgl/kernel.hpp"
#include "halfgl/parallel.hpp"

namespace halfgl {

inline double diff2_at(const Field& v, std::size_t x, std::size_t y) {
    double s = 0.0;
    for (int c = 0; c < v.components(); ++c) {
        const double d = v(x, c) - v(y, c);
        s += d * d;
    }
    return s;
}

/// e(v, omega)(x) on omega nodes (zero elsewhere):
/// (gamma_n/2) sum over omega + gamma_n sum over omega^c of |v(x)-v(y)|^2 K.
inline Field nonlocal_density(const Field& v, const WindowDomain& omega, const KernelTable& table) {
    const GridSpec& g = v.grid();
    HALFGL_REQUIRE(omega.grid() == g && table.grid == g, "nonlocal_density: grid mismatch");
    Field e(g, 1);
    const auto inside = omega.nodes();
    parallel_for(inside.size(), [&](std::size_t r) {
        const std::size_t x = inside[r];
        std::vector<double> terms(g.nodes(), 0.0);
        for_each_partner(g, x, [&](std::size_t y, std::size_t o) {
            if (o == 0) return;
            const double f = omega.contains(y) ? 0.5 : 1.0;
            terms[o] = f * table.weight[o] * diff2_at(v, x, y);
        });
        e(x, 0) = pairwise_sum(terms);
    });
    return e;
}

inline Field nonlocal_density(const Field& v, const WindowDomain& omega) {
    return nonlocal_density(v, omega, KernelTable::quadrature(v.grid()));
}

namespace detail {

inline double integrate_density(const Field& e, const WindowDomain& omega) {
    std::vector<double> vals;
    vals.reserve(omega.nodes().size());
    for (std::size_t x : omega.nodes()) vals.push_back(e(x, 0));
    return pairwise_sum(vals) * e.grid().cell();
}

}  // namespace detail

/// E(v, omega) = 1/2 int_omega e(v, omega).
inline double dirichlet_half_energy(const Field& v, const WindowDomain& omega, const KernelTable& table) {
    return 0.5 * detail::integrate_density(nonlocal_density(v, omega, table), omega);
}

inline double dirichlet_half_energy(const Field& v, const WindowDomain& omega) {
    return dirichlet_half_energy(v, omega, KernelTable::quadrature(v.grid()));
}

/// (1/4 eps) int_omega (1 - |v|^2)^2.
inline double potential_energy(const Field& v, const WindowDomain& omega, double eps) {
    std::vector<double> vals;
    vals.reserve(omega.nodes().size());
    for (std::size_t x : omega.nodes()) {
        const double d = 1.0 - v.norm2_at(x);
        vals.push_back(d * d);
    }
    return pairwise_sum(vals) * v.grid().cell() / (4.0 * eps);
}

struct EnergyReport {
    double epsilon = 0.0;
    double dirichlet_half = 0.0;
    double potential = 0.0;
    double total = 0.0;
    Field density;
};

inline EnergyReport gl_energy(const Field& v, const WindowDomain& omega, double eps, const KernelTable& table) {
    HALFGL_REQUIRE(eps > 0.0, "gl_energy: epsilon must be positive");
    EnergyReport r;
    r.epsilon = eps;
    r.density = nonlocal_density(v, omega, table);
    r.dirichlet_half = 0.5 * detail::integrate_density(r.density, omega);
    r.potential = potential_energy(v, omega, eps);
    r.total = r.dirichlet_half + r.potential;
    return r;
}

inline EnergyReport gl_energy(const Field& v, const WindowDomain& omega, double eps) {
    return gl_energy(v, omega, eps, KernelTable::quadrature(v.grid()));
}

/// (1/4 eps) sum over floor nodes of D_r(center) of (1 - |u|^2)^2 dx^n.
inline double boundary_potential(const ExtensionField& u, const HalfBall& region, double eps) {
    const GridSpec& g = u.base();
    std::vector<double> vals;
    for (std::size_t k = 0; k < g.nodes(); ++k) {
        const Point p = g.point(k);
        if (std::hypot(p[0] - region.center[0], p[1] - region.center[1]) >= region.radius) continue;
        const double d = 1.0 - u.norm2_at(0, k);
        vals.push_back(d * d);
    }
    return pairwise_sum(vals) * g.cell() / (4.0 * eps);
}

/// E_eps(u, B_r^+) = 1/2 int |grad u|^2 + (1/4 eps) int_{D_r} (1 - |u|^2)^2.
inline double boundary_gl_energy(const ExtensionField& u, const HalfBall& region, double eps) {
    HALFGL_REQUIRE(eps > 0.0, "boundary_gl_energy: epsilon must be positive");
    return extension_dirichlet_energy(u, region) + boundary_potential(u, region, eps);
}

/// (n+1) x (n+1) tensor per node, row-major in the first (n+1)^2 entries.
struct StressTensorField {
    HalfSpaceGrid hgrid;
    int dim = 2;
    std::vector<std::array<double, 9>> data;  // [layer * nodes + node]

    const std::array<double, 9>& at(std::size_t layer, std::size_t node) const {
        return data[layer * hgrid.base().nodes() + node];
    }
    double entry(std::size_t layer, std::size_t node, int i, int j) const { return at(layer, node)[static_cast<std::size_t>(i * dim + j)]; }
};

/// T_ij = |grad u|^2 delta_ij - 2 d_i u . d_j u at every node (node gradients).
inline StressTensorField stress_energy(const ExtensionField& u) {
    HALFGL_REQUIRE(u.hgrid().layers() >= 3, "stress_energy: need at least three layers");
    const GridSpec& g = u.base();
    const int dim = g.n + 1;
    StressTensorField T{u.hgrid(), dim, std::vector<std::array<double, 9>>(u.hgrid().layers() * g.nodes())};
    parallel_for(u.hgrid().layers(), [&](std::size_t j) {
        for (std::size_t k = 0; k < g.nodes(); ++k) {
            const auto d = node_gradient(u, j, k);
            std::array<double, 9> t{};
            double norm2 = 0.0;
            for (int a = 0; a < dim; ++a)
                for (double x : d[static_cast<std::size_t>(a)]) norm2 += x * x;
            for (int a = 0; a < dim; ++a) {
                for (int b = 0; b < dim; ++b) {
                    double dot = 0.0;
                    for (int c = 0; c < u.components(); ++c)
                        dot += d[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] * d[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
                    t[static_cast<std::size_t>(a * dim + b)] = (a == b ? norm2 : 0.0) - 2.0 * dot;
                }
            }
            T.data[j * g.nodes() + k] = t;
        }
    });
    return T;
}

/// gamma_n dx^n sum_j (h + jL) / |h + jL|^{n+3} per offset node.
struct KernelGradientTable {
    GridSpec grid;
    std::vector<Point> weight;

    static KernelGradientTable make(const GridSpec& g) {
        KernelGradientTable t{g, std::vector<Point>(g.nodes(), Point{0.0, 0.0})};
        const double scale = gamma_n(g.n) * g.cell();
        parallel_for(g.nodes(), [&](std::size_t o) {
            if (o == 0) return;
            const Point p = detail::periodized_kernel_gradient(g, g.offset(o));
            t.weight[o] = {scale * p[0], scale * p[1]};
        });
        return t;
    }
};

/// Divergence of an n-component vector field by centered periodic differences.
inline Field divergence(const Field& X) {
    const GridSpec& g = X.grid();
    HALFGL_REQUIRE(X.components() == g.n, "divergence: vector field must have n components");
    Field out(g, 1);
    for (std::size_t k = 0; k < g.nodes(); ++k) {
        const auto i = g.multi(k);
        double s = (X(g.flat(i[0] + 1, i[1]), 0) - X(g.flat(i[0] - 1, i[1]), 0)) / (2.0 * g.dx());
        if (g.n == 2) s += (X(g.flat(i[0], i[1] + 1), 1) - X(g.flat(i[0], i[1] - 1), 1)) / (2.0 * g.dx());
        out(k, 0) = s;
    }
    return out;
}

namespace detail {

inline void require_support(const Field& X, const WindowDomain& omega, const char* who) {
    for (std::size_t k = 0; k < X.nodes(); ++k) {
        if (omega.contains(k)) continue;
        for (int c = 0; c < X.components(); ++c)
            if (X(k, c) != 0.0) throw InvalidArgument(std::string(who) + ": vector field nonzero outside omega at node " + std::to_string(k));
    }
}

}  // namespace detail

/// d/dt E(v o phi_t, omega) at t = 0 for the flow of X, by direct quadrature of
/// the three double sums (omega x omega, omega x omega^c, omega x R^n).
inline double inner_variation(const Field& v, const Field& X, const WindowDomain& omega) {
    const GridSpec& g = v.grid();
    HALFGL_REQUIRE(X.grid() == g && X.components() == g.n, "inner_variation: X must be an n-component field on the same grid");
    detail::require_support(X, omega, "inner_variation");
    const auto table = KernelTable::quadrature(g);
    const auto grad = KernelGradientTable::make(g);
    const Field divX = divergence(X);
    const double np1 = g.n + 1.0;
    const auto inside = omega.nodes();
    std::vector<double> rows(inside.size());
    parallel_for(inside.size(), [&](std::size_t r) {
        const std::size_t x = inside[r];
        std::vector<double> terms(g.nodes(), 0.0);
        for_each_partner(g, x, [&](std::size_t y, std::size_t o) {
            if (o == 0) return;
            const double d2 = diff2_at(v, x, y);
            // x - y = -h(o), so G(x - y) = -G(h(o))
            const Point& G = grad.weight[o];
            double dir;
            if (omega.contains(y)) {
                double s = 0.0;
                for (int a = 0; a < g.n; ++a) s -= G[static_cast<std::size_t>(a)] * (X(x, a) - X(y, a));
                dir = 0.25 * np1 * s;
            } else {
                double s = 0.0;
                for (int a = 0; a < g.n; ++a) s -= G[static_cast<std::size_t>(a)] * X(x, a);
                dir = 0.5 * np1 * s;
            }
            terms[o] = d2 * (dir - 0.5 * table.weight[o] * divX(x, 0));
        });
        rows[r] = pairwise_sum(terms);
    });
    return g.cell() * pairwise_sum(rows);
}

/// Height cutoff psi(t) = cos^2(pi t / 2h) on [0, h), zero above.
struct HeightCutoff {
    double height = 1.0;
    double value(double t) const {
        if (t >= height) return 0.0;
        const double c = std::cos(0.5 * std::numbers::pi * t / height);
        return c * c;
    }
    double derivative(double t) const {
        if (t >= height) return 0.0;
        return -0.5 * std::numbers::pi / height * std::sin(std::numbers::pi * t / height);
    }
};

/// -1/2 int (|grad u|^2 div X - 2 sum_ij (d_i u . d_j u) d_j X_i) with the
/// slab field X(x, t) = (X(x) psi(t), 0), by the cell-centered midpoint rule.
inline double inner_variation_extension(const ExtensionField& u, const Field& X, HeightCutoff cutoff) {
    const GridSpec& g = u.base();
    HALFGL_REQUIRE(X.grid() == g && X.components() == g.n, "inner_variation_extension: X must be an n-component field");
    HALFGL_REQUIRE(cutoff.height <= u.hgrid().top(), "inner_variation_extension: cutoff above the slab");
    const int n = g.n;
    const double dx = g.dx();
    std::vector<double> cells;
    detail::for_each_cell(u, [&](Point, double t, double vol, const auto& grad, std::size_t corner) {
        const double psi = cutoff.value(t);
        const double dpsi = cutoff.derivative(t);
        if (psi == 0.0 && dpsi == 0.0) return;
        // X and its Jacobian at the cell center
        std::array<double, 2> Xc{0.0, 0.0};
        std::array<std::array<double, 2>, 2> J{};  // J[i][j] = d_j X_i
        const auto i = g.multi(corner);
        if (n == 1) {
            const std::size_t b = g.flat(i[0] + 1);
            Xc[0] = 0.5 * (X(corner, 0) + X(b, 0));
            J[0][0] = (X(b, 0) - X(corner, 0)) / dx;
        } else {
            const std::size_t c00 = corner, c10 = g.flat(i[0] + 1, i[1]);
            const std::size_t c01 = g.flat(i[0], i[1] + 1), c11 = g.flat(i[0] + 1, i[1] + 1);
            for (int a = 0; a < 2; ++a) {
                Xc[static_cast<std::size_t>(a)] = 0.25 * (X(c00, a) + X(c10, a) + X(c01, a) + X(c11, a));
                J[static_cast<std::size_t>(a)][0] = 0.5 * ((X(c10, a) - X(c00, a)) + (X(c11, a) - X(c01, a))) / dx;
                J[static_cast<std::size_t>(a)][1] = 0.5 * ((X(c01, a) - X(c00, a)) + (X(c11, a) - X(c10, a))) / dx;
            }
        }
        double divX = 0.0;
        for (int a = 0; a < n; ++a) divX += J[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)];
        double norm2 = 0.0;
        for (const auto& gr : grad) norm2 += gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2];
        const auto dot = [&](int a, int b) {
            double s = 0.0;
            for (const auto& gr : grad) s += gr[static_cast<std::size_t>(a)] * gr[static_cast<std::size_t>(b)];
            return s;
        };
        double cross = 0.0;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) cross += dot(a, b) * J[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] * psi;
            cross += dot(a, n) * Xc[static_cast<std::size_t>(a)] * dpsi;
        }
        cells.push_back(-0.5 * (norm2 * divX * psi - 2.0 * cross) * vol);
    });
    return pairwise_sum(cells);
}

/// v(x + t X(x)) by periodic linear (n=1) / bilinear (n=2) interpolation.
inline Field compose_flow(const Field& v, const Field& X, double t) {
    const GridSpec& g = v.grid();
    HALFGL_REQUIRE(X.grid() == g && X.components() == g.n, "compose_flow: X must be an n-component field");
    Field out(g, v.components());
    const double dx = g.dx();
    for (std::size_t k = 0; k < g.nodes(); ++k) {
        const auto i = g.multi(k);
        const double s0 = i[0] + t * X(k, 0) / dx;
        const double f0 = std::floor(s0);
        const double a0 = s0 - f0;
        const int b0 = static_cast<int>(f0);
        if (g.n == 1) {
            for (int c = 0; c < v.components(); ++c)
                out(k, c) = (1.0 - a0) * v(g.flat(b0), c) + a0 * v(g.flat(b0 + 1), c);
            continue;
        }
        const double s1 = i[1] + t * X(k, 1) / dx;
        const double f1 = std::floor(s1);
        const double a1 = s1 - f1;
        const int b1 = static_cast<int>(f1);
        for (int c = 0; c < v.components(); ++c) {
            out(k, c) = (1.0 - a0) * (1.0 - a1) * v(g.flat(b0, b1), c) + a0 * (1.0 - a1) * v(g.flat(b0 + 1, b1), c) +
                        (1.0 - a0) * a1 * v(g.flat(b0, b1 + 1), c) + a0 * a1 * v(g.flat(b0 + 1, b1 + 1), c);
        }
    }
    return out;
}

}  // namespace halfgl
