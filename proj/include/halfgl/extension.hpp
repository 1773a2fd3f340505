#pragma once

// Harmonic extension to the half-space over the torus and the
// Dirichlet-to-Neumann realization of the square-root Laplacian.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "halfgl/domain.hpp"
#include "halfgl/fft.hpp"
#include "halfgl/parallel.hpp"

namespace halfgl {

/// torus x [0, T], heights t_0 = 0 < t_1 < ... < t_M = T.
class HalfSpaceGrid {
public:
    static constexpr double kDefaultGrading = 1.15;

    HalfSpaceGrid(const GridSpec& base, std::vector<double> heights, double grading = kDefaultGrading)
        : base_(base), heights_(std::move(heights)), grading_(grading) {
        HALFGL_REQUIRE(heights_.size() >= 3, "HalfSpaceGrid: need at least three height layers");
        HALFGL_REQUIRE(heights_[0] == 0.0, "HalfSpaceGrid: first height must be 0");
        for (std::size_t j = 1; j < heights_.size(); ++j)
            HALFGL_REQUIRE(heights_[j] > heights_[j - 1], "HalfSpaceGrid: heights must increase strictly");
        HALFGL_REQUIRE(heights_[1] <= base.dx() * (1.0 + 1e-12), "HalfSpaceGrid: first height must not exceed dx");
        for (std::size_t j = 2; j < heights_.size(); ++j) {
            HALFGL_REQUIRE(heights_[j] / heights_[j - 1] <= grading_ * (1.0 + 1e-12),
                           "HalfSpaceGrid: height ratio exceeds grading factor at layer " + std::to_string(j));
        }
        HALFGL_REQUIRE(top() >= 0.25 * base.L * (1.0 - 1e-12), "HalfSpaceGrid: truncation height below L/4");
    }

    /// Geometric heights t_{j+1} = min(q t_j, t_j + max_spacing), clipped at T.
    static HalfSpaceGrid graded(const GridSpec& base, double T, double t1, double q = kDefaultGrading,
                                double max_spacing = std::numeric_limits<double>::infinity()) {
        HALFGL_REQUIRE(q > 1.0, "HalfSpaceGrid::graded: grading factor must exceed 1");
        std::vector<double> h{0.0, t1};
        while (h.back() < T) {
            const double next = std::min(q * h.back(), h.back() + max_spacing);
            // absorb a sliver instead of creating a nearly repeated layer
            if (next >= T || T - next < 0.25 * (next - h.back())) {
                h.push_back(T);
                break;
            }
            h.push_back(next);
        }
        return HalfSpaceGrid(base, std::move(h), q);
    }

    /// Exactly M layers above t = 0: t_j = t_1 q^{j-1} with t_1 = dx/8 and q fitted so that t_M = T.
    static HalfSpaceGrid with_layers(const GridSpec& base, double T, int M, double max_grading = kDefaultGrading) {
        HALFGL_REQUIRE(M >= 2, "HalfSpaceGrid::with_layers: need M >= 2");
        const double t1 = base.dx() / 8.0;
        const double q = std::pow(T / t1, 1.0 / (M - 1));
        HALFGL_REQUIRE(q <= max_grading, "HalfSpaceGrid::with_layers: too few layers for the grading bound");
        std::vector<double> h(static_cast<std::size_t>(M) + 1, 0.0);
        for (int j = 1; j <= M; ++j) h[static_cast<std::size_t>(j)] = t1 * std::pow(q, j - 1);
        h.back() = T;
        return HalfSpaceGrid(base, std::move(h), max_grading);
    }

    const GridSpec& base() const { return base_; }
    std::span<const double> heights() const { return heights_; }
    double height(std::size_t j) const { return heights_[j]; }
    std::size_t layers() const { return heights_.size(); }
    double top() const { return heights_.back(); }
    double grading() const { return grading_; }

private:
    GridSpec base_;
    std::vector<double> heights_;
    double grading_;
};

/// Samples of u(x, t_j); layer-major, then component, then node.
class ExtensionField {
public:
    ExtensionField(HalfSpaceGrid hgrid, int m)
        : hgrid_(std::move(hgrid)), m_(m), data_(hgrid_.layers() * hgrid_.base().nodes() * static_cast<std::size_t>(m), 0.0) {}

    const HalfSpaceGrid& hgrid() const { return hgrid_; }
    const GridSpec& base() const { return hgrid_.base(); }
    int components() const { return m_; }

    double& operator()(std::size_t layer, std::size_t node, int c) { return data_[index(layer, node, c)]; }
    double operator()(std::size_t layer, std::size_t node, int c) const { return data_[index(layer, node, c)]; }

    Field layer(std::size_t j) const {
        Field f(base(), m_);
        for (int c = 0; c < m_; ++c)
            for (std::size_t k = 0; k < base().nodes(); ++k) f(k, c) = (*this)(j, k, c);
        return f;
    }
    void set_layer(std::size_t j, const Field& f) {
        for (int c = 0; c < m_; ++c)
            for (std::size_t k = 0; k < base().nodes(); ++k) (*this)(j, k, c) = f(k, c);
    }
    std::span<const double> values() const { return data_; }

    double norm2_at(std::size_t layer, std::size_t node) const {
        double s = 0.0;
        for (int c = 0; c < m_; ++c) s += (*this)(layer, node, c) * (*this)(layer, node, c);
        return s;
    }

private:
    std::size_t index(std::size_t layer, std::size_t node, int c) const {
        const std::size_t nn = hgrid_.base().nodes();
        return (layer * static_cast<std::size_t>(m_) + static_cast<std::size_t>(c)) * nn + node;
    }

    HalfSpaceGrid hgrid_;
    int m_;
    std::vector<double> data_;
};

namespace detail {

/// Mass of the periodized 1-d Poisson kernel on [a, b] inside (-L/2, L/2).
inline double poisson_mass_1d(double a, double b, double t, double L) {
    const double cth = 1.0 / std::tanh(std::numbers::pi * t / L);
    const auto F = [&](double s) {
        if (s >= 0.5 * L) return 0.5;
        if (s <= -0.5 * L) return -0.5;
        return std::atan(cth * std::tan(std::numbers::pi * s / L)) / std::numbers::pi;
    };
    return F(b) - F(a);
}

/// Mass of gamma_2 t / (|s|^2 + t^2)^{3/2} on the rectangle [x1,x2] x [y1,y2].
inline double poisson_mass_rect(double x1, double x2, double y1, double y2, double t) {
    const auto F = [t](double x, double y) { return std::atan(x * y / (t * std::sqrt(x * x + y * y + t * t))); };
    return (F(x2, y2) - F(x1, y2) - F(x2, y1) + F(x1, y1)) / (2.0 * std::numbers::pi);
}

inline constexpr int kPoissonImages = 2;

}  // namespace detail

/// Cell-integrated periodized Poisson kernel at height t > 0, indexed by
/// offset node. Returns the raw weights; their sum is the unnormalized mass.
inline std::vector<double> poisson_weights(const GridSpec& g, double t) {
    HALFGL_REQUIRE(t > 0.0, "poisson_weights: height must be positive");
    const double dx = g.dx();
    std::vector<double> w(g.nodes(), 0.0);
    if (g.n == 1) {
        for (std::size_t o = 0; o < g.nodes(); ++o) {
            const double h = g.offset_length(static_cast<int>(o));
            if (static_cast<int>(o) == g.N / 2) {
                // the cell at +-L/2 straddles the seam of the fundamental cell
                w[o] = detail::poisson_mass_1d(h - 0.5 * dx, 0.5 * g.L, t, g.L) +
                       detail::poisson_mass_1d(-0.5 * g.L, -h + 0.5 * dx, t, g.L);
            } else {
                w[o] = detail::poisson_mass_1d(h - 0.5 * dx, h + 0.5 * dx, t, g.L);
            }
        }
        return w;
    }
    constexpr int J = detail::kPoissonImages;
    for (std::size_t o = 0; o < g.nodes(); ++o) {
        const Point h = g.offset(o);
        double s = 0.0;
        for (int j0 = -J; j0 <= J; ++j0) {
            for (int j1 = -J; j1 <= J; ++j1) {
                const double cx = h[0] + j0 * g.L;
                const double cy = h[1] + j1 * g.L;
                s += detail::poisson_mass_rect(cx - 0.5 * dx, cx + 0.5 * dx, cy - 0.5 * dx, cy + 0.5 * dx, t);
            }
        }
        w[o] = s;
    }
    // images beyond the (2J+1)L square: spread their mass uniformly
    const double A = (2 * J + 1) * 0.5 * g.L;
    const double inner = detail::poisson_mass_rect(-A, A, -A, A, t);
    const double far = (1.0 - inner) / static_cast<double>(g.nodes());
    for (double& x : w) x += far;
    return w;
}

/// Harmonic extension by convolution with the Poisson kernel, one FFT per layer.
inline ExtensionField poisson_extend(const Field& v, const HalfSpaceGrid& hgrid) {
    const GridSpec& g = v.grid();
    HALFGL_REQUIRE(g == hgrid.base(), "poisson_extend: field grid differs from slab base");
    ExtensionField u(hgrid, v.components());
    u.set_layer(0, v);
    std::vector<ComplexVector> spectra;
    for (int c = 0; c < v.components(); ++c) spectra.push_back(real_spectrum(g, v.component(c)));
    parallel_for(hgrid.layers() - 1, [&](std::size_t jm) {
        const std::size_t j = jm + 1;
        auto w = poisson_weights(g, hgrid.height(j));
        const double mass = pairwise_sum(w);
        for (double& x : w) x /= mass;
        const auto what = real_spectrum(g, w);
        ComplexVector buf(g.nodes());
        for (int c = 0; c < v.components(); ++c) {
            // u(x) = sum_o w(o) v(x + o); w is even, so this is a convolution
            for (std::size_t k = 0; k < g.nodes(); ++k) buf[k] = spectra[static_cast<std::size_t>(c)][k] * what[k];
            fft_inverse(g, buf);
            for (std::size_t k = 0; k < g.nodes(); ++k) u(j, k, c) = buf[k].real();
        }
    });
    return u;
}

/// Exterior normal derivative -du/dt at t = 0 from the three lowest layers.
inline Field dtn(const ExtensionField& u) {
    const auto& hg = u.hgrid();
    HALFGL_REQUIRE(hg.layers() >= 3, "dtn: need at least three height layers");
    const double t1 = hg.height(1);
    const double t2 = hg.height(2);
    const double c1 = t2 / (t1 * (t2 - t1));
    const double c2 = -t1 / (t2 * (t2 - t1));
    const double c0 = -(c1 + c2);
    Field out(u.base(), u.components());
    for (int c = 0; c < u.components(); ++c)
        for (std::size_t k = 0; k < u.base().nodes(); ++k)
            out(k, c) = -(c0 * u(0, k, c) + c1 * u(1, k, c) + c2 * u(2, k, c));
    return out;
}

/// Fourier symbol of dtn(poisson_extend(.)) on the base grid. The composite
/// map is a circulant, so this is exact for the discrete pair.
inline std::vector<double> dtn_symbol(const HalfSpaceGrid& hg) {
    const GridSpec& g = hg.base();
    const double t1 = hg.height(1);
    const double t2 = hg.height(2);
    const double c1 = t2 / (t1 * (t2 - t1));
    const double c2 = -t1 / (t2 * (t2 - t1));
    const double c0 = -(c1 + c2);
    std::vector<double> sym(g.nodes(), -c0);
    for (auto [j, c] : {std::pair{std::size_t{1}, c1}, std::pair{std::size_t{2}, c2}}) {
        auto w = poisson_weights(g, hg.height(j));
        const double mass = pairwise_sum(w);
        for (double& x : w) x /= mass;
        const auto what = real_spectrum(g, w);
        for (std::size_t k = 0; k < g.nodes(); ++k) sym[k] -= c * what[k].real();
    }
    sym[0] = 0.0;
    return sym;
}

/// Half-ball B_r^+(center) in the slab; center lies on t = 0.
struct HalfBall {
    Point center{0.0, 0.0};
    double radius = 0.0;
};

namespace detail {

inline void require_region(const ExtensionField& u, const HalfBall& b) {
    const GridSpec& g = u.base();
    HALFGL_REQUIRE(b.radius > 0.0, "region: radius must be positive");
    HALFGL_REQUIRE(b.radius <= u.hgrid().top(), "region: half-ball exceeds the slab height");
    const double reach = std::max(std::abs(b.center[0]), std::abs(b.center[1])) + b.radius;
    HALFGL_REQUIRE(reach <= 0.5 * g.L, "region: half-ball exceeds the lateral extent of the cell");
}

/// Visits every slab cell: fn(center (x, y), t_mid, cell volume, gradient per
/// component as n+1 partials, lower corner node).
template <class Fn>
void for_each_cell(const ExtensionField& u, Fn&& fn) {
    const GridSpec& g = u.base();
    const auto& hg = u.hgrid();
    const double dx = g.dx();
    const int m = u.components();
    const int n = g.n;
    std::vector<std::array<double, 3>> grad(static_cast<std::size_t>(m));
    for (std::size_t j = 0; j + 1 < hg.layers(); ++j) {
        const double dt = hg.height(j + 1) - hg.height(j);
        const double tm = 0.5 * (hg.height(j) + hg.height(j + 1));
        if (n == 1) {
            for (int i = 0; i < g.N; ++i) {
                const std::size_t a = g.flat(i);
                const std::size_t b = g.flat(i + 1);
                for (int c = 0; c < m; ++c) {
                    auto& gr = grad[static_cast<std::size_t>(c)];
                    gr[0] = 0.5 * ((u(j, b, c) - u(j, a, c)) + (u(j + 1, b, c) - u(j + 1, a, c))) / dx;
                    gr[1] = 0.5 * ((u(j + 1, a, c) - u(j, a, c)) + (u(j + 1, b, c) - u(j, b, c))) / dt;
                    gr[2] = 0.0;
                }
                fn(Point{g.coord(i) + 0.5 * dx, 0.0}, tm, dx * dt, grad, a);
            }
            continue;
        }
        for (int i0 = 0; i0 < g.N; ++i0) {
            for (int i1 = 0; i1 < g.N; ++i1) {
                const std::size_t c00 = g.flat(i0, i1), c10 = g.flat(i0 + 1, i1);
                const std::size_t c01 = g.flat(i0, i1 + 1), c11 = g.flat(i0 + 1, i1 + 1);
                for (int c = 0; c < m; ++c) {
                    auto& gr = grad[static_cast<std::size_t>(c)];
                    double d0 = 0.0, d1 = 0.0, d2 = 0.0;
                    for (std::size_t l : {j, j + 1}) {
                        d0 += (u(l, c10, c) - u(l, c00, c)) + (u(l, c11, c) - u(l, c01, c));
                        d1 += (u(l, c01, c) - u(l, c00, c)) + (u(l, c11, c) - u(l, c10, c));
                    }
                    for (std::size_t k : {c00, c10, c01, c11}) d2 += u(j + 1, k, c) - u(j, k, c);
                    gr = {0.25 * d0 / dx, 0.25 * d1 / dx, 0.25 * d2 / dt};
                }
                fn(Point{g.coord(i0) + 0.5 * dx, g.coord(i1) + 0.5 * dx}, tm, dx * dx * dt, grad, c00);
            }
        }
    }
}

}  // namespace detail

/// (1/2) int |grad u|^2 by the cell-centered midpoint rule over the half-ball
/// (cells whose centers lie inside) or over the whole slab.
inline double extension_dirichlet_energy(const ExtensionField& u, std::optional<HalfBall> region = std::nullopt) {
    if (region) detail::require_region(u, *region);
    const int n = u.base().n;
    std::vector<double> cells;
    detail::for_each_cell(u, [&](Point p, double t, double vol, const auto& grad, std::size_t) {
        if (region) {
            const double dx0 = p[0] - region->center[0];
            const double dx1 = n == 2 ? p[1] - region->center[1] : 0.0;
            if (dx0 * dx0 + dx1 * dx1 + t * t >= region->radius * region->radius) return;
        }
        double s = 0.0;
        for (const auto& gr : grad) s += gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2];
        cells.push_back(0.5 * s * vol);
    });
    return pairwise_sum(cells);
}

/// Node gradient of u: centered periodic differences in x, three-point
/// (one-sided at the bottom and top layers) nonuniform differences in t.
/// Result index: [axis][component] with axis n the height direction.
inline std::array<std::vector<double>, 3> node_gradient(const ExtensionField& u, std::size_t j, std::size_t node) {
    const GridSpec& g = u.base();
    const auto& hg = u.hgrid();
    const int m = u.components();
    std::array<std::vector<double>, 3> d;
    for (auto& a : d) a.assign(static_cast<std::size_t>(m), 0.0);
    const auto idx = g.multi(node);
    for (int axis = 0; axis < g.n; ++axis) {
        const std::size_t p = axis == 0 ? g.flat(idx[0] + 1, idx[1]) : g.flat(idx[0], idx[1] + 1);
        const std::size_t q = axis == 0 ? g.flat(idx[0] - 1, idx[1]) : g.flat(idx[0], idx[1] - 1);
        for (int c = 0; c < m; ++c) d[static_cast<std::size_t>(axis)][static_cast<std::size_t>(c)] = (u(j, p, c) - u(j, q, c)) / (2.0 * g.dx());
    }
    const std::size_t M = hg.layers() - 1;
    std::size_t a, b, e;  // three stencil layers
    if (j == 0) {
        a = 0; b = 1; e = 2;
    } else if (j == M) {
        a = M - 2; b = M - 1; e = M;
    } else {
        a = j - 1; b = j; e = j + 1;
    }
    const double ta = hg.height(a), tb = hg.height(b), te = hg.height(e), t = hg.height(j);
    // derivative of the Lagrange interpolant through (ta, tb, te) at t
    const double wa = ((t - tb) + (t - te)) / ((ta - tb) * (ta - te));
    const double wb = ((t - ta) + (t - te)) / ((tb - ta) * (tb - te));
    const double we = ((t - ta) + (t - tb)) / ((te - ta) * (te - tb));
    for (int c = 0; c < m; ++c)
        d[static_cast<std::size_t>(g.n)][static_cast<std::size_t>(c)] = wa * u(a, node, c) + wb * u(b, node, c) + we * u(e, node, c);
    return d;
}

struct RelaxOptions {
    double tol = 1e-10;
};

/// Sup norm of the scaled five/seven-point Laplacian residual on interior layers.
/// Row j is scaled by h_- h_+ / 2 so the residual is a dimensionless mean-value defect.
inline double harmonic_residual(const ExtensionField& u) {
    const GridSpec& g = u.base();
    const auto& hg = u.hgrid();
    const double dx2 = g.dx() * g.dx();
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < hg.layers(); ++j) {
        const double hm = hg.height(j) - hg.height(j - 1);
        const double hp = hg.height(j + 1) - hg.height(j);
        const double scale = 0.5 * hm * hp;
        for (std::size_t k = 0; k < g.nodes(); ++k) {
            const auto idx = g.multi(k);
            for (int c = 0; c < u.components(); ++c) {
                double lap = 0.0;
                for (int axis = 0; axis < g.n; ++axis) {
                    const std::size_t p = axis == 0 ? g.flat(idx[0] + 1, idx[1]) : g.flat(idx[0], idx[1] + 1);
                    const std::size_t q = axis == 0 ? g.flat(idx[0] - 1, idx[1]) : g.flat(idx[0], idx[1] - 1);
                    lap += (u(j, p, c) - 2.0 * u(j, k, c) + u(j, q, c)) / dx2;
                }
                lap += 2.0 / (hm + hp) * ((u(j + 1, k, c) - u(j, k, c)) / hp - (u(j, k, c) - u(j - 1, k, c)) / hm);
                worst = std::max(worst, std::abs(scale * lap));
            }
        }
    }
    return worst;
}

/// Discrete harmonic function in the slab: trace fixed to `boundary`, top
/// layer held at the top layer of `u`, periodic laterally. Each lateral
/// Fourier mode decouples into a tridiagonal system in t, solved directly.
inline ExtensionField harmonic_relax(const ExtensionField& u, const Field& boundary, RelaxOptions opt = {}) {
    const GridSpec& g = u.base();
    const auto& hg = u.hgrid();
    HALFGL_REQUIRE(boundary.grid() == g && boundary.components() == u.components(), "harmonic_relax: boundary mismatch");
    const std::size_t M = hg.layers() - 1;
    const std::size_t nn = g.nodes();
    ExtensionField out(hg, u.components());
    out.set_layer(0, boundary);
    out.set_layer(M, u.layer(M));

    std::vector<double> lateral(nn);
    for (std::size_t k = 0; k < nn; ++k) {
        const auto kv = wavevector(g, k);
        double s = 0.0;
        for (int axis = 0; axis < g.n; ++axis) {
            const double sn = std::sin(std::numbers::pi * kv[static_cast<std::size_t>(axis)] / g.N);
            s += 4.0 * sn * sn / (g.dx() * g.dx());
        }
        lateral[k] = s;
    }
    for (int c = 0; c < u.components(); ++c) {
        std::vector<ComplexVector> hat(M + 1);
        hat[0] = real_spectrum(g, boundary.component(c));
        {
            std::vector<double> top(nn);
            for (std::size_t k = 0; k < nn; ++k) top[k] = u(M, k, c);
            hat[M] = real_spectrum(g, top);
        }
        for (std::size_t j = 1; j < M; ++j) hat[j].assign(nn, 0.0);
        parallel_for(nn, [&](std::size_t k) {
            // Thomas algorithm on rows j = 1..M-1
            std::vector<double> cp(M + 1, 0.0);
            std::vector<std::complex<double>> dp(M + 1);
            for (std::size_t j = 1; j < M; ++j) {
                const double hm = hg.height(j) - hg.height(j - 1);
                const double hp = hg.height(j + 1) - hg.height(j);
                const double lo = 2.0 / (hm * (hm + hp));
                const double up = 2.0 / (hp * (hm + hp));
                const double diag = -(lo + up) - lateral[k];
                std::complex<double> rhs = 0.0;
                if (j == 1) rhs -= lo * hat[0][k];
                if (j == M - 1) rhs -= up * hat[M][k];
                const double a = j == 1 ? 0.0 : lo;
                const double denom = diag - a * cp[j - 1];
                cp[j] = (j == M - 1 ? 0.0 : up) / denom;
                dp[j] = (rhs - a * dp[j - 1]) / denom;
            }
            for (std::size_t j = M - 1; j >= 1; --j) {
                hat[j][k] = dp[j] - (j == M - 1 ? std::complex<double>(0.0) : cp[j] * hat[j + 1][k]);
            }
        });
        for (std::size_t j = 1; j < M; ++j) {
            fft_inverse(g, hat[j]);
            for (std::size_t k = 0; k < nn; ++k) out(j, k, c) = hat[j][k].real();
        }
    }
    const double res = harmonic_residual(out);
    if (!(res < opt.tol)) {
        throw NumericalError("harmonic_relax: residual " + std::to_string(res) + " above tolerance " + std::to_string(opt.tol));
    }
    return out;
}

}  // namespace halfgl
