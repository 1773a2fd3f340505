#pragma once

// Closed-form 1/2-harmonic maps into S^1 and the identities they satisfy.
// Complex numbers are read as R^2 pairs (real part first).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "halfgl/domain.hpp"
#include "halfgl/extension.hpp"
#include "halfgl/fraclap.hpp"
#include "halfgl/kernel.hpp"
#include "halfgl/parallel.hpp"

namespace halfgl {

using Complex = std::complex<double>;

/// e^{i theta} prod_k (lambda_k (z - a_k) - i) / (lambda_k (z - a_k) + i), or its conjugate.
struct BlaschkeParams {
    int d = 1;
    double theta = 0.0;
    std::vector<double> lambda{1.0};
    std::vector<double> a{0.0};
    bool conjugate = false;

    static BlaschkeParams canonical(int degree = 1) {
        return BlaschkeParams{degree, 0.0, std::vector<double>(static_cast<std::size_t>(degree), 1.0),
                              std::vector<double>(static_cast<std::size_t>(degree), 0.0), false};
    }

    void validate() const {
        HALFGL_REQUIRE(d >= 1, "BlaschkeParams: degree must be at least 1");
        HALFGL_REQUIRE(lambda.size() == static_cast<std::size_t>(d) && a.size() == static_cast<std::size_t>(d),
                       "BlaschkeParams: lambda and a must have d entries");
        for (double l : lambda) HALFGL_REQUIRE(l > 0.0, "BlaschkeParams: lambda_k must be positive");
    }
};

/// Product evaluated at z in the closed upper half-plane.
inline Complex blaschke_value(const BlaschkeParams& p, Complex z) {
    const Complex I(0.0, 1.0);
    Complex w = std::polar(1.0, p.theta);
    for (int k = 0; k < p.d; ++k) {
        const Complex s = p.lambda[static_cast<std::size_t>(k)] * (z - p.a[static_cast<std::size_t>(k)]);
        w *= (s - I) / (s + I);
    }
    return p.conjugate ? std::conj(w) : w;
}

inline Point to_point(Complex z) { return {z.real(), z.imag()}; }

inline Point blaschke_trace(const BlaschkeParams& p, double x) { return to_point(blaschke_value(p, Complex(x, 0.0))); }

/// Holomorphic (or antiholomorphic) extension at (x1, x2), x2 >= 0.
inline Point blaschke_extension(const BlaschkeParams& p, Point z) {
    HALFGL_REQUIRE(z[1] >= 0.0, "blaschke_extension: point below the half-plane");
    return to_point(blaschke_value(p, Complex(z[0], z[1])));
}

/// Samples of the trace on a 1-d grid.
inline Field blaschke_trace_field(const BlaschkeParams& p, const GridSpec& g) {
    p.validate();
    HALFGL_REQUIRE(g.n == 1, "blaschke_trace_field: needs a 1-d grid");
    return sample(g, 2, [&](Point x) { return blaschke_trace(p, x[0]); });
}

/// Exact extension sampled on the slab.
inline ExtensionField blaschke_extension_field(const BlaschkeParams& p, const HalfSpaceGrid& hg) {
    const GridSpec& g = hg.base();
    HALFGL_REQUIRE(g.n == 1, "blaschke_extension_field: needs a 1-d base grid");
    ExtensionField u(hg, 2);
    for (std::size_t j = 0; j < hg.layers(); ++j) {
        for (std::size_t k = 0; k < g.nodes(); ++k) {
            const Point w = blaschke_extension(p, {g.point(k)[0], hg.height(j)});
            u(j, k, 0) = w[0];
            u(j, k, 1) = w[1];
        }
    }
    return u;
}

/// (z - i) / (z + i): upper half-plane onto the unit disc.
inline Complex cayley(Complex z) {
    const Complex I(0.0, 1.0);
    HALFGL_REQUIRE(std::abs(z + I) > 0.0, "cayley: pole at z = -i");
    return (z - I) / (z + I);
}

inline Complex cayley_inverse(Complex w) {
    HALFGL_REQUIRE(std::abs(1.0 - w) > 0.0, "cayley_inverse: pole at w = 1");
    const Complex I(0.0, 1.0);
    return I * (1.0 + w) / (1.0 - w);
}

/// The Blaschke product transported to the disc, B(C^{-1}(z)); finite at z = 1.
inline Complex blaschke_on_disc(const BlaschkeParams& p, Complex z) {
    const Complex I(0.0, 1.0);
    Complex w = std::polar(1.0, p.theta);
    for (int k = 0; k < p.d; ++k) {
        const double l = p.lambda[static_cast<std::size_t>(k)];
        const double a = p.a[static_cast<std::size_t>(k)];
        // factor (l (zeta - a) - i)/(l (zeta - a) + i) with zeta = i(1+z)/(1-z), cleared of (1-z)
        const Complex s = l * (I * (1.0 + z) - a * (1.0 - z));
        w *= (s - I * (1.0 - z)) / (s + I * (1.0 - z));
    }
    return p.conjugate ? std::conj(w) : w;
}

/// Winding number of a closed S^1-valued 1-d sample (periodic closure).
inline int winding_number(const Field& v) {
    HALFGL_REQUIRE(v.grid().n == 1 && v.components() == 2, "winding_number: needs a planar field on a 1-d grid");
    double total = 0.0;
    const std::size_t N = v.nodes();
    for (std::size_t k = 0; k < N; ++k) {
        const std::size_t next = (k + 1) % N;
        const Complex a(v(k, 0), v(k, 1));
        const Complex b(v(next, 0), v(next, 1));
        const double step = std::arg(b / a);
        if (std::abs(step) > 0.5 * std::numbers::pi) {
            throw InvalidArgument("winding_number: angle increment too large at node " + std::to_string(k) +
                                  "; refine the grid");
        }
        total += step;
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

/// pi d: the Dirichlet 1/2-energy of a degree-d entire 1/2-harmonic line.
inline double quantized_energy(int d) {
    HALFGL_REQUIRE(d >= 1, "quantized_energy: degree must be at least 1 (constants are excluded)");
    return std::numbers::pi * d;
}

namespace detail {

inline void require_unit(const Field& v, double tol = 1e-8) {
    for (std::size_t k = 0; k < v.nodes(); ++k) {
        if (std::abs(std::sqrt(v.norm2_at(k)) - 1.0) > tol) {
            throw InvalidArgument("el_multiplier: field is not unit-modulus at node " + std::to_string(k));
        }
    }
}

inline double multiplier_at(const Field& v, std::size_t x, const KernelTable& table) {
    const GridSpec& g = v.grid();
    std::vector<double> terms(g.nodes(), 0.0);
    for_each_partner(g, x, [&](std::size_t y, std::size_t o) {
        if (o == 0) return;
        double s = 0.0;
        for (int c = 0; c < v.components(); ++c) {
            const double dv = v(x, c) - v(y, c);
            s += dv * dv;
        }
        terms[o] = table.weight[o] * s;
    });
    return 0.5 * pairwise_sum(terms);
}

}  // namespace detail

/// lambda(x) = (gamma_n / 2) int |v(x) - v(y)|^2 / |x - y|^{n+1} dy for |v| = 1.
inline double el_multiplier(const Field& v, std::size_t node, const KernelTable& table) {
    detail::require_unit(v);
    HALFGL_REQUIRE(table.grid == v.grid(), "el_multiplier: table built for a different grid");
    return detail::multiplier_at(v, node, table);
}

inline double el_multiplier(const Field& v, std::size_t node) {
    return el_multiplier(v, node, KernelTable::quadrature(v.grid()));
}

inline Field el_multiplier_field(const Field& v, const KernelTable& table) {
    detail::require_unit(v);
    HALFGL_REQUIRE(table.grid == v.grid(), "el_multiplier_field: table built for a different grid");
    Field out(v.grid(), 1);
    parallel_for(v.nodes(), [&](std::size_t x) { out(x, 0) = detail::multiplier_at(v, x, table); });
    return out;
}

inline Field el_multiplier_field(const Field& v) { return el_multiplier_field(v, KernelTable::quadrature(v.grid())); }

/// H = (|d1 u|^2 - |d2 u|^2) - 2i (d1 u . d2 u) per slab node (n = 1 only).
struct HopfField {
    HalfSpaceGrid hgrid;
    std::vector<Complex> value;       // [layer * nodes + node]
    std::vector<double> grad_norm2;   // |grad u|^2 at the same nodes

    Complex at(std::size_t layer, std::size_t node) const { return value[layer * hgrid.base().nodes() + node]; }
};

inline HopfField hopf_differential(const ExtensionField& u) {
    HALFGL_REQUIRE(u.base().n == 1, "hopf_differential: base dimension must be 1");
    const GridSpec& g = u.base();
    HopfField h{u.hgrid(), std::vector<Complex>(u.hgrid().layers() * g.nodes()), std::vector<double>(u.hgrid().layers() * g.nodes())};
    parallel_for(u.hgrid().layers(), [&](std::size_t j) {
        for (std::size_t k = 0; k < g.nodes(); ++k) {
            const auto d = node_gradient(u, j, k);
            double a = 0.0, b = 0.0, ab = 0.0;
            for (int c = 0; c < u.components(); ++c) {
                const double d1 = d[0][static_cast<std::size_t>(c)];
                const double d2 = d[1][static_cast<std::size_t>(c)];
                a += d1 * d1;
                b += d2 * d2;
                ab += d1 * d2;
            }
            h.value[j * g.nodes() + k] = Complex(a - b, -2.0 * ab);
            h.grad_norm2[j * g.nodes() + k] = a + b;
        }
    });
    return h;
}

/// ||H||_2 / || |grad u|^2 ||_2 over nodes with |x| <= xmax and t in [tmin, tmax].
inline double hopf_relative(const HopfField& h, double xmax, double tmin, double tmax) {
    const GridSpec& g = h.hgrid.base();
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < h.hgrid.layers(); ++j) {
        const double t = h.hgrid.height(j);
        if (t < tmin || t > tmax) continue;
        for (std::size_t k = 0; k < g.nodes(); ++k) {
            if (std::abs(g.point(k)[0]) > xmax) continue;
            num += std::norm(h.at(j, k));
            den += h.grad_norm2[j * g.nodes() + k] * h.grad_norm2[j * g.nodes() + k];
        }
    }
    return std::sqrt(num / den);
}

/// v(x) = g(x / |x|) on a 2-d grid, g the circle map z -> B(C^{-1}(z)).
/// The node nearest the origin takes g at angle 0.
inline Field homogeneous_trace(const BlaschkeParams& p, const GridSpec& grid) {
    p.validate();
    HALFGL_REQUIRE(grid.n == 2, "homogeneous_trace: needs a 2-d grid");
    const std::size_t origin = grid.origin();
    Field v(grid, 2);
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
        const Point x = grid.point(k);
        const double r = std::hypot(x[0], x[1]);
        const Complex z = k == origin || r == 0.0 ? Complex(1.0, 0.0) : Complex(x[0] / r, x[1] / r);
        const Complex w = blaschke_on_disc(p, z);
        v(k, 0) = w.real();
        v(k, 1) = w.imag();
    }
    return v;
}

struct OrthogonalityReport {
    std::vector<double> relative;  // one per random tangent field
    double normal_pairing = 0.0;   // reference: radial cutoff times v
    double max_relative() const {
        double m = 0.0;
        for (double r : relative) m = std::max(m, std::abs(r));
        return m;
    }
};

/// Pairs v with `count` random tangent fields psi v^perp supported in the
/// annulus rho < |x| < radius, relative to the normal pairing of the same
/// amplitude. Uses <A v, phi>_omega = cell sum phi . A v, valid for phi = 0
/// off omega.
inline OrthogonalityReport tangent_orthogonality(const Field& v, double rho, double radius = 1.0, int count = 20,
                                                 unsigned long long seed = 0) {
    const GridSpec& g = v.grid();
    HALFGL_REQUIRE(g.n == 2 && v.components() == 2, "tangent_orthogonality: needs an R^2-valued field on a 2-d grid");
    HALFGL_REQUIRE(0.0 < rho && rho < radius, "tangent_orthogonality: need 0 < rho < radius");
    const Field Av = apply_kernel(KernelTable::quadrature(g), v);
    auto cutoff = [&](double r) {
        if (r <= rho || r >= radius) return 0.0;
        const double s = std::sin(std::numbers::pi * (r - rho) / (radius - rho));
        return s * s;
    };
    auto pairing = [&](auto&& psi, bool tangent) {
        std::vector<double> terms(g.nodes(), 0.0), mass(g.nodes(), 0.0);
        for (std::size_t k = 0; k < g.nodes(); ++k) {
            const Point x = g.point(k);
            const double r = std::hypot(x[0], x[1]);
            const double a = cutoff(r) * psi(r, std::atan2(x[1], x[0]));
            if (a == 0.0) continue;
            const double p0 = tangent ? -v(k, 1) : v(k, 0);
            const double p1 = tangent ? v(k, 0) : v(k, 1);
            terms[k] = a * (p0 * Av(k, 0) + p1 * Av(k, 1));
            mass[k] = a * a;
        }
        return std::pair{pairwise_sum(terms) * g.cell(), std::sqrt(pairwise_sum(mass) * g.cell())};
    };
    OrthogonalityReport rep;
    const auto [normal, normal_mass] = pairing([](double, double) { return 1.0; }, false);
    rep.normal_pairing = normal;
    HALFGL_REQUIRE(std::abs(normal) > 0.0, "tangent_orthogonality: field has no normal component to compare with");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int i = 0; i < count; ++i) {
        std::array<double, 7> c{};
        for (double& x : c) x = coef(rng);
        auto psi = [&](double r, double th) {
            const double radial = 1.0 + 0.5 * c[6] * std::cos(std::numbers::pi * (r - rho) / (radius - rho));
            return radial * (c[0] + c[1] * std::cos(th) + c[2] * std::sin(th) + c[3] * std::cos(2 * th) +
                             c[4] * std::sin(2 * th) + c[5] * std::cos(3 * th));
        };
        const auto [t, t_mass] = pairing(psi, true);
        rep.relative.push_back(t / (std::abs(normal) * t_mass / normal_mass));
    }
    return rep;
}

/// ||dw/dnu ^ g|| / ||dw/dnu|| on the unit circle for w = B o C^{-1}, with
/// dw/dnu from a one-sided three-point radial difference on a polar grid.
inline double circle_equation_residual(const BlaschkeParams& p, int angles = 720, double dr = 1e-3) {
    p.validate();
    double num = 0.0, den = 0.0;
    for (int a = 0; a < angles; ++a) {
        const double phi = 2.0 * std::numbers::pi * a / angles;
        const Complex e = std::polar(1.0, phi);
        const Complex w0 = blaschke_on_disc(p, e);
        const Complex w1 = blaschke_on_disc(p, (1.0 - dr) * e);
        const Complex w2 = blaschke_on_disc(p, (1.0 - 2.0 * dr) * e);
        const Complex dn = (3.0 * w0 - 4.0 * w1 + w2) / (2.0 * dr);
        const double wedge = dn.real() * w0.imag() - dn.imag() * w0.real();
        num += wedge * wedge;
        den += std::norm(dn);
    }
    return std::sqrt(num / den);
}

}  // namespace halfgl
