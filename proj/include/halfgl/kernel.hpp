#pragma once

// Shared kernel-weight tables. Every double sum in the library (operator,
// pairing, energy, density, multiplier) reads the same table so the discrete
// identities between them hold exactly.
//
// The kernel |h|^{-(n+1)} is periodized over the torus (sum over images). A
// bare minimum-image cutoff at L/2 misrepresents the lowest modes by ~20%.

#include <cmath>
#include <numbers>
#include <vector>

#include "halfgl/domain.hpp"
#include "halfgl/fft.hpp"
#include "halfgl/parallel.hpp"

namespace halfgl {

/// gamma_n = Gamma((n+1)/2) / pi^((n+1)/2).
inline double gamma_n(int n) {
    HALFGL_REQUIRE(n == 1 || n == 2, "gamma_n: supported dimensions are 1 and 2, got " + std::to_string(n));
    return std::tgamma(0.5 * (n + 1)) / std::pow(std::numbers::pi, 0.5 * (n + 1));
}

namespace detail {

inline constexpr int kImageShells = 8;

/// sum_j |h + jL|^{-(n+1)} over the image lattice.
inline double periodized_kernel(const GridSpec& g, Point h) {
    constexpr double pi = std::numbers::pi;
    if (g.n == 1) {
        const double s = std::sin(pi * h[0] / g.L);
        return (pi / g.L) * (pi / g.L) / (s * s);
    }
    double sum = 0.0;
    for (int j0 = -kImageShells; j0 <= kImageShells; ++j0) {
        for (int j1 = -kImageShells; j1 <= kImageShells; ++j1) {
            const double r = std::hypot(h[0] + j0 * g.L, h[1] + j1 * g.L);
            sum += 1.0 / (r * r * r);
        }
    }
    // continuum tail outside the square of half-width A: lattice density 1/L^2
    const double A = (kImageShells + 0.5) * g.L;
    return sum + 4.0 * std::numbers::sqrt2 / (A * g.L * g.L);
}

/// sum_j (h + jL) / |h + jL|^{n+3}, the (negated) gradient of the kernel over n+1.
inline Point periodized_kernel_gradient(const GridSpec& g, Point h) {
    constexpr double pi = std::numbers::pi;
    if (g.n == 1) {
        const double s = std::sin(pi * h[0] / g.L);
        const double c = std::cos(pi * h[0] / g.L);
        const double q = pi / g.L;
        return {q * q * q * c / (s * s * s), 0.0};
    }
    Point sum{0.0, 0.0};
    for (int j0 = -kImageShells; j0 <= kImageShells; ++j0) {
        for (int j1 = -kImageShells; j1 <= kImageShells; ++j1) {
            const double a = h[0] + j0 * g.L;
            const double b = h[1] + j1 * g.L;
            const double r2 = a * a + b * b;
            const double inv = 1.0 / (r2 * r2 * std::sqrt(r2));
            sum[0] += a * inv;
            sum[1] += b * inv;
        }
    }
    return sum;
}

}  // namespace detail

enum class OperatorKind { spectral, quadrature, dtn };

inline const char* to_string(OperatorKind k) {
    switch (k) {
        case OperatorKind::spectral: return "spectral";
        case OperatorKind::quadrature: return "quadrature";
        case OperatorKind::dtn: return "dtn";
    }
    return "?";
}

/// Circulant operator (A v)(x) = sum_{o != 0} w(o) (v(x) - v(x+o)) with its Fourier symbol.
///
/// quadrature: w(o) = gamma_n K_per(h_o) dx^n, the trapezoid rule for the
///             principal-value integral with the h = 0 node excluded.
/// spectral:   w is read off the multiplier 2 pi |k| / L, so A equals the
///             spectral operator exactly.
struct KernelTable {
    GridSpec grid;
    OperatorKind kind = OperatorKind::quadrature;
    std::vector<double> weight;  // indexed by offset node; weight[0] = 0
    std::vector<double> symbol;  // indexed by mode; symbol[0] = 0

    static KernelTable quadrature(const GridSpec& g) {
        KernelTable t{g, OperatorKind::quadrature, std::vector<double>(g.nodes(), 0.0), {}};
        const double scale = gamma_n(g.n) * g.cell();
        parallel_for(g.nodes(), [&](std::size_t o) {
            if (o != 0) t.weight[o] = scale * detail::periodized_kernel(g, g.offset(o));
        });
        t.symbol = symbol_from_weights(g, t.weight);
        return t;
    }

    static KernelTable spectral(const GridSpec& g) { return from_symbol(g, spectral_symbol(g), OperatorKind::spectral); }

    /// Any real, even, nonnegative symbol with symbol[0] = 0.
    static KernelTable from_symbol(const GridSpec& g, std::vector<double> symbol, OperatorKind kind) {
        HALFGL_REQUIRE(symbol.size() == g.nodes(), "KernelTable::from_symbol: size mismatch");
        symbol[0] = 0.0;
        KernelTable t{g, kind, {}, std::move(symbol)};
        ComplexVector buf(t.symbol.begin(), t.symbol.end());
        fft_inverse(g, buf);
        t.weight.resize(g.nodes());
        for (std::size_t o = 0; o < g.nodes(); ++o) t.weight[o] = o == 0 ? 0.0 : -buf[o].real();
        return t;
    }

    static KernelTable make(const GridSpec& g, OperatorKind kind) {
        HALFGL_REQUIRE(kind != OperatorKind::dtn, "KernelTable::make: the dtn table needs a half-space grid");
        return kind == OperatorKind::spectral ? spectral(g) : quadrature(g);
    }

    /// 2 pi |k| / L per mode.
    static std::vector<double> spectral_symbol(const GridSpec& g) {
        std::vector<double> s(g.nodes());
        for (std::size_t k = 0; k < g.nodes(); ++k) s[k] = 2.0 * std::numbers::pi * wavenumber(g, k) / g.L;
        return s;
    }

private:
    static std::vector<double> symbol_from_weights(const GridSpec& g, const std::vector<double>& w) {
        const auto hat = real_spectrum(g, w);
        // w is even, so its transform is real; the grid origin offset does not
        // enter because w is indexed by displacement, not by position.
        const double total = pairwise_sum(w);
        std::vector<double> s(g.nodes());
        for (std::size_t k = 0; k < g.nodes(); ++k) s[k] = k == 0 ? 0.0 : total - hat[k].real();
        return s;
    }
};

/// Calls fn(y, o) for every node y with y = x + o, in a fixed order.
template <class Fn>
void for_each_partner(const GridSpec& g, std::size_t x, Fn&& fn) {
    const auto ix = g.multi(x);
    if (g.n == 1) {
        for (int o = 0; o < g.N; ++o) {
            const int y = (ix[0] + o) % g.N;
            fn(static_cast<std::size_t>(y), static_cast<std::size_t>(o));
        }
        return;
    }
    for (int o0 = 0; o0 < g.N; ++o0) {
        const std::size_t y0 = static_cast<std::size_t>((ix[0] + o0) % g.N) * g.N;
        const std::size_t base = static_cast<std::size_t>(o0) * g.N;
        for (int o1 = 0; o1 < g.N; ++o1) {
            fn(y0 + static_cast<std::size_t>((ix[1] + o1) % g.N), base + static_cast<std::size_t>(o1));
        }
    }
}

}  // namespace halfgl
