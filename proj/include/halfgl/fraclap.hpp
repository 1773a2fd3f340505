#pragma once

// Discrete square-root Laplacians on the torus and the weak pairing on omega.

#include <cmath>
#include <vector>

#include "halfgl/domain.hpp"
#include "halfgl/fft.hpp"
#include "halfgl/kernel.hpp"
#include "halfgl/parallel.hpp"

namespace halfgl {

/// Fourier multiplier 2 pi |k| / L; the zero mode maps to zero.
inline Field fraclap_spectral(const Field& v) {
    const auto symbol = KernelTable::spectral_symbol(v.grid());
    return apply_symbol(v, symbol);
}

/// (A v)(x) = sum_o w(o) (v(x) - v(x+o)) for an arbitrary table, applied in
/// Fourier space (the sum is a circulant convolution).
inline Field apply_kernel(const KernelTable& table, const Field& v) {
    HALFGL_REQUIRE(table.grid == v.grid(), "apply_kernel: table built for a different grid");
    return apply_symbol(v, table.symbol);
}

/// (gamma_n / 2) sum_{h != 0} (2 v(x) - v(x+h) - v(x-h)) K(h) dx^n.
inline Field fraclap_singular(const Field& v, const KernelTable& table) {
    HALFGL_REQUIRE(table.kind == OperatorKind::quadrature, "fraclap_singular: needs a quadrature table");
    return apply_kernel(table, v);
}

inline Field fraclap_singular(const Field& v) { return fraclap_singular(v, KernelTable::quadrature(v.grid())); }

inline double dot_at(const Field& a, std::size_t i, const Field& b, std::size_t j) {
    double s = 0.0;
    for (int c = 0; c < a.components(); ++c) s += (a(i, c) - a(j, c)) * (b(i, c) - b(j, c));
    return s;
}

/// <(-Delta)^{1/2} v, phi>_omega: the omega x omega sum with weight gamma_n/2
/// plus the omega x omega^c sum with weight gamma_n, diagonal excluded.
inline double weak_pairing(const Field& v, const Field& phi, const WindowDomain& omega, const KernelTable& table) {
    const GridSpec& g = v.grid();
    HALFGL_REQUIRE(phi.grid() == g && omega.grid() == g && table.grid == g, "weak_pairing: grid mismatch");
    HALFGL_REQUIRE(phi.components() == v.components(), "weak_pairing: component mismatch");
    for (std::size_t k = 0; k < g.nodes(); ++k) {
        if (omega.contains(k)) continue;
        for (int c = 0; c < phi.components(); ++c) {
            if (phi(k, c) != 0.0) {
                throw InvalidArgument("weak_pairing: test field is nonzero outside omega at node " + std::to_string(k));
            }
        }
    }
    const auto inside = omega.nodes();
    std::vector<double> rows(inside.size());
    parallel_for(inside.size(), [&](std::size_t r) {
        const std::size_t x = inside[r];
        std::vector<double> terms(g.nodes(), 0.0);
        for_each_partner(g, x, [&](std::size_t y, std::size_t o) {
            if (o == 0) return;
            const double f = omega.contains(y) ? 0.5 : 1.0;
            terms[o] = f * table.weight[o] * dot_at(v, x, phi, y);
        });
        rows[r] = pairwise_sum(terms);
    });
    return g.cell() * pairwise_sum(rows);
}

inline double weak_pairing(const Field& v, const Field& phi, const WindowDomain& omega) {
    return weak_pairing(v, phi, omega, KernelTable::quadrature(v.grid()));
}

/// Relative L2 distance ||a - b|| / ||b|| over all nodes and components.
inline double relative_l2(const Field& a, const Field& b) {
    double num = 0.0;
    double den = 0.0;
    const auto va = a.values();
    const auto vb = b.values();
    for (std::size_t i = 0; i < va.size(); ++i) {
        num += (va[i] - vb[i]) * (va[i] - vb[i]);
        den += vb[i] * vb[i];
    }
    return std::sqrt(num / den);
}

}  // namespace halfgl
