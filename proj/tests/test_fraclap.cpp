#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "halfgl/energy.hpp"
#include "halfgl/fraclap.hpp"

using namespace halfgl;

namespace {

Field mode(const GridSpec& g, int k) {
    return sample(g, 1, [&](Point p) { return std::array<double, 1>{std::sin(2 * std::numbers::pi * k * p[0] / g.L)}; });
}

Field smooth_unit(const GridSpec& g) {
    return sample(g, 2, [&](Point p) {
        const double s = 2 * std::numbers::pi * p[0] / g.L;
        const double f = s + 0.5 * std::sin(2 * s);
        return std::array<double, 2>{std::cos(f), std::sin(f)};
    });
}

}  // namespace

TEST(Gamma, Constants) {
    EXPECT_NEAR(gamma_n(1), 1.0 / std::numbers::pi, 1e-15);
    EXPECT_NEAR(gamma_n(2), 0.5 / std::numbers::pi, 1e-15);
}

TEST(Spectral, Eigenfunctions1d) {
    const auto g = make_grid(1, 32.0, 512);
    for (int k : {1, 5, 17}) {
        const Field v = mode(g, k);
        Field ex = v;
        for (double& x : ex.values()) x *= 2 * std::numbers::pi * k / g.L;
        EXPECT_LT(relative_l2(fraclap_spectral(v), ex), 1e-12) << "k=" << k;
    }
}

TEST(Spectral, Eigenfunction2d) {
    const auto g = make_grid(2, 8.0, 32);
    const Field v = sample(g, 1, [&](Point p) {
        return std::array<double, 1>{std::cos(2 * std::numbers::pi * (3 * p[0] + 4 * p[1]) / g.L)};
    });
    Field ex = v;
    for (double& x : ex.values()) x *= 2 * std::numbers::pi * 5.0 / g.L;
    EXPECT_LT(relative_l2(fraclap_spectral(v), ex), 1e-12);
}

TEST(Spectral, ConstantsAreAnnihilated) {
    const auto g = make_grid(2, 8.0, 16);
    const std::array<double, 2> c{0.6, -0.8};
    const Field out = fraclap_spectral(constant_field(g, c));
    for (double x : out.values()) EXPECT_LT(std::abs(x), 1e-14);
}

TEST(Singular, AgreesWithSpectralAndConverges) {
    double prev = 1.0;
    for (int N : {256, 512, 1024}) {
        const auto g = make_grid(1, 32.0, N);
        const Field v = smooth_unit(g);
        const double err = relative_l2(fraclap_singular(v), fraclap_spectral(v));
        EXPECT_LT(err, 1e-2);
        EXPECT_LT(err, 0.6 * prev);
        prev = err;
    }
}

TEST(Singular, TwoDimensionalAgreement) {
    double prev = 1.0;
    for (int N : {32, 64}) {
        const auto g = make_grid(2, 16.0, N);
        const Field v = sample(g, 1, [&](Point p) {
            return std::array<double, 1>{std::exp(std::cos(2 * std::numbers::pi * p[0] / g.L) * std::sin(2 * std::numbers::pi * p[1] / g.L))};
        });
        const double err = relative_l2(fraclap_singular(v), fraclap_spectral(v));
        EXPECT_LT(err, 0.6 * prev) << "N=" << N;
        prev = err;
    }
    EXPECT_LT(prev, 3e-2);
}

TEST(Singular, RequiresQuadratureTable) {
    const auto g = make_grid(1, 8.0, 64);
    EXPECT_THROW(fraclap_singular(mode(g, 1), KernelTable::spectral(g)), InvalidArgument);
}

TEST(SpectralTable, WeightsAreNonnegative) {
    const auto t = KernelTable::spectral(make_grid(1, 16.0, 128));
    for (double w : t.weight) EXPECT_GE(w, -1e-14);
}

TEST(WeakPairing, RejectsTestFieldOutsideWindow) {
    const auto g = make_grid(1, 16.0, 128);
    const WindowDomain w(g, 2.0);
    Field phi(g, 1);
    phi(0, 0) = 1.0;
    EXPECT_THROW(weak_pairing(mode(g, 1), phi, w), InvalidArgument);
}

TEST(WeakPairing, EqualsPointwisePairingWithOperator) {
    const auto g = make_grid(1, 16.0, 256);
    const WindowDomain w(g, 3.0);
    const Field v = smooth_unit(g);
    Field phi(g, 2);
    for (std::size_t k : w.nodes()) {
        const double x = g.point(k)[0];
        phi(k, 0) = std::cos(x) * (9.0 - x * x);
        phi(k, 1) = x * (9.0 - x * x);
    }
    const auto table = KernelTable::quadrature(g);
    const Field Av = apply_kernel(table, v);
    double direct = 0.0;
    for (std::size_t k : w.nodes()) direct += (phi(k, 0) * Av(k, 0) + phi(k, 1) * Av(k, 1)) * g.cell();
    EXPECT_NEAR(weak_pairing(v, phi, w, table), direct, 1e-10 * std::abs(direct));
}

TEST(WeakPairing, IsTheFirstVariationOfTheEnergy) {
    const auto g = make_grid(1, 16.0, 256);
    const WindowDomain w(g, 3.0);
    const Field v = smooth_unit(g);
    Field phi(g, 2);
    for (std::size_t k : w.nodes()) {
        const double x = g.point(k)[0];
        phi(k, 1) = (9.0 - x * x) * std::exp(-x);
    }
    const auto table = KernelTable::quadrature(g);
    const double t = 1e-4;
    Field vp = v, vm = v;
    for (std::size_t i = 0; i < vp.values().size(); ++i) {
        vp.values()[i] += t * phi.values()[i];
        vm.values()[i] -= t * phi.values()[i];
    }
    const double fd = (dirichlet_half_energy(vp, w, table) - dirichlet_half_energy(vm, w, table)) / (2 * t);
    const double pairing = weak_pairing(v, phi, w, table);
    EXPECT_NEAR(fd, pairing, 1e-6 * std::abs(pairing));
}
