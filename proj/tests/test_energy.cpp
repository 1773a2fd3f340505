#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "halfgl/energy.hpp"
#include "halfgl/halfharmonic.hpp"

using namespace halfgl;

namespace {

Field bump_phase(const GridSpec& g, double amp) {
    return sample(g, 2, [&](Point p) {
        const double f = amp * std::exp(-(p[0] * p[0] + p[1] * p[1]));
        return std::array<double, 2>{std::cos(f), std::sin(f)};
    });
}

}  // namespace

TEST(Energy, ConstantFieldHasZeroEnergy) {
    const auto g = make_grid(1, 16.0, 128);
    const WindowDomain w(g, 2.0);
    const std::array<double, 2> c{0.0, 1.0};
    const auto r = gl_energy(constant_field(g, c), w, 0.1);
    EXPECT_EQ(r.dirichlet_half, 0.0);
    EXPECT_EQ(r.potential, 0.0);
    EXPECT_THROW(gl_energy(constant_field(g, c), w, 0.0), InvalidArgument);
}

TEST(Energy, PotentialOfZeroField) {
    const auto g = make_grid(1, 16.0, 128);
    const WindowDomain w(g, 2.0);
    // (1/4 eps) |omega|
    EXPECT_NEAR(potential_energy(Field(g, 2), w, 0.5), w.measure() / 2.0, 1e-12);
}

TEST(Energy, DensityIntegratesToEnergy) {
    const auto g = make_grid(1, 16.0, 256);
    const WindowDomain w(g, 3.0);
    const Field v = bump_phase(g, 1.5);
    const auto r = gl_energy(v, w, 0.2);
    double s = 0.0;
    for (std::size_t k : w.nodes()) s += r.density(k, 0);
    EXPECT_NEAR(0.5 * s * g.cell(), r.dirichlet_half, 1e-12 * r.dirichlet_half);
    for (std::size_t k = 0; k < g.nodes(); ++k) {
        if (!w.contains(k)) {
            EXPECT_EQ(r.density(k, 0), 0.0);
        }
    }
}

TEST(Energy, WindowEnergyIsMonotoneInWindow) {
    const auto g = make_grid(1, 64.0, 512);
    const Field v = blaschke_trace_field(BlaschkeParams::canonical(1), g);
    double prev = 0.0;
    for (double a : {1.0, 2.0, 4.0, 8.0, 15.0}) {
        const double e = dirichlet_half_energy(v, WindowDomain(g, a));
        EXPECT_GT(e, prev);
        prev = e;
    }
}

TEST(BoundaryEnergy, ConstantIsZero) {
    const auto g = make_grid(2, 8.0, 16);
    const auto hg = HalfSpaceGrid::with_layers(g, 2.0, 40);
    const std::array<double, 2> c{1.0, 0.0};
    const auto u = poisson_extend(constant_field(g, c), hg);
    EXPECT_NEAR(boundary_gl_energy(u, HalfBall{{0.0, 0.0}, 1.5}, 0.1), 0.0, 1e-20);
}

TEST(StressTensor, TracelessInTwoDimensions) {
    const auto g = make_grid(1, 32.0, 256);
    const auto hg = HalfSpaceGrid::with_layers(g, 8.0, 64);
    const auto u = poisson_extend(blaschke_trace_field(BlaschkeParams::canonical(1), g), hg);
    const auto T = stress_energy(u);
    for (std::size_t j : {std::size_t{5}, std::size_t{30}})
        for (std::size_t k = 0; k < g.nodes(); k += 17) EXPECT_NEAR(T.entry(j, k, 0, 0) + T.entry(j, k, 1, 1), 0.0, 1e-12);
}

TEST(InnerVariation, RejectsFieldOutsideWindow) {
    const auto g = make_grid(1, 16.0, 128);
    const WindowDomain w(g, 2.0);
    Field X(g, 1);
    X(0, 0) = 1.0;
    EXPECT_THROW(inner_variation(bump_phase(g, 1.0), X, w), InvalidArgument);
}

TEST(InnerVariation, MatchesDerivativeAlongTheFlow) {
    const auto g = make_grid(1, 16.0, 512);
    const WindowDomain w(g, 3.0);
    const Field v = bump_phase(g, 1.5);
    Field X(g, 1);
    for (std::size_t k : w.nodes()) {
        const double x = g.point(k)[0];
        X(k, 0) = std::pow(std::cos(0.5 * std::numbers::pi * x / 3.0), 2) * (1.0 + 0.3 * x);
    }
    const auto table = KernelTable::quadrature(g);
    const double t = 1e-3;
    const double fd = (dirichlet_half_energy(compose_flow(v, X, t), w, table) -
                       dirichlet_half_energy(compose_flow(v, X, -t), w, table)) / (2 * t);
    const double iv = inner_variation(v, X, w);
    EXPECT_NEAR(iv, fd, 0.03 * std::abs(fd) + 1e-6);
}

TEST(ComposeFlow, ZeroTimeIsIdentity) {
    const auto g = make_grid(2, 8.0, 16);
    const Field v = bump_phase(g, 1.0);
    Field X(g, 2);
    for (double& x : X.values()) x = 0.4;
    EXPECT_EQ(compose_flow(v, X, 0.0), v);
}
