#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "halfgl/energy.hpp"
#include "halfgl/halfharmonic.hpp"

using namespace halfgl;

TEST(Blaschke, CanonicalTrace) {
    const auto p = BlaschkeParams::canonical(1);
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
        const Point v = blaschke_trace(p, x);
        EXPECT_NEAR(v[0], (x * x - 1) / (x * x + 1), 1e-15);
        EXPECT_NEAR(v[1], -2 * x / (x * x + 1), 1e-15);
        EXPECT_NEAR(std::hypot(v[0], v[1]), 1.0, 1e-15);
    }
}

TEST(Blaschke, ParameterValidation) {
    BlaschkeParams p = BlaschkeParams::canonical(2);
    p.lambda[1] = 0.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = BlaschkeParams::canonical(2);
    p.a.pop_back();
    EXPECT_THROW(p.validate(), InvalidArgument);
    EXPECT_THROW(blaschke_extension(BlaschkeParams::canonical(1), Point{0.0, -1.0}), InvalidArgument);
}

TEST(Blaschke, WindingNumberEqualsDegree) {
    const auto g = make_grid(1, 400.0, 4096);
    for (int d : {1, 2, 3}) {
        BlaschkeParams p = BlaschkeParams::canonical(d);
        for (int k = 0; k < d; ++k) p.a[static_cast<std::size_t>(k)] = 3.0 * k;
        EXPECT_EQ(std::abs(winding_number(blaschke_trace_field(p, g))), d);
        p.conjugate = true;
        EXPECT_EQ(std::abs(winding_number(blaschke_trace_field(p, g))), d);
    }
}

TEST(Blaschke, WindowEnergyApproachesQuantizedValue) {
    const auto g = make_grid(1, 200.0, 2048);
    const Field v = blaschke_trace_field(BlaschkeParams::canonical(1), g);
    const double e = dirichlet_half_energy(v, WindowDomain(g, 49.0));
    EXPECT_NEAR(e / quantized_energy(1), 1.0, 0.05);
}

TEST(Cayley, KnownValuesAndRoundTrip) {
    EXPECT_NEAR(std::abs(cayley(Complex(0.0, 0.0)) - Complex(-1.0, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(cayley(Complex(0.0, 1.0))), 0.0, 1e-15);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> x(-10.0, 10.0), y(0.01, 10.0);
    for (int i = 0; i < 100; ++i) {
        const Complex z(x(rng), y(rng));
        EXPECT_LT(std::abs(cayley_inverse(cayley(z)) - z), 1e-14 * std::max(1.0, std::abs(z)));
        EXPECT_LT(std::abs(cayley(z)), 1.0);
    }
    EXPECT_THROW(cayley(Complex(0.0, -1.0)), InvalidArgument);
    EXPECT_THROW(cayley_inverse(Complex(1.0, 0.0)), InvalidArgument);
}

TEST(QuantizedEnergy, Values) {
    EXPECT_DOUBLE_EQ(quantized_energy(1), std::numbers::pi);
    EXPECT_DOUBLE_EQ(quantized_energy(3), 3 * std::numbers::pi);
    EXPECT_THROW(quantized_energy(0), InvalidArgument);
}

TEST(Multiplier, ConstantIsZeroAndNonUnitRejected) {
    const auto g = make_grid(1, 16.0, 64);
    const std::array<double, 2> c{1.0, 0.0};
    EXPECT_EQ(el_multiplier(constant_field(g, c), 5), 0.0);
    const std::array<double, 2> d{0.5, 0.0};
    EXPECT_THROW(el_multiplier(constant_field(g, d), 5), InvalidArgument);
}

TEST(Multiplier, DegreeOneOracle) {
    const auto g = make_grid(1, 64.0, 4096);
    const Field v = blaschke_trace_field(BlaschkeParams::canonical(1), g);
    for (double x : {0.0, 1.0, 3.0}) {
        const std::size_t k = g.flat(static_cast<int>(std::lround((x + 32.0) / g.dx())));
        EXPECT_NEAR(el_multiplier(v, k) / (2.0 / (1.0 + x * x)), 1.0, 0.02) << "x=" << x;
    }
}

TEST(Hopf, ConstantAndBlaschke) {
    const auto g = make_grid(1, 32.0, 512);
    const auto hg = HalfSpaceGrid::graded(g, 8.0, g.dx() / 8, 1.15, g.dx());
    const std::array<double, 2> c{1.0, 0.0};
    const auto h0 = hopf_differential(poisson_extend(constant_field(g, c), hg));
    for (const auto& z : h0.value) EXPECT_LT(std::abs(z), 1e-20);
    const auto h = hopf_differential(blaschke_extension_field(BlaschkeParams::canonical(1), hg));
    EXPECT_LT(hopf_relative(h, 3.0, 0.25, 3.0), 1e-2);
    EXPECT_THROW(hopf_differential(poisson_extend(Field(make_grid(2, 8.0, 16), 2), HalfSpaceGrid::with_layers(make_grid(2, 8.0, 16), 2.0, 40))),
                 InvalidArgument);
}

TEST(Homogeneous, IdentityCircleGivesRadialMap) {
    const auto g = make_grid(2, 8.0, 64);
    const Field v = homogeneous_trace(BlaschkeParams::canonical(1), g);
    for (std::size_t k = 0; k < g.nodes(); ++k) {
        if (k == g.origin()) continue;
        const Point x = g.point(k);
        const double r = std::hypot(x[0], x[1]);
        EXPECT_NEAR(v(k, 0), x[0] / r, 1e-12);
        EXPECT_NEAR(v(k, 1), x[1] / r, 1e-12);
    }
    EXPECT_THROW(homogeneous_trace(BlaschkeParams::canonical(1), make_grid(1, 8.0, 64)), InvalidArgument);
}

TEST(Homogeneous, TangentOrthogonality) {
    const auto g = make_grid(2, 8.0, 128);
    EXPECT_LT(tangent_orthogonality(homogeneous_trace(BlaschkeParams::canonical(1), g), 0.2).max_relative(), 0.05);
    const Field twisted = sample(g, 2, [](Point x) {
        const double f = std::atan2(x[1], x[0]) + 0.8 * std::sin(std::numbers::pi * std::hypot(x[0], x[1]));
        return std::array<double, 2>{std::cos(f), std::sin(f)};
    });
    EXPECT_GT(tangent_orthogonality(twisted, 0.2).max_relative(), 0.05);
}

TEST(CircleEquation, BlaschkeOnDisc) {
    for (int d : {1, 2, 3}) {
        BlaschkeParams p = BlaschkeParams::canonical(d);
        for (int k = 0; k < d; ++k) p.a[static_cast<std::size_t>(k)] = 0.7 * k - 0.5;
        EXPECT_LT(circle_equation_residual(p), 0.03) << "d=" << d;
    }
}
