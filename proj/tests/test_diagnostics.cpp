#include <gtest/gtest.h>

#include <cmath>

#include "halfgl/diagnostics.hpp"

using namespace halfgl;

namespace {

ExtensionField constant_extension(const GridSpec& g, const HalfSpaceGrid& hg) {
    const std::array<double, 2> c{1.0, 0.0};
    return poisson_extend(constant_field(g, c), hg);
}

}  // namespace

TEST(Monotonicity, ConstantHasZeroEnergy) {
    const auto g = make_grid(2, 8.0, 32);
    const auto hg = HalfSpaceGrid::with_layers(g, 2.0, 40);
    const WindowDomain w(g, 1.9);
    const auto tr = monotonicity_trace(constant_extension(g, hg), w, 0.1, {0.0, 0.0}, {1.0, 1.25, 1.5});
    for (double v : tr.values) EXPECT_NEAR(v, 0.0, 1e-20);
    EXPECT_TRUE(tr.monotone());
    EXPECT_TRUE(tr.warnings.empty());
}

TEST(Monotonicity, RadiusValidationAndWarnings) {
    const auto g = make_grid(2, 8.0, 32);
    const auto hg = HalfSpaceGrid::with_layers(g, 2.0, 40);
    const WindowDomain w(g, 1.9);
    const auto u = constant_extension(g, hg);
    EXPECT_THROW(monotonicity_trace(u, w, 0.1, {0.0, 0.0}, {}), InvalidArgument);
    EXPECT_THROW(monotonicity_trace(u, w, 0.1, {0.0, 0.0}, {1.0, 0.5}), InvalidArgument);
    EXPECT_THROW(monotonicity_trace(u, w, 0.1, {0.0, 0.0}, {0.5, 1.9}), InvalidArgument);
    EXPECT_THROW(monotonicity_trace(u, w, 0.1, {1.0, 0.0}, {0.5, 1.0}), InvalidArgument);
    const auto tr = monotonicity_trace(u, w, 0.1, {0.0, 0.0}, {0.5, 1.0});
    EXPECT_EQ(tr.warnings.size(), 1u);  // 0.5 < 4 dx
}

TEST(Monotonicity, ViolationsUseSlack) {
    MonotonicityTrace tr;
    tr.radii = {1, 2, 3};
    tr.values = {1.0, 0.99, 0.9};
    EXPECT_EQ(tr.violations(), std::vector<std::size_t>{1});
    EXPECT_TRUE(tr.monotone(0.2));
}

TEST(ClearingOut, ConstantPasses) {
    const auto g = make_grid(2, 8.0, 32);
    const auto hg = HalfSpaceGrid::with_layers(g, 2.0, 40);
    const WindowDomain w(g, 1.9);
    const auto rep = clearing_out_check(constant_extension(g, hg), w, 0.1, 0.05, 0.5);
    EXPECT_TRUE(rep.applicable());
    EXPECT_TRUE(rep.pass());
    EXPECT_LE(rep.balls_checked, 64u);
    EXPECT_NEAR(rep.min_modulus, 1.0, 1e-12);
}

TEST(ClearingOut, DetectsZeroAtLowEnergy) {
    // |u| = 0.4 everywhere has no gradient, so with a huge eps the energy is
    // tiny and the ball must be flagged
    const auto g = make_grid(2, 8.0, 32);
    const auto hg = HalfSpaceGrid::with_layers(g, 2.0, 40);
    const WindowDomain w(g, 1.9);
    const std::array<double, 2> c{0.4, 0.0};
    const auto u = poisson_extend(constant_field(g, c), hg);
    const auto rep = clearing_out_check(u, w, 1e6, 0.05, 0.5);
    EXPECT_TRUE(rep.applicable());
    EXPECT_FALSE(rep.pass());
}

TEST(EpsRegularity, RequiresEpsBelowRadius) {
    const auto g = make_grid(2, 8.0, 32);
    const auto hg = HalfSpaceGrid::with_layers(g, 2.0, 40);
    const auto u = constant_extension(g, hg);
    EXPECT_THROW(eps_regularity_check(u, 2.0, 1.0, {0.0, 0.0}), InvalidArgument);
    const auto rep = eps_regularity_check(u, 0.1, 1.0, {0.0, 0.0});
    EXPECT_TRUE(rep.applicable);
    EXPECT_TRUE(rep.pass());
    EXPECT_NEAR(rep.c_hat, 0.0, 1e-20);
}

TEST(Defects, PointMassIsFoundAtItsNode) {
    const auto g = make_grid(1, 16.0, 128);
    const WindowDomain w(g, 3.0);
    const std::size_t spike = g.flat(g.N / 2 + 5);
    std::vector<std::pair<double, Field>> sweep;
    for (double eps : {0.4, 0.2, 0.1}) {
        Field e(g, 1);
        e(spike, 0) = 1.0 / g.cell();  // unit mass
        sweep.emplace_back(eps, e);
    }
    const auto rep = defect_detect_density(sweep, w);
    ASSERT_EQ(rep.points.size(), 1u);
    EXPECT_EQ(rep.points[0], spike);
    EXPECT_NEAR(rep.densities[0], 1.0, 1e-12);
}

TEST(Defects, BoundedDensityIsNotADefect) {
    const auto g = make_grid(1, 16.0, 128);
    const WindowDomain w(g, 3.0);
    std::vector<std::pair<double, Field>> sweep;
    for (double eps : {0.4, 0.2, 0.1}) sweep.emplace_back(eps, constant_field(g, std::array<double, 1>{2.0}));
    EXPECT_TRUE(defect_detect_density(sweep, w).points.empty());
}

TEST(Defects, InputValidation) {
    const auto g = make_grid(1, 16.0, 128);
    const WindowDomain w(g, 3.0);
    std::vector<std::pair<double, Field>> two{{0.2, Field(g, 1)}, {0.1, Field(g, 1)}};
    EXPECT_THROW(defect_detect_density(two, w), InvalidArgument);
    std::vector<std::pair<double, Field>> unordered{{0.1, Field(g, 1)}, {0.2, Field(g, 1)}, {0.05, Field(g, 1)}};
    EXPECT_THROW(defect_detect_density(unordered, w), InvalidArgument);
}

TEST(Sweep, ConstantDataHasZeroMultiplier) {
    const auto g = make_grid(1, 16.0, 128);
    const WindowDomain w(g, 3.0);
    const std::array<double, 2> c{1.0, 0.0};
    SolverConfig cfg;
    const auto rep = epsilon_sweep(constant_field(g, c), w, {0.4, 0.2, 0.1}, cfg);
    ASSERT_EQ(rep.entries.size(), 3u);
    for (const auto& e : rep.entries) {
        EXPECT_TRUE(e.converged);
        EXPECT_NEAR(e.total, 0.0, 1e-12);
        EXPECT_NEAR(e.multiplier_l2_err, 0.0, 1e-12);
    }
    EXPECT_TRUE(rep.defects.points.empty());
    EXPECT_THROW(epsilon_sweep(constant_field(g, c), w, {0.1, 0.2}, cfg), InvalidArgument);
}
