#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <random>

#include "halfgl/io.hpp"

using namespace halfgl;

TEST(Io, NumbersRoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(i % 40) - 20);
        EXPECT_EQ(std::strtod(io::num(x).c_str(), nullptr), x);
    }
}

TEST(Io, FieldCsvLayout) {
    const auto g = make_grid(2, 4.0, 8);
    const Field v = sample(g, 2, [](Point p) { return std::array<double, 2>{p[0], p[1] * 0.5}; });
    const std::string s = io::field_csv(v).str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "x,y,v1,v2");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), static_cast<long>(g.nodes()) + 1);
    EXPECT_EQ(s.find('\r'), std::string::npos);
    EXPECT_EQ(s.back(), '\n');
}

TEST(Io, WriteReadIsBytewise) {
    const auto path = (std::filesystem::temp_directory_path() / "halfgl_io_test.csv").string();
    io::Csv csv({"a", "b"});
    csv.row({0.1, 1.0 / 3.0}).row({-2.5e-300, 7.0});
    csv.save(path);
    EXPECT_EQ(io::read_text(path), csv.str());
    std::filesystem::remove(path);
    EXPECT_THROW(io::read_text(path), InvalidArgument);
}

TEST(Io, BlaschkeJsonRoundTrip) {
    BlaschkeParams p = BlaschkeParams::canonical(2);
    p.theta = 0.3;
    p.lambda = {0.5, 2.0};
    p.a = {-1.0, 4.0};
    p.conjugate = true;
    const BlaschkeParams q = io::blaschke_from_json(io::to_json(p));
    EXPECT_EQ(q.d, p.d);
    EXPECT_EQ(q.theta, p.theta);
    EXPECT_EQ(q.lambda, p.lambda);
    EXPECT_EQ(q.a, p.a);
    EXPECT_EQ(q.conjugate, p.conjugate);
    EXPECT_THROW(io::blaschke_from_json(nlohmann::json{{"d", 2}, {"a", {1.0}}}), InvalidArgument);
}
