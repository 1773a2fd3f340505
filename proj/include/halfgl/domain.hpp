#pragma once

// Grids on a large torus standing in for R^n, windows inside it, and sampled
// vector fields.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "halfgl/errors.hpp"

namespace halfgl {

using Point = std::array<double, 2>;  // y = 0 when n = 1

/// Uniform grid on the torus [-L/2, L/2)^n with N samples per axis.
struct GridSpec {
    int n = 1;
    double L = 1.0;
    int N = 8;

    double dx() const { return L / N; }
    std::size_t nodes() const {
        return n == 1 ? static_cast<std::size_t>(N) : static_cast<std::size_t>(N) * N;
    }
    /// Cell volume dx^n.
    double cell() const { return n == 1 ? dx() : dx() * dx(); }

    double coord(int i) const { return -0.5 * L + i * dx(); }

    // Row-major: the last axis varies fastest.
    std::array<int, 2> multi(std::size_t node) const {
        if (n == 1) return {static_cast<int>(node), 0};
        return {static_cast<int>(node / N), static_cast<int>(node % N)};
    }
    std::size_t flat(int i0, int i1 = 0) const {
        const auto w = [this](int i) { return static_cast<std::size_t>(((i % N) + N) % N); };
        return n == 1 ? w(i0) : w(i0) * N + w(i1);
    }
    Point point(std::size_t node) const {
        const auto [i0, i1] = multi(node);
        return {coord(i0), n == 1 ? 0.0 : coord(i1)};
    }

    /// Minimum-image displacement represented by offset index o (per axis o in [0,N)).
    double offset_length(int o) const { return (o <= N / 2 ? o : o - N) * dx(); }
    Point offset(std::size_t off) const {
        const auto [o0, o1] = multi(off);
        return {offset_length(o0), n == 1 ? 0.0 : offset_length(o1)};
    }
    /// Offset index taking node a to node b (b - a, periodic).
    std::size_t offset_between(std::size_t a, std::size_t b) const {
        const auto ia = multi(a);
        const auto ib = multi(b);
        return flat(ib[0] - ia[0], ib[1] - ia[1]);
    }
    std::size_t shift(std::size_t node, std::size_t off) const {
        const auto i = multi(node);
        const auto o = multi(off);
        return flat(i[0] + o[0], i[1] + o[1]);
    }
    /// Node closest to the origin.
    std::size_t origin() const { return n == 1 ? flat(N / 2) : flat(N / 2, N / 2); }

    bool operator==(const GridSpec&) const = default;
};

inline GridSpec make_grid(int n, double L, int N) {
    HALFGL_REQUIRE(n == 1 || n == 2, "make_grid: dimension must be 1 or 2, got " + std::to_string(n));
    HALFGL_REQUIRE(std::isfinite(L) && L > 0.0, "make_grid: L must be positive");
    HALFGL_REQUIRE(N >= 8, "make_grid: N must be at least 8, got " + std::to_string(N));
    HALFGL_REQUIRE(N % 2 == 0, "make_grid: N must be even, got " + std::to_string(N));
    return GridSpec{n, L, N};
}

enum class WindowShape { interval, disc };

inline const char* to_string(WindowShape s) { return s == WindowShape::interval ? "interval" : "disc"; }

/// The bounded open set omega: {|x| < a}, evaluated at grid nodes.
class WindowDomain {
public:
    WindowDomain(const GridSpec& grid, double a) : grid_(grid), a_(a) {
        HALFGL_REQUIRE(a > 0.0, "WindowDomain: half-width must be positive");
        HALFGL_REQUIRE(a < 0.25 * grid.L, "WindowDomain: half-width must be below L/4");
        mask_.resize(grid.nodes(), 0);
        for (std::size_t k = 0; k < grid.nodes(); ++k) {
            const Point p = grid.point(k);
            if (std::hypot(p[0], p[1]) < a) {
                mask_[k] = 1;
                inside_.push_back(k);
            }
        }
        HALFGL_REQUIRE(!inside_.empty(), "WindowDomain: window contains no grid node");
    }

    const GridSpec& grid() const { return grid_; }
    double half_width() const { return a_; }
    WindowShape shape() const { return grid_.n == 1 ? WindowShape::interval : WindowShape::disc; }
    bool contains(std::size_t node) const { return mask_[node] != 0; }
    std::span<const std::uint8_t> mask() const { return mask_; }
    /// Nodes of omega in increasing index order.
    std::span<const std::size_t> nodes() const { return inside_; }
    /// Lebesgue measure of the node set (count * dx^n).
    double measure() const { return static_cast<double>(inside_.size()) * grid_.cell(); }

private:
    GridSpec grid_;
    double a_;
    std::vector<std::uint8_t> mask_;
    std::vector<std::size_t> inside_;
};

/// m-component real field on a grid; component-major storage.
class Field {
public:
    Field() = default;
    Field(const GridSpec& grid, int m) : grid_(grid), m_(m), data_(grid.nodes() * static_cast<std::size_t>(m), 0.0) {
        HALFGL_REQUIRE(m >= 1, "Field: need at least one component");
    }

    const GridSpec& grid() const { return grid_; }
    int components() const { return m_; }
    std::size_t nodes() const { return grid_.nodes(); }

    double& operator()(std::size_t node, int c) { return data_[static_cast<std::size_t>(c) * nodes() + node]; }
    double operator()(std::size_t node, int c) const { return data_[static_cast<std::size_t>(c) * nodes() + node]; }

    std::span<double> component(int c) { return std::span<double>(data_).subspan(static_cast<std::size_t>(c) * nodes(), nodes()); }
    std::span<const double> component(int c) const {
        return std::span<const double>(data_).subspan(static_cast<std::size_t>(c) * nodes(), nodes());
    }
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    double norm2_at(std::size_t node) const {
        double s = 0.0;
        for (int c = 0; c < m_; ++c) s += (*this)(node, c) * (*this)(node, c);
        return s;
    }

    bool operator==(const Field&) const = default;

private:
    GridSpec grid_{};
    int m_ = 1;
    std::vector<double> data_;
};

/// Pointwise evaluation of gen(Point) -> indexable of size m at every node.
template <class Gen>
Field sample(const GridSpec& grid, int m, Gen&& gen) {
    Field f(grid, m);
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
        const Point p = grid.point(k);
        const auto value = gen(p);
        for (int c = 0; c < m; ++c) {
            const double x = value[static_cast<std::size_t>(c)];
            if (!std::isfinite(x)) {
                throw InvalidArgument("sample: non-finite generator output at node " + std::to_string(k) + " (x=" +
                                      std::to_string(p[0]) + ", y=" + std::to_string(p[1]) + ")");
            }
            f(k, c) = x;
        }
    }
    return f;
}

inline Field constant_field(const GridSpec& grid, std::span<const double> value) {
    Field f(grid, static_cast<int>(value.size()));
    for (int c = 0; c < f.components(); ++c)
        for (double& x : f.component(c)) x = value[static_cast<std::size_t>(c)];
    return f;
}

inline Field modulus_field(const Field& v) {
    Field out(v.grid(), 1);
    for (std::size_t k = 0; k < v.nodes(); ++k) out(k, 0) = std::sqrt(v.norm2_at(k));
    return out;
}

inline double max_modulus(const Field& v) {
    double m = 0.0;
    for (std::size_t k = 0; k < v.nodes(); ++k) m = std::max(m, v.norm2_at(k));
    return std::sqrt(m);
}

/// v / |v| at every node; throws if |v| falls below floor anywhere.
inline Field project_sphere(const Field& v, double floor = 1e-8) {
    Field out(v.grid(), v.components());
    for (std::size_t k = 0; k < v.nodes(); ++k) {
        const double r = std::sqrt(v.norm2_at(k));
        if (!(r > floor)) {
            throw InvalidArgument("project_sphere: modulus " + std::to_string(r) + " below floor at node " +
                                  std::to_string(k));
        }
        for (int c = 0; c < v.components(); ++c) out(k, c) = v(k, c) / r;
    }
    return out;
}

inline bool all_finite(const Field& v) {
    for (double x : v.values())
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace halfgl
