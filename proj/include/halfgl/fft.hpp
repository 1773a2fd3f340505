#pragma once

// Thin FFTW wrapper for the periodic grid: cached FFTW_ESTIMATE plans (bitwise
// reproducible), unaligned execution, unnormalized forward / normalized inverse.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "halfgl/domain.hpp"

namespace halfgl {

using ComplexVector = std::vector<std::complex<double>>;

namespace detail {

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n, int N, int sign) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(n, N, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        const std::size_t size = n == 1 ? static_cast<std::size_t>(N) : static_cast<std::size_t>(N) * N;
        ComplexVector scratch(size);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan p = n == 1 ? fftw_plan_dft_1d(N, buf, buf, sign, flags) : fftw_plan_dft_2d(N, N, buf, buf, sign, flags);
        plans_.emplace(key, p);
        return p;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, p] : plans_) fftw_destroy_plan(p);
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

}  // namespace detail

inline void fft_forward(const GridSpec& g, ComplexVector& data) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(detail::PlanCache::instance().get(g.n, g.N, FFTW_FORWARD), p, p);
}

inline void fft_inverse(const GridSpec& g, ComplexVector& data) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(detail::PlanCache::instance().get(g.n, g.N, FFTW_BACKWARD), p, p);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& z : data) z *= scale;
}

/// Integer wavevector of mode index (per axis in {-N/2, ..., N/2-1}).
inline std::array<int, 2> wavevector(const GridSpec& g, std::size_t mode) {
    const auto [i0, i1] = g.multi(mode);
    const auto k = [&](int i) { return i < g.N / 2 ? i : i - g.N; };
    return {k(i0), g.n == 1 ? 0 : k(i1)};
}

/// |k| of a mode with the symmetric Nyquist convention (|-N/2| = N/2).
inline double wavenumber(const GridSpec& g, std::size_t mode) {
    const auto k = wavevector(g, mode);
    return std::hypot(static_cast<double>(k[0]), static_cast<double>(k[1]));
}

/// Applies a real, even Fourier multiplier to every component of v.
inline Field apply_symbol(const Field& v, std::span<const double> symbol) {
    const GridSpec& g = v.grid();
    HALFGL_REQUIRE(symbol.size() == g.nodes(), "apply_symbol: symbol size mismatch");
    Field out(g, v.components());
    ComplexVector buf(g.nodes());
    for (int c = 0; c < v.components(); ++c) {
        const auto src = v.component(c);
        for (std::size_t k = 0; k < g.nodes(); ++k) buf[k] = src[k];
        fft_forward(g, buf);
        for (std::size_t k = 0; k < g.nodes(); ++k) buf[k] *= symbol[k];
        fft_inverse(g, buf);
        auto dst = out.component(c);
        for (std::size_t k = 0; k < g.nodes(); ++k) dst[k] = buf[k].real();
    }
    return out;
}

/// Forward transform of a real sequence laid out on the grid.
inline ComplexVector real_spectrum(const GridSpec& g, std::span<const double> values) {
    ComplexVector buf(values.begin(), values.end());
    fft_forward(g, buf);
    return buf;
}

}  // namespace halfgl
