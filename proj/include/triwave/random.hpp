#pragma once

#include <cmath>
#include <random>

#include "triwave/grid.hpp"

namespace triwave {

/// Smooth random test field: white noise filtered to the lowest n/4 modes
/// per axis, with the k=0 mode removed (a pure mean has no gradient and
/// breaks every kinetic-energy comparison).  Deterministic in the seed.
inline Field band_limited_noise(const GridPtr& grid, std::uint64_t seed) {
    const Grid& g = *grid;
    if (!g.transform())
        throw unsupported_error("band_limited_noise needs an even points_per_axis");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Field f(grid);
    for (double& v : f.values) v = normal(rng);

    const int n = g.points_per_axis();
    const int band = n / 4;
    const double cutoff = g.axis_k2()[band];  // keep |sigma_d| <= n/4 on every axis
    const std::vector<double>& k2 = g.axis_k2();

    const detail::SpectralTransform* tr = g.transform();
    detail::RealBuffer rbuf = detail::alloc_real(tr->real_size());
    detail::ComplexBuffer cbuf = detail::alloc_complex(tr->complex_size());
    std::memcpy(rbuf.get(), f.values.data(), sizeof(double) * f.size());
    tr->forward(rbuf.get(), cbuf.get());

    const int N = g.dimension();
    const int nh = n / 2 + 1;
    const int n0 = N >= 3 ? n : 1;
    const int n1 = N >= 2 ? n : 1;
    const double scale = 1.0 / static_cast<double>(tr->real_size());
    std::size_t idx = 0;
    for (int a = 0; a < n0; ++a) {
        for (int b = 0; b < n1; ++b) {
            for (int c = 0; c < nh; ++c, ++idx) {
                bool keep = k2[c] <= cutoff;
                if (N >= 2) keep = keep && k2[b] <= cutoff;
                if (N >= 3) keep = keep && k2[a] <= cutoff;
                double total = k2[c];
                if (N >= 2) total += k2[b];
                if (N >= 3) total += k2[a];
                const double m = (keep && total > 0.0) ? scale : 0.0;
                cbuf[idx][0] *= m;
                cbuf[idx][1] *= m;
            }
        }
    }
    tr->inverse(cbuf.get(), f.values.data());
    return f;
}

}  // namespace triwave
