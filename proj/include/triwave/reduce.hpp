#pragma once

#include <cstddef>

namespace triwave::detail {

// All reductions in the library run through this fixed-order pairwise
// scheme: the summation tree depends only on the element count, so results
// are bit-reproducible for a given configuration regardless of how callers
// parallelize the surrounding work.
inline constexpr std::size_t kPairwiseLeaf = 32;

template <class F>
double pairwise_map_sum(std::size_t begin, std::size_t end, F&& f) {
    const std::size_t count = end - begin;
    if (count <= kPairwiseLeaf) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += f(i);
        return s;
    }
    const std::size_t mid = begin + count / 2;
    return pairwise_map_sum(begin, mid, f) + pairwise_map_sum(mid, end, f);
}

inline double pairwise_sum(const double* x, std::size_t n) {
    return pairwise_map_sum(std::size_t{0}, n, [x](std::size_t i) { return x[i]; });
}

}  // namespace triwave::detail
