#pragma once

#include <fftw3.h>

#include <cstddef>
#include <memory>
#include <mutex>

namespace triwave::detail {

// FFTW plan creation/destruction is not thread-safe; executions are.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

inline RealBuffer alloc_real(std::size_t count) {
    return RealBuffer(static_cast<double*>(fftw_malloc(sizeof(double) * count)));
}

inline ComplexBuffer alloc_complex(std::size_t count) {
    return ComplexBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count)));
}

/// Real-to-complex FFT pair for an n^dim lattice (n even).  Plans are made
/// once with FFTW_ESTIMATE (deterministic across runs) and executed through
/// the new-array interface, so callers may transform concurrently as long as
/// every buffer comes from alloc_real/alloc_complex (alignment match).
class SpectralTransform {
public:
    SpectralTransform(int dimension, int n) : dim_(dimension), n_(n) {
        real_size_ = 1;
        for (int d = 0; d < dim_; ++d) real_size_ *= static_cast<std::size_t>(n_);
        complex_size_ = real_size_ / static_cast<std::size_t>(n_) *
                        static_cast<std::size_t>(n_ / 2 + 1);
        RealBuffer r = alloc_real(real_size_);
        ComplexBuffer c = alloc_complex(complex_size_);
        int dims[3] = {n_, n_, n_};
        std::scoped_lock lock(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_r2c(dim_, dims, r.get(), c.get(), FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r(dim_, dims, c.get(), r.get(), FFTW_ESTIMATE);
    }

    ~SpectralTransform() {
        std::scoped_lock lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }

    SpectralTransform(const SpectralTransform&) = delete;
    SpectralTransform& operator=(const SpectralTransform&) = delete;

    std::size_t real_size() const { return real_size_; }
    std::size_t complex_size() const { return complex_size_; }

    /// Unnormalized forward transform; `in` is preserved.
    void forward(double* in, fftw_complex* out) const {
        fftw_execute_dft_r2c(fwd_, in, out);
    }

    /// Unnormalized inverse transform; `in` is clobbered (multi-d c2r).
    void inverse(fftw_complex* in, double* out) const {
        fftw_execute_dft_c2r(bwd_, in, out);
    }

private:
    int dim_;
    int n_;
    std::size_t real_size_ = 0;
    std::size_t complex_size_ = 0;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

}  // namespace triwave::detail
