#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "triwave/errors.hpp"
#include "triwave/fft.hpp"
#include "triwave/reduce.hpp"

namespace triwave {

enum class Discretization { spectral_periodic, fd_dirichlet };

inline const char* to_string(Discretization d) {
    return d == Discretization::spectral_periodic ? "spectral_periodic" : "fd_dirichlet";
}

/// Truncated box [-L,L]^N with n uniformly spaced nodes per axis,
/// x_j = -L + j*h, h = 2L/n (even n places a node at the origin).
struct GridSpec {
    int dimension = 3;
    double half_width = 8.0;
    int points_per_axis = 48;
    Discretization discretization = Discretization::spectral_periodic;

    void validate() const {
        if (dimension < 1 || dimension > 3)
            throw config_error("grid dimension must be 1, 2 or 3, got " + std::to_string(dimension));
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw config_error("grid half_width must be positive and finite");
        if (points_per_axis < 8)
            throw config_error("grid points_per_axis must be >= 8, got " + std::to_string(points_per_axis));
        if (discretization == Discretization::spectral_periodic && points_per_axis % 2 != 0)
            throw config_error("spectral_periodic requires an even points_per_axis, got " +
                               std::to_string(points_per_axis));
    }

    bool operator==(const GridSpec&) const = default;
};

/// Built grid: node coordinates, quadrature weight, spectral multiplier
/// tables and the FFT plan pair.  Immutable after construction; share via
/// shared_ptr<const Grid>.
class Grid {
public:
    explicit Grid(const GridSpec& spec) : spec_(spec) {
        spec_.validate();
        const int n = spec_.points_per_axis;
        h_ = 2.0 * spec_.half_width / n;
        node_count_ = 1;
        for (int d = 0; d < spec_.dimension; ++d) node_count_ *= static_cast<std::size_t>(n);
        cell_volume_ = 1.0;
        for (int d = 0; d < spec_.dimension; ++d) cell_volume_ *= h_;

        axis_coords_.resize(n);
        for (int j = 0; j < n; ++j) axis_coords_[j] = -spec_.half_width + j * h_;

        // signed-frequency squared wavenumbers (pi/L * sigma)^2; the Nyquist
        // index carries |sigma| = n/2 either way, so |k|^2 is unambiguous
        const double base = std::numbers::pi / spec_.half_width;
        axis_k2_.resize(n);
        for (int j = 0; j < n; ++j) {
            const int sigma = j <= n / 2 ? j : j - n;
            axis_k2_[j] = base * base * sigma * sigma;
        }
        if (n % 2 == 0)
            transform_ = std::make_unique<detail::SpectralTransform>(spec_.dimension, n);
    }

    const GridSpec& spec() const { return spec_; }
    int dimension() const { return spec_.dimension; }
    int points_per_axis() const { return spec_.points_per_axis; }
    double half_width() const { return spec_.half_width; }
    Discretization discretization() const { return spec_.discretization; }
    std::size_t node_count() const { return node_count_; }
    double spacing() const { return h_; }
    /// Quadrature weight h^N of every node.
    double cell_volume() const { return cell_volume_; }

    const std::vector<double>& axis_coords() const { return axis_coords_; }
    const std::vector<double>& axis_k2() const { return axis_k2_; }

    /// Row-major decomposition, axis 0 slowest.
    void node_coords(std::size_t flat, double* out) const {
        const int n = spec_.points_per_axis;
        for (int d = spec_.dimension - 1; d >= 0; --d) {
            out[d] = axis_coords_[flat % n];
            flat /= n;
        }
    }

    /// Available whenever n is even (always for spectral grids).
    const detail::SpectralTransform* transform() const { return transform_.get(); }

private:
    GridSpec spec_;
    double h_ = 0.0;
    double cell_volume_ = 0.0;
    std::size_t node_count_ = 0;
    std::vector<double> axis_coords_;
    std::vector<double> axis_k2_;
    std::unique_ptr<detail::SpectralTransform> transform_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr build_grid(const GridSpec& spec) { return std::make_shared<Grid>(spec); }

/// Real scalar lattice function bound to its grid.
struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(GridPtr g) : grid(std::move(g)), values(grid->node_count(), 0.0) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Ordered triple (u,v,w) on one shared grid.
struct TriField {
    Field u, v, w;

    TriField() = default;
    explicit TriField(const GridPtr& g) : u(g), v(g), w(g) {}

    const Field& component(int i) const { return i == 0 ? u : i == 1 ? v : w; }
    Field& component(int i) { return i == 0 ? u : i == 1 ? v : w; }
};

inline void require_same_grid(const Field& a, const Field& b, const char* what) {
    if (a.grid.get() != b.grid.get() && !(a.grid && b.grid && a.grid->spec() == b.grid->spec()))
        throw comparison_error(std::string(what) + ": fields live on different grids");
}

inline void require_shared_grid(const TriField& t) {
    require_same_grid(t.u, t.v, "trifield");
    require_same_grid(t.u, t.w, "trifield");
}

template <class Fn>
Field sample(const GridPtr& grid, Fn&& fn) {
    Field f(grid);
    double x[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < f.size(); ++i) {
        grid->node_coords(i, x);
        f.values[i] = fn(x);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Reductions

inline double integrate(const Field& f) {
    return f.grid->cell_volume() *
           detail::pairwise_sum(f.values.data(), f.values.size());
}

inline double inner(const Field& f, const Field& g) {
    require_same_grid(f, g, "inner");
    const double* a = f.values.data();
    const double* b = g.values.data();
    return f.grid->cell_volume() *
           detail::pairwise_map_sum(std::size_t{0}, f.size(),
                                    [a, b](std::size_t i) { return a[i] * b[i]; });
}

/// Integral of w * f^2 (potential energy pairing).
inline double weighted_sq_integral(const Field& w, const Field& f) {
    require_same_grid(w, f, "weighted_sq_integral");
    const double* a = w.values.data();
    const double* b = f.values.data();
    return f.grid->cell_volume() *
           detail::pairwise_map_sum(std::size_t{0}, f.size(),
                                    [a, b](std::size_t i) { return a[i] * b[i] * b[i]; });
}

inline double mass(const Field& f) { return inner(f, f); }

inline double norm_l2(const Field& f) { return std::sqrt(mass(f)); }

/// Integral of |f|^q.
inline double lp_norm_pow(const Field& f, double q) {
    const double* a = f.values.data();
    return f.grid->cell_volume() *
           detail::pairwise_map_sum(std::size_t{0}, f.size(), [a, q](std::size_t i) {
               return std::pow(std::abs(a[i]), q);
           });
}

inline double triple_product_integral(const Field& u, const Field& v, const Field& w) {
    require_same_grid(u, v, "triple_product_integral");
    require_same_grid(u, w, "triple_product_integral");
    const double* a = u.values.data();
    const double* b = v.values.data();
    const double* c = w.values.data();
    return u.grid->cell_volume() *
           detail::pairwise_map_sum(std::size_t{0}, u.size(), [a, b, c](std::size_t i) {
               return a[i] * b[i] * c[i];
           });
}

// ---------------------------------------------------------------------------
// Differential operators

namespace detail {

// flat strides for row-major axis ordering (axis 0 slowest)
inline std::array<std::size_t, 3> axis_strides(const Grid& g) {
    std::array<std::size_t, 3> s{1, 1, 1};
    const int N = g.dimension();
    const std::size_t n = static_cast<std::size_t>(g.points_per_axis());
    for (int d = N - 1; d >= 0; --d) s[d] = (d == N - 1) ? 1 : s[d + 1] * n;
    return s;
}

template <class Fn>
void spectral_apply(const Grid& g, const std::vector<double>& in, std::vector<double>& out,
                    Fn&& multiplier) {
    const SpectralTransform* tr = g.transform();
    RealBuffer rbuf = alloc_real(tr->real_size());
    ComplexBuffer cbuf = alloc_complex(tr->complex_size());
    std::memcpy(rbuf.get(), in.data(), sizeof(double) * in.size());
    tr->forward(rbuf.get(), cbuf.get());

    const int n = g.points_per_axis();
    const int N = g.dimension();
    const int nh = n / 2 + 1;
    const std::vector<double>& k2 = g.axis_k2();
    const double scale = 1.0 / static_cast<double>(tr->real_size());
    std::size_t idx = 0;
    const int n0 = N >= 3 ? n : 1;
    const int n1 = N >= 2 ? n : 1;
    for (int a = 0; a < n0; ++a) {
        for (int b = 0; b < n1; ++b) {
            for (int c = 0; c < nh; ++c, ++idx) {
                double total = k2[c];
                if (N >= 2) total += k2[b];
                if (N >= 3) total += k2[a];
                const double m = multiplier(total) * scale;
                cbuf[idx][0] *= m;
                cbuf[idx][1] *= m;
            }
        }
    }
    tr->inverse(cbuf.get(), out.data());
}

template <class Fn>
double spectral_weighted_power_sum(const Grid& g, const std::vector<double>& in, Fn&& weight) {
    const SpectralTransform* tr = g.transform();
    RealBuffer rbuf = alloc_real(tr->real_size());
    ComplexBuffer cbuf = alloc_complex(tr->complex_size());
    std::memcpy(rbuf.get(), in.data(), sizeof(double) * in.size());
    tr->forward(rbuf.get(), cbuf.get());

    const int n = g.points_per_axis();
    const int N = g.dimension();
    const int nh = n / 2 + 1;
    const std::vector<double>& k2 = g.axis_k2();
    // per-entry terms collected into a scratch array so the reduction order
    // is the fixed pairwise one
    std::vector<double> terms(tr->complex_size());
    std::size_t idx = 0;
    const int n0 = N >= 3 ? n : 1;
    const int n1 = N >= 2 ? n : 1;
    for (int a = 0; a < n0; ++a) {
        for (int b = 0; b < n1; ++b) {
            for (int c = 0; c < nh; ++c, ++idx) {
                double total = k2[c];
                if (N >= 2) total += k2[b];
                if (N >= 3) total += k2[a];
                // Hermitian multiplicity: interior last-axis entries stand
                // for a conjugate pair
                const double mult = (c == 0 || c == n / 2) ? 1.0 : 2.0;
                const double re = cbuf[idx][0];
                const double im = cbuf[idx][1];
                terms[idx] = mult * weight(total) * (re * re + im * im);
            }
        }
    }
    const double ntot = static_cast<double>(tr->real_size());
    return g.cell_volume() / ntot * detail::pairwise_sum(terms.data(), terms.size());
}

inline void fd_laplacian(const Grid& g, const std::vector<double>& in, std::vector<double>& out) {
    const int N = g.dimension();
    const std::size_t n = static_cast<std::size_t>(g.points_per_axis());
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    const std::array<std::size_t, 3> stride = axis_strides(g);
    const std::size_t total = g.node_count();
    for (std::size_t i = 0; i < total; ++i) out[i] = -2.0 * N * in[i] * inv_h2;
    for (int d = 0; d < N; ++d) {
        const std::size_t s = stride[d];
        for (std::size_t i = 0; i < total; ++i) {
            const std::size_t pos = (i / s) % n;
            if (pos > 0) out[i] += in[i - s] * inv_h2;
            if (pos + 1 < n) out[i] += in[i + s] * inv_h2;
        }
    }
}

// forward-difference kinetic sum including both boundary edges (zero ghosts),
// so that sum-by-parts against fd_laplacian is exact
inline double fd_grad_sq(const Grid& g, const std::vector<double>& in) {
    const int N = g.dimension();
    const std::size_t n = static_cast<std::size_t>(g.points_per_axis());
    const std::array<std::size_t, 3> stride = axis_strides(g);
    const std::size_t total = g.node_count();
    std::vector<double> terms(total, 0.0);
    for (int d = 0; d < N; ++d) {
        const std::size_t s = stride[d];
        for (std::size_t i = 0; i < total; ++i) {
            const std::size_t pos = (i / s) % n;
            const double right = pos + 1 < n ? in[i + s] : 0.0;  // ghost beyond +L side
            const double diff = right - in[i];
            terms[i] += diff * diff;
            if (pos == 0) terms[i] += in[i] * in[i];  // edge from the zero ghost on the -L side
        }
    }
    const double h = g.spacing();
    return g.cell_volume() / (h * h) * detail::pairwise_sum(terms.data(), terms.size());
}

}  // namespace detail

/// Integral of |grad f|^2: spectral sum of |k|^2 |f_hat(k)|^2, or
/// forward-difference quotients with zero ghosts (FD).
inline double grad_sq_integral(const Field& f) {
    const Grid& g = *f.grid;
    if (g.discretization() == Discretization::spectral_periodic)
        return detail::spectral_weighted_power_sum(g, f.values, [](double k2) { return k2; });
    return detail::fd_grad_sq(g, f.values);
}

/// Laplacian under the grid's discretization.
inline Field laplacian_apply(const Field& f) {
    Field out(f.grid);
    const Grid& g = *f.grid;
    if (g.discretization() == Discretization::spectral_periodic)
        detail::spectral_apply(g, f.values, out.values, [](double k2) { return -k2; });
    else
        detail::fd_laplacian(g, f.values, out.values);
    return out;
}

/// Forward-then-inverse spectral transform (round-trip identity up to
/// rounding); exposed for diagnostics.
inline Field spectral_roundtrip(const Field& f) {
    if (!f.grid->transform())
        throw unsupported_error("spectral_roundtrip: grid has no transform (odd n)");
    Field out(f.grid);
    detail::spectral_apply(*f.grid, f.values, out.values, [](double) { return 1.0; });
    return out;
}

// ---------------------------------------------------------------------------
// Serialization: flat binary layout and CSV for small grids.
//
//   bytes 0..3   magic "TWF1"
//   bytes 4..7   uint32 dimension N
//   bytes 8..11  uint32 points_per_axis n
//   bytes 12..15 uint32 discretization (0 spectral_periodic, 1 fd_dirichlet)
//   bytes 16..23 float64 half_width L
//   bytes 24..   n^N float64 values, row-major (axis 0 slowest), little-endian

inline constexpr char kFieldMagic[4] = {'T', 'W', 'F', '1'};

inline void save_field(const Field& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open for writing: " + path);
    const GridSpec& s = f.grid->spec();
    const std::uint32_t dim = static_cast<std::uint32_t>(s.dimension);
    const std::uint32_t n = static_cast<std::uint32_t>(s.points_per_axis);
    const std::uint32_t disc = s.discretization == Discretization::spectral_periodic ? 0 : 1;
    out.write(kFieldMagic, 4);
    out.write(reinterpret_cast<const char*>(&dim), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&disc), 4);
    out.write(reinterpret_cast<const char*>(&s.half_width), 8);
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(sizeof(double) * f.values.size()));
    if (!out) throw input_error("short write: " + path);
}

inline Field load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open field file: " + path);
    char magic[4];
    std::uint32_t dim = 0, n = 0, disc = 0;
    GridSpec spec;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&dim), 4);
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&disc), 4);
    in.read(reinterpret_cast<char*>(&spec.half_width), 8);
    if (!in || std::memcmp(magic, kFieldMagic, 4) != 0)
        throw input_error("not a field file (bad magic/header): " + path);
    if (disc > 1) throw input_error("unknown discretization tag in: " + path);
    spec.dimension = static_cast<int>(dim);
    spec.points_per_axis = static_cast<int>(n);
    spec.discretization = disc == 0 ? Discretization::spectral_periodic : Discretization::fd_dirichlet;
    try {
        spec.validate();
    } catch (const config_error& e) {
        throw input_error("invalid header in " + path + ": " + e.what());
    }
    Field f(build_grid(spec));
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(sizeof(double) * f.values.size()));
    if (!in) throw input_error("truncated field payload: " + path);
    for (double v : f.values)
        if (!std::isfinite(v)) throw input_error("non-finite value in field file: " + path);
    return f;
}

/// Load and rebind to an existing grid; header must match its spec.
inline Field load_field_on(const GridPtr& grid, const std::string& path) {
    Field f = load_field(path);
    if (!(f.grid->spec() == grid->spec()))
        throw input_error("field file grid mismatch: " + path);
    f.grid = grid;
    return f;
}

inline void save_field_csv(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    const int N = f.grid->dimension();
    const char* names[3] = {"x", "y", "z"};
    for (int d = 0; d < N; ++d) out << names[d] << ',';
    out << "value\n";
    char buf[32];
    double x[3];
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.grid->node_coords(i, x);
        for (int d = 0; d < N; ++d) {
            std::snprintf(buf, sizeof buf, "%.17g", x[d]);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", f.values[i]);
        out << buf << '\n';
    }
}

}  // namespace triwave
