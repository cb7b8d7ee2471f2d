#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "triwave/grid.hpp"

namespace triwave {

/// Physical parameters of the three-component system.  The theorem regime is
/// mu_i > 0, beta > 0; mu_i = 0 and beta = 0 are admitted as linear /
/// decoupled test modes.
struct ModelParams {
    double mu1 = 1.0, mu2 = 1.0, mu3 = 1.0;
    double beta = 1.0;
    double p = 2.5;
    double mass_a = 1.0, mass_b = 1.0, mass_c = 1.0;
    int dimension = 3;

    double mu(int i) const { return i == 0 ? mu1 : i == 1 ? mu2 : mu3; }
    double target_mass(int i) const { return i == 0 ? mass_a : i == 1 ? mass_b : mass_c; }

    void validate() const {
        if (dimension < 1 || dimension > 3)
            throw config_error("model dimension must be 1, 2 or 3");
        for (int i = 0; i < 3; ++i) {
            if (!(mu(i) >= 0.0) || !std::isfinite(mu(i)))
                throw config_error("mu" + std::to_string(i + 1) + " must be >= 0 and finite");
            if (!(target_mass(i) > 0.0) || !std::isfinite(target_mass(i)))
                throw config_error("masses (a,b,c) must be positive and finite");
        }
        if (!(beta >= 0.0) || !std::isfinite(beta))
            throw config_error("beta must be >= 0 (attained theorem regime is beta > 0)");
        const double pmax = 2.0 + 4.0 / dimension;
        if (!(p > 2.0 && p < pmax)) {
            std::ostringstream os;
            os << "p = " << p << " outside the admissible mass-subcritical range 2 < p < 2 + 4/N = "
               << pmax << " for N = " << dimension;
            throw config_error(os.str());
        }
    }
};

enum class PotentialKind { zero, harmonic, shifted_harmonic, anisotropic, from_file };

inline const char* to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::zero: return "zero";
        case PotentialKind::harmonic: return "harmonic";
        case PotentialKind::shifted_harmonic: return "shifted_harmonic";
        case PotentialKind::anisotropic: return "anisotropic";
        default: return "from_file";
    }
}

struct PotentialOptions {
    PotentialKind kind = PotentialKind::harmonic;
    std::array<double, 3> offsets{0.0, 0.0, 0.0};                 // shifted_harmonic, per component
    std::array<std::array<double, 3>, 3> weights{{{1.0, 1.0, 1.0},
                                                  {1.0, 1.0, 1.0},
                                                  {1.0, 1.0, 1.0}}};  // anisotropic, per component/axis
    std::array<std::string, 3> files;                             // from_file, per component
};

/// Sampled V_1, V_2, V_3 with their sampled minima c_i (possibly negative)
/// and a coercivity tag per component.
struct PotentialSet {
    std::array<Field, 3> v;
    std::array<double, 3> minima{0.0, 0.0, 0.0};
    std::array<bool, 3> coercive{false, false, false};
    PotentialKind kind = PotentialKind::zero;

    const Field& operator[](int i) const { return v[i]; }
};

inline PotentialSet sample_potential(const PotentialOptions& opts, const GridPtr& grid) {
    PotentialSet pot;
    pot.kind = opts.kind;
    const int N = grid->dimension();
    for (int i = 0; i < 3; ++i) {
        switch (opts.kind) {
            case PotentialKind::zero:
                pot.v[i] = Field(grid);
                pot.coercive[i] = false;
                break;
            case PotentialKind::harmonic:
            case PotentialKind::shifted_harmonic: {
                const double off = opts.kind == PotentialKind::harmonic ? 0.0 : opts.offsets[i];
                if (!std::isfinite(off)) throw config_error("potential offset must be finite");
                pot.v[i] = sample(grid, [off, N](const double* x) {
                    double r2 = 0.0;
                    for (int d = 0; d < N; ++d) r2 += x[d] * x[d];
                    return r2 + off;
                });
                pot.coercive[i] = true;
                break;
            }
            case PotentialKind::anisotropic: {
                const std::array<double, 3>& w = opts.weights[i];
                bool coercive = true;
                for (int d = 0; d < N; ++d) {
                    if (!std::isfinite(w[d])) throw config_error("potential weight must be finite");
                    if (!(w[d] > 0.0)) coercive = false;
                }
                pot.v[i] = sample(grid, [&w, N](const double* x) {
                    double s = 0.0;
                    for (int d = 0; d < N; ++d) s += w[d] * x[d] * x[d];
                    return s;
                });
                pot.coercive[i] = coercive;
                break;
            }
            case PotentialKind::from_file:
                pot.v[i] = load_field_on(grid, opts.files[i]);
                pot.coercive[i] = false;  // generating formula unknown
                break;
        }
        double mn = pot.v[i].values[0];
        for (double x : pot.v[i].values) mn = std::min(mn, x);
        pot.minima[i] = mn;
    }
    return pot;
}

// ---------------------------------------------------------------------------
// Energy functionals

/// J_infty: kinetic + nonlinear terms, no potential.
inline double energy_free(const TriField& t, const ModelParams& prm) {
    require_shared_grid(t);
    const double k1 = grad_sq_integral(t.u);
    const double k2 = grad_sq_integral(t.v);
    const double k3 = grad_sq_integral(t.w);
    const double p1 = lp_norm_pow(t.u, prm.p);
    const double p2 = lp_norm_pow(t.v, prm.p);
    const double p3 = lp_norm_pow(t.w, prm.p);
    const double cross = triple_product_integral(t.u, t.v, t.w);
    return 0.5 * k1 + 0.5 * k2 + 0.5 * k3 -
           (prm.mu1 * p1 + prm.mu2 * p2 + prm.mu3 * p3) / prm.p - prm.beta * cross;
}

/// Full J with trapping potentials.
inline double energy(const TriField& t, const PotentialSet& pot, const ModelParams& prm) {
    require_shared_grid(t);
    const double k1 = grad_sq_integral(t.u);
    const double k2 = grad_sq_integral(t.v);
    const double k3 = grad_sq_integral(t.w);
    const double w1 = weighted_sq_integral(pot[0], t.u);
    const double w2 = weighted_sq_integral(pot[1], t.v);
    const double w3 = weighted_sq_integral(pot[2], t.w);
    const double p1 = lp_norm_pow(t.u, prm.p);
    const double p2 = lp_norm_pow(t.v, prm.p);
    const double p3 = lp_norm_pow(t.w, prm.p);
    const double cross = triple_product_integral(t.u, t.v, t.w);
    return 0.5 * (k1 + w1) + 0.5 * (k2 + w2) + 0.5 * (k3 + w3) -
           (prm.mu1 * p1 + prm.mu2 * p2 + prm.mu3 * p3) / prm.p - prm.beta * cross;
}

namespace detail {

// |u|^(p-2) u with the limit value 0 at u = 0 (p > 2)
inline double power_nonlinearity(double u, double pm2) {
    return u == 0.0 ? 0.0 : std::pow(std::abs(u), pm2) * u;
}

}  // namespace detail

/// Unconstrained L^2 gradient of J: component i is
/// -lap(c_i) + V_i c_i - mu_i |c_i|^(p-2) c_i - beta * (product of partners).
inline TriField el_gradient(const TriField& t, const PotentialSet& pot, const ModelParams& prm) {
    require_shared_grid(t);
    TriField g(t.u.grid);
    const double pm2 = prm.p - 2.0;
    for (int i = 0; i < 3; ++i) {
        const Field& c = t.component(i);
        const Field& pa = t.component((i + 1) % 3);
        const Field& pb = t.component((i + 2) % 3);
        Field lap = laplacian_apply(c);
        Field& out = g.component(i);
        const double mu = prm.mu(i);
        const std::vector<double>& vpot = pot[i].values;
        for (std::size_t j = 0; j < c.size(); ++j) {
            out.values[j] = -lap.values[j] + vpot[j] * c.values[j] -
                            mu * detail::power_nonlinearity(c.values[j], pm2) -
                            prm.beta * pa.values[j] * pb.values[j];
        }
    }
    return g;
}

struct Multipliers {
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;

    double operator[](int i) const { return i == 0 ? lambda1 : i == 1 ? lambda2 : lambda3; }
    double& operator[](int i) { return i == 0 ? lambda1 : i == 1 ? lambda2 : lambda3; }
};

/// Lagrange multipliers from pairing each equation with its own component:
/// lambda_i = (mu_i |c_i|_p^p + beta int(uvw) - |grad c_i|_2^2 - int(V_i c_i^2)) / |c_i|_2^2.
inline Multipliers multipliers(const TriField& t, const PotentialSet& pot, const ModelParams& prm) {
    require_shared_grid(t);
    Multipliers m;
    const double cross = triple_product_integral(t.u, t.v, t.w);
    for (int i = 0; i < 3; ++i) {
        const Field& c = t.component(i);
        const double m2 = mass(c);
        if (!(m2 > 0.0))
            throw solve_error("multipliers undefined: component " + std::to_string(i + 1) +
                              " has zero mass");
        m[i] = (prm.mu(i) * lp_norm_pow(c, prm.p) + prm.beta * cross - grad_sq_integral(c) -
                weighted_sq_integral(pot[i], c)) /
               m2;
    }
    return m;
}

/// L^2 norms of the Euler-Lagrange residuals G_i + lambda_i c_i.
inline std::array<double, 3> el_residual(const TriField& t, const PotentialSet& pot,
                                         const ModelParams& prm, const Multipliers& m) {
    const TriField g = el_gradient(t, pot, prm);
    std::array<double, 3> r{};
    for (int i = 0; i < 3; ++i) {
        const Field& gi = g.component(i);
        const Field& ci = t.component(i);
        const double lam = m[i];
        const double* gv = gi.values.data();
        const double* cv = ci.values.data();
        const double ss = detail::pairwise_map_sum(std::size_t{0}, gi.size(), [=](std::size_t j) {
            const double x = gv[j] + lam * cv[j];
            return x * x;
        });
        r[i] = std::sqrt(t.u.grid->cell_volume() * ss);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Gagliardo-Nirenberg diagnostics

struct GNReport {
    double q = 0.0;
    double gamma_q = 0.0;
    double quotient = 0.0;
};

inline double gn_gamma(int dimension, double q) { return dimension * (q - 2.0) / (2.0 * q); }

/// Observed quotient |f|_q / (|grad f|_2^g |f|_2^(1-g)); scaling-invariant.
inline GNReport gn_quotient(const Field& f, double q) {
    const int N = f.grid->dimension();
    const double qmax = N >= 3 ? 2.0 * N / (N - 2.0) : std::numeric_limits<double>::infinity();
    if (!(q >= 2.0) || !(q < qmax))
        throw config_error("gn_quotient: q outside [2, 2N/(N-2))");
    const double m2 = mass(f);
    if (!(m2 > 0.0)) throw solve_error("gn_quotient undefined for the zero field");
    GNReport rep;
    rep.q = q;
    rep.gamma_q = gn_gamma(N, q);
    const double nq = std::pow(lp_norm_pow(f, q), 1.0 / q);
    const double grad = std::sqrt(grad_sq_integral(f));
    rep.quotient = nq / (std::pow(grad, rep.gamma_q) * std::pow(m2, 0.5 * (1.0 - rep.gamma_q)));
    return rep;
}

/// Versioned table of valid (not sharp) GN constants keyed by (N, q).
class GNConstantTable {
public:
    static GNConstantTable load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open GN constant table: " + path);
        return parse(in, path);
    }

    static GNConstantTable parse(std::istream& in, const std::string& name = "<stream>") {
        GNConstantTable table;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string tok;
            if (!(ls >> tok)) continue;
            if (tok == "version") {
                std::string eq;
                if (!(ls >> eq >> table.version_) || eq != "=")
                    throw config_error(name + ":" + std::to_string(lineno) + ": bad version line");
            } else if (tok == "C") {
                int n = 0;
                double q = 0.0, value = 0.0;
                std::string eq;
                if (!(ls >> n >> q >> eq >> value) || eq != "=" || !(value > 0.0))
                    throw config_error(name + ":" + std::to_string(lineno) + ": bad constant entry");
                table.entries_[{n, key_of(q)}] = value;
            } else {
                throw config_error(name + ":" + std::to_string(lineno) + ": unknown directive '" +
                                   tok + "'");
            }
        }
        if (table.entries_.empty())
            throw config_error(name + ": GN constant table has no entries");
        return table;
    }

    int version() const { return version_; }

    double lookup(int dimension, double q) const {
        auto it = entries_.find({dimension, key_of(q)});
        if (it == entries_.end()) {
            std::ostringstream os;
            os << "no GN constant for (N=" << dimension << ", q=" << q << ") in table";
            throw config_error(os.str());
        }
        return it->second;
    }

    bool contains(int dimension, double q) const {
        return entries_.count({dimension, key_of(q)}) != 0;
    }

private:
    // q keys quantized to 1e-6 so lookups tolerate decimal round-trips
    static long long key_of(double q) { return std::llround(q * 1e6); }

    int version_ = 0;
    std::map<std::pair<int, long long>, double> entries_;
};

/// Lower bound on J over the constraint set: kinetic halves minus the
/// GN-controlled nonlinear terms, the Young-split cubic coupling, and the
/// potential floor 0.5 * (c1 a + c2 b + c3 c).  Valid whenever the table's
/// constants are valid GN constants; the input must be mass-normalized.
inline double coercivity_bound(const TriField& t, const PotentialSet& pot, const ModelParams& prm,
                               const GNConstantTable& table) {
    require_shared_grid(t);
    const int N = prm.dimension;
    const double cp = table.lookup(N, prm.p);
    const double c3 = table.lookup(N, 3.0);
    const double gp = gn_gamma(N, prm.p);
    const double g3 = gn_gamma(N, 3.0);

    for (int i = 0; i < 3; ++i) {
        const double m2 = mass(t.component(i));
        if (std::abs(m2 - prm.target_mass(i)) > 1e-6 * prm.target_mass(i))
            throw misuse_error("coercivity_bound requires a mass-normalized triple");
    }

    double bound = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double grad = std::sqrt(grad_sq_integral(t.component(i)));
        const double mi = prm.target_mass(i);
        // |c|_p^p <= C_p^p m^(p(1-g_p)/2) grad^(N(p-2)/2)
        const double cpm = std::pow(cp, prm.p) * std::pow(mi, 0.5 * prm.p * (1.0 - gp));
        // |c|_3^3 <= C_3^3 m^(3(1-g_3)/2) grad^(N/2)
        const double c3m = std::pow(c3, 3.0) * std::pow(mi, 1.5 * (1.0 - g3));
        bound += 0.5 * grad * grad;
        bound -= prm.mu(i) * cpm / prm.p * std::pow(grad, 0.5 * N * (prm.p - 2.0));
        bound -= prm.beta * c3m / 3.0 * std::pow(grad, 0.5 * N);
        bound += 0.5 * pot.minima[i] * mi;
    }
    return bound;
}

/// Pointwise modulus of each component.  FD grids only: the forward
/// difference quotients satisfy |d|u|| <= |du| edge by edge, so the energy
/// cannot increase for beta >= 0; no such pointwise bound holds spectrally.
inline TriField symmetrize(const TriField& t) {
    require_shared_grid(t);
    if (t.u.grid->discretization() != Discretization::fd_dirichlet)
        throw unsupported_error("symmetrize requires the fd_dirichlet discretization");
    TriField out(t.u.grid);
    for (int i = 0; i < 3; ++i) {
        const std::vector<double>& src = t.component(i).values;
        std::vector<double>& dst = out.component(i).values;
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] = std::abs(src[j]);
    }
    return out;
}

}  // namespace triwave
