#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "triwave/solver.hpp"

namespace triwave {

enum class OracleProvenance { analytic, scalar_oracle, comparison };

struct OracleCase {
    std::string name;
    ModelParams params;
    PotentialKind potential_kind = PotentialKind::harmonic;
    double expected_energy = 0.0;
    Multipliers expected_multipliers;
    double tolerance = 0.0;
    OracleProvenance provenance = OracleProvenance::analytic;
};

/// Closed-form harmonic-oscillator benchmark: with mu_i = beta = 0 and
/// V = |x|^2 the per-component ground energy is N/2 per unit mass, so the
/// total is (N/2)(a+b+c) with multipliers -N.  Tolerance: 1e-8 floor, plus
/// 0.25 h^2 N (a+b+c) for second-order FD, plus a spectral tail estimate
/// exp(-kmax^2/4) for spectral grids.
inline OracleCase oracle_harmonic(const ModelParams& prm, const GridSpec& spec) {
    if (prm.mu1 != 0.0 || prm.mu2 != 0.0 || prm.mu3 != 0.0 || prm.beta != 0.0)
        throw misuse_error("oracle_harmonic requires mu_i = beta = 0");
    prm.validate();
    spec.validate();
    if (prm.dimension != spec.dimension)
        throw misuse_error("oracle_harmonic: model/grid dimension mismatch");

    OracleCase oc;
    oc.name = "harmonic_n" + std::to_string(spec.dimension);
    oc.params = prm;
    oc.potential_kind = PotentialKind::harmonic;
    const double total_mass = prm.mass_a + prm.mass_b + prm.mass_c;
    oc.expected_energy = 0.5 * spec.dimension * total_mass;
    for (int i = 0; i < 3; ++i) oc.expected_multipliers[i] = -static_cast<double>(spec.dimension);
    const double h = 2.0 * spec.half_width / spec.points_per_axis;
    if (spec.discretization == Discretization::fd_dirichlet) {
        oc.tolerance = std::max(1e-8, 0.25 * h * h * spec.dimension * total_mass);
    } else {
        const double kmax = std::numbers::pi / h;
        oc.tolerance = std::max(1e-8, oc.expected_energy * std::exp(-0.25 * kmax * kmax));
    }
    oc.provenance = OracleProvenance::analytic;
    return oc;
}

struct OracleRun {
    OracleCase oracle;
    SolveResult result;
    double energy_error = 0.0;
    bool passed = false;
};

inline OracleRun run_oracle(const OracleCase& oc, const GridSpec& spec, const SolverOptions& opts) {
    OracleRun run;
    run.oracle = oc;
    const GridPtr grid = build_grid(spec);
    PotentialOptions popt;
    popt.kind = oc.potential_kind;
    const PotentialSet pot = sample_potential(popt, grid);
    const TriField init = make_initial(grid, oc.params, opts);
    run.result = minimize(init, pot, oc.params, opts);
    run.energy_error = std::abs(run.result.energy - oc.expected_energy);
    run.passed = run.result.converged && run.energy_error <= oc.tolerance;
    return run;
}

// ---------------------------------------------------------------------------
// Scalar solver: an independent single-component route used to cross-check
// the three-component solve in the decoupled (beta = 0) regime.

struct ScalarSolveResult {
    Field minimizer;
    double energy = 0.0;
    double lambda = 0.0;
    double residual = 0.0;
    long iterations = 0;
    bool converged = false;
};

inline ScalarSolveResult minimize_scalar(const Field& init, const Field& potential, double mu,
                                         double p, double target_mass, const SolverOptions& opts) {
    opts.validate();
    const GridPtr grid = init.grid;
    require_same_grid(init, potential, "minimize_scalar");

    auto renorm = [&](Field f) {
        const double m = mass(f);
        if (!(m > 0.0)) throw solve_error("minimize_scalar: zero-mass iterate");
        const double s = std::sqrt(target_mass / m);
        for (double& v : f.values) v *= s;
        return f;
    };
    auto energy_of = [&](const Field& f) {
        return 0.5 * (grad_sq_integral(f) + weighted_sq_integral(potential, f)) -
               mu / p * lp_norm_pow(f, p);
    };
    auto gradient_of = [&](const Field& f) {
        Field lap = laplacian_apply(f);
        Field g(grid);
        const double pm2 = p - 2.0;
        for (std::size_t j = 0; j < f.size(); ++j)
            g.values[j] = -lap.values[j] + potential.values[j] * f.values[j] -
                          mu * detail::power_nonlinearity(f.values[j], pm2);
        return g;
    };

    Field f = renorm(init);
    double e_current = energy_of(f);
    const double tau0 = opts.step_size > 0.0 ? opts.step_size : default_step_size(*grid);
    double tau = tau0;
    double last_decrease = std::numeric_limits<double>::infinity();
    int stalls = 0;

    ScalarSolveResult out;
    long iter = 0;
    for (iter = 0; iter < opts.max_iters; ++iter) {
        const Field g = gradient_of(f);
        const double lambda = (mu * lp_norm_pow(f, p) - grad_sq_integral(f) -
                               weighted_sq_integral(potential, f)) /
                              mass(f);
        const double* gv = g.values.data();
        const double* fv = f.values.data();
        const double ss = detail::pairwise_map_sum(std::size_t{0}, f.size(), [=](std::size_t j) {
            const double x = gv[j] + lambda * fv[j];
            return x * x;
        });
        const double res = std::sqrt(grid->cell_volume() * ss);
        out.lambda = lambda;
        out.residual = res;
        if (res / std::sqrt(target_mass) < opts.tol_residual && last_decrease < opts.tol_energy) {
            out.converged = true;
            break;
        }
        if (stalls >= 3) {
            out.converged = res / std::sqrt(target_mass) < opts.tol_residual;
            break;
        }
        auto relative_residual_of = [&](const Field& s) {
            const Field gs = gradient_of(s);
            const double ls = (mu * lp_norm_pow(s, p) - grad_sq_integral(s) -
                               weighted_sq_integral(potential, s)) /
                              mass(s);
            const double* gv = gs.values.data();
            const double* sv = s.values.data();
            const double ss = detail::pairwise_map_sum(std::size_t{0}, s.size(), [=](std::size_t j) {
                const double x = gv[j] + ls * sv[j];
                return x * x;
            });
            return std::sqrt(grid->cell_volume() * ss / target_mass);
        };

        // same noise-band endgame as the triple solver: sub-resolution steps
        // are accepted when the EL residual does not grow, with the tracked
        // energy clamped
        const double noise_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(1.0, std::abs(e_current));
        const double rel_now = res / std::sqrt(target_mass);
        bool accepted = false;
        bool measurable = false;
        Field next(grid);
        double e_next = 0.0;
        double trial_tau = tau;
        for (int cut = 0; cut <= 40; ++cut) {
            next = Field(grid);
            for (std::size_t j = 0; j < f.size(); ++j)
                next.values[j] = f.values[j] - trial_tau * g.values[j];
            next = renorm(std::move(next));
            e_next = energy_of(next);
            if (std::isfinite(e_next) && e_next <= e_current) {
                accepted = true;
                measurable = true;
                tau = trial_tau;
                break;
            }
            if (std::isfinite(e_next) && e_next <= e_current + noise_floor &&
                relative_residual_of(next) <= rel_now) {
                accepted = true;
                measurable = false;
                tau = trial_tau;
                break;
            }
            if (!opts.line_search) break;
            trial_tau *= 0.5;
        }
        if (accepted) {
            f = std::move(next);
            if (measurable) {
                last_decrease = (e_current - e_next) / std::max(1.0, std::abs(e_next));
                e_current = e_next;
                tau = std::min(tau * 1.25, tau0);
            } else {
                last_decrease = 0.0;
            }
            stalls = 0;
        } else {
            ++stalls;
            last_decrease = 0.0;
        }
    }
    out.iterations = iter;
    out.minimizer = f;
    out.energy = energy_of(f);
    return out;
}

/// Three independent scalar solves vs. one decoupled triple solve, identical
/// init and options.
struct DecouplingCheck {
    double triple_energy = 0.0;
    double scalar_energy_sum = 0.0;
    double energy_diff = 0.0;
    double profile_l2_diff = 0.0;
    bool all_converged = false;
};

inline DecouplingCheck decoupling_check(const GridPtr& grid, const ModelParams& prm,
                                        const PotentialSet& pot, const SolverOptions& opts) {
    if (prm.beta != 0.0) throw misuse_error("decoupling_check requires beta = 0");
    const TriField init = make_initial(grid, prm, opts);
    const SolveResult triple = minimize(init, pot, prm, opts);

    DecouplingCheck out;
    out.triple_energy = triple.energy;
    out.all_converged = triple.converged;
    double sum = 0.0, l2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const ScalarSolveResult scalar = minimize_scalar(init.component(i), pot[i], prm.mu(i),
                                                         prm.p, prm.target_mass(i), opts);
        sum += scalar.energy;
        out.all_converged = out.all_converged && scalar.converged;
        const Field& a = triple.minimizer.component(i);
        const Field& b = scalar.minimizer;
        const double* av = a.values.data();
        const double* bv = b.values.data();
        const double ss = detail::pairwise_map_sum(std::size_t{0}, a.size(), [=](std::size_t j) {
            const double d = av[j] - bv[j];
            return d * d;
        });
        l2 = std::max(l2, std::sqrt(grid->cell_volume() * ss));
    }
    out.scalar_energy_sum = sum;
    out.energy_diff = std::abs(sum - triple.energy);
    out.profile_l2_diff = l2;
    return out;
}

// ---------------------------------------------------------------------------
// Trapped-vs-free comparison (the discretized lower bound
// m >= m_inf + 0.5 int sum V_i (minimizer components)^2).

inline double free_vs_trapped(const SolveResult& trapped, const SolveResult& free_result,
                              const PotentialSet& pot, const ModelParams& prm) {
    const GridPtr gt = trapped.minimizer.u.grid;
    const GridPtr gf = free_result.minimizer.u.grid;
    if (!(gt->spec() == gf->spec()))
        throw comparison_error("free_vs_trapped: results live on different grids");
    if (!trapped.converged || !free_result.converged)
        throw comparison_error("free_vs_trapped: both solves must be converged");
    // both results must actually belong to (pot, prm): recompute their energies
    if (std::abs(energy(trapped.minimizer, pot, prm) - trapped.energy) >
        1e-9 * (1.0 + std::abs(trapped.energy)))
        throw comparison_error("free_vs_trapped: trapped result inconsistent with pot/params");
    PotentialOptions zero_opt;
    zero_opt.kind = PotentialKind::zero;
    const PotentialSet zero_pot = sample_potential(zero_opt, gf);
    if (std::abs(energy(free_result.minimizer, zero_pot, prm) - free_result.energy) >
        1e-9 * (1.0 + std::abs(free_result.energy)))
        throw comparison_error("free_vs_trapped: free result inconsistent with params");

    double vterm = 0.0;
    for (int i = 0; i < 3; ++i)
        vterm += weighted_sq_integral(pot[i], trapped.minimizer.component(i));
    return trapped.energy - (free_result.energy + 0.5 * vterm);
}

// ---------------------------------------------------------------------------
// Randomized inequality sweeps

enum class InequalityName { gn, coercivity, symmetrize, energy_decomposition };

inline const char* to_string(InequalityName n) {
    switch (n) {
        case InequalityName::gn: return "gn";
        case InequalityName::coercivity: return "coercivity";
        case InequalityName::symmetrize: return "symmetrize";
        default: return "energy_decomposition";
    }
}

inline InequalityName inequality_from_string(const std::string& s) {
    if (s == "gn") return InequalityName::gn;
    if (s == "coercivity") return InequalityName::coercivity;
    if (s == "symmetrize") return InequalityName::symmetrize;
    if (s == "energy_decomposition" || s == "decomposition")
        return InequalityName::energy_decomposition;
    throw config_error("unknown inequality sweep '" + s + "'");
}

struct InequalityReport {
    std::string name;
    long trials = 0;
    long violations = 0;
    double worst_margin = 0.0;
    std::uint64_t seed = 0;
};

/// Evaluate one named inequality over `trials` random band-limited triples.
/// Margins: gn and coercivity and symmetrize record RHS - LHS (min over the
/// sweep; nonnegative = pass); energy_decomposition records the largest
/// relative deviation of the exact identity (violation above 1e-12).
inline InequalityReport inequality_sweep(InequalityName name, long trials, std::uint64_t seed,
                                         const GridPtr& grid, const ModelParams& prm,
                                         const PotentialSet& pot,
                                         const GNConstantTable* table = nullptr,
                                         const std::vector<double>& q_list = {2.5, 3.0, 4.0}) {
    if (trials < 1) throw config_error("inequality_sweep: trials must be >= 1");
    if ((name == InequalityName::gn || name == InequalityName::coercivity) && table == nullptr)
        throw config_error("inequality_sweep: this sweep needs a GN constant table");
    if (name == InequalityName::symmetrize &&
        grid->discretization() != Discretization::fd_dirichlet)
        throw config_error("symmetrize sweep requires an fd_dirichlet grid");

    InequalityReport rep;
    rep.name = to_string(name);
    rep.trials = trials;
    rep.seed = seed;
    bool first = true;
    const std::array<double, 3> masses = target_masses(prm);

    for (long k = 0; k < trials; ++k) {
        TriField t(grid);
        for (int i = 0; i < 3; ++i)
            t.component(i) =
                band_limited_noise(grid, seed + 3 * static_cast<std::uint64_t>(k) + i);
        t = renormalize(t, masses);

        auto record = [&](double margin, bool violated) {
            if (violated) ++rep.violations;
            if (first) {
                rep.worst_margin = margin;
                first = false;
            } else if (name == InequalityName::energy_decomposition) {
                rep.worst_margin = std::max(rep.worst_margin, margin);
            } else {
                rep.worst_margin = std::min(rep.worst_margin, margin);
            }
        };

        switch (name) {
            case InequalityName::gn:
                for (int i = 0; i < 3; ++i) {
                    for (double q : q_list) {
                        const GNReport g = gn_quotient(t.component(i), q);
                        const double c = table->lookup(grid->dimension(), q);
                        record(c - g.quotient, g.quotient > c);
                    }
                }
                break;
            case InequalityName::coercivity: {
                const double e = energy(t, pot, prm);
                const double bound = coercivity_bound(t, pot, prm, *table);
                record(e - bound, e < bound);
                break;
            }
            case InequalityName::symmetrize: {
                const double e = energy(t, pot, prm);
                const double es = energy(symmetrize(t), pot, prm);
                record(e - es, es > e);
                break;
            }
            case InequalityName::energy_decomposition: {
                const double e = energy(t, pot, prm);
                const double ef = energy_free(t, prm);
                double vterm = 0.0;
                for (int i = 0; i < 3; ++i)
                    vterm += weighted_sq_integral(pot[i], t.component(i));
                vterm *= 0.5;
                const double scale =
                    std::max({1.0, std::abs(e), std::abs(ef), std::abs(vterm)});
                const double dev = std::abs(e - ef - vterm) / scale;
                record(dev, dev > 1e-12);
                break;
            }
        }
    }
    return rep;
}

}  // namespace triwave
