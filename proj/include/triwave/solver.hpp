#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "triwave/model.hpp"
#include "triwave/random.hpp"

namespace triwave {

enum class InitKind { gaussian, constant, random, from_file };
enum class Scheme { explicit_flow, semi_implicit };

struct SolverOptions {
    double step_size = 0.0;        // <= 0: auto min(0.1, 0.5 h^2)
    long max_iters = 200000;
    double tol_residual = 1e-8;    // stop when max_i r_i / |c_i|_2 falls below
    double tol_energy = 1e-12;     // ... and the relative energy decrease stalls below
    bool line_search = true;       // backtracking: halve tau until energy does not increase
    std::uint64_t seed = 0;
    InitKind init = InitKind::gaussian;
    std::array<std::string, 3> init_files;
    Scheme scheme = Scheme::explicit_flow;
    bool symmetrize_each_iter = false;  // FD only: keeps iterates in the positive cone
    int checkpoint_every = 0;           // 0 disables checkpoint callbacks

    void validate() const {
        if (max_iters < 1) throw config_error("solver max_iters must be >= 1");
        if (!(tol_residual > 0.0)) throw config_error("solver tol_residual must be positive");
        if (!(tol_energy > 0.0)) throw config_error("solver tol_energy must be positive");
        if (step_size != 0.0 && !(step_size > 0.0))
            throw config_error("solver step_size must be positive (or 0 for auto)");
    }
};

struct IterationRecord {
    long iteration = 0;
    double energy = 0.0;
    std::array<double, 3> residuals{0.0, 0.0, 0.0};
    Multipliers lambdas;
    double step = 0.0;
};

struct SolveResult {
    TriField minimizer;
    double energy = 0.0;
    Multipliers lambdas;
    std::array<double, 3> residuals{0.0, 0.0, 0.0};
    long iterations = 0;
    std::vector<double> energy_history;
    std::vector<IterationRecord> history;
    bool converged = false;
};

/// Per-iteration observer; `checkpoint` is true every checkpoint_every
/// iterations (and on the final one).
using SolveObserver =
    std::function<void(const IterationRecord&, const TriField&, bool checkpoint)>;

/// Scale each component by sqrt(target/current); the three constraints are
/// independent.
inline TriField renormalize(const TriField& t, const std::array<double, 3>& masses) {
    require_shared_grid(t);
    TriField out(t.u.grid);
    for (int i = 0; i < 3; ++i) {
        const double current = mass(t.component(i));
        if (!(current > 0.0) || !std::isfinite(current))
            throw solve_error("degenerate initialization: component " + std::to_string(i + 1) +
                              " has zero mass");
        const double scale = std::sqrt(masses[i] / current);
        const std::vector<double>& src = t.component(i).values;
        std::vector<double>& dst = out.component(i).values;
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] = scale * src[j];
    }
    return out;
}

inline std::array<double, 3> target_masses(const ModelParams& prm) {
    return {prm.mass_a, prm.mass_b, prm.mass_c};
}

/// One explicit normalized-flow step: renormalize(t - tau * el_gradient(t)).
inline TriField descent_step(const TriField& t, const PotentialSet& pot, const ModelParams& prm,
                             double tau) {
    if (!(tau > 0.0)) throw config_error("descent_step: tau must be positive");
    const TriField g = el_gradient(t, pot, prm);
    TriField trial(t.u.grid);
    for (int i = 0; i < 3; ++i) {
        const std::vector<double>& tv = t.component(i).values;
        const std::vector<double>& gv = g.component(i).values;
        std::vector<double>& dst = trial.component(i).values;
        for (std::size_t j = 0; j < tv.size(); ++j) dst[j] = tv[j] - tau * gv[j];
    }
    return renormalize(trial, target_masses(prm));
}

inline double default_step_size(const Grid& g) {
    return std::min(0.1, 0.5 * g.spacing() * g.spacing());
}

inline TriField make_initial(const GridPtr& grid, const ModelParams& prm,
                             const SolverOptions& opts) {
    TriField t(grid);
    const int N = grid->dimension();
    switch (opts.init) {
        case InitKind::gaussian:
            for (int i = 0; i < 3; ++i)
                t.component(i) = sample(grid, [N](const double* x) {
                    double r2 = 0.0;
                    for (int d = 0; d < N; ++d) r2 += x[d] * x[d];
                    return std::exp(-0.5 * r2);
                });
            break;
        case InitKind::constant:
            for (int i = 0; i < 3; ++i)
                for (double& v : t.component(i).values) v = 1.0;
            break;
        case InitKind::random:
            for (int i = 0; i < 3; ++i)
                t.component(i) = band_limited_noise(grid, opts.seed + static_cast<std::uint64_t>(i));
            break;
        case InitKind::from_file:
            for (int i = 0; i < 3; ++i)
                t.component(i) = load_field_on(grid, opts.init_files[i]);
            break;
    }
    return renormalize(t, target_masses(prm));
}

namespace detail {

// (I + tau_pre (-lap))^{-1} rhs: diagonal in k-space on spectral grids,
// matrix-free CG on FD grids (the shifted stencil is SPD)
inline Field precondition(const Field& rhs, double tau_pre) {
    const Grid& g = *rhs.grid;
    Field out(rhs.grid);
    if (g.discretization() == Discretization::spectral_periodic) {
        spectral_apply(g, rhs.values, out.values,
                       [tau_pre](double k2) { return 1.0 / (1.0 + tau_pre * k2); });
        return out;
    }
    const std::size_t n = rhs.size();
    std::vector<double> r = rhs.values;  // x0 = 0
    std::vector<double> p = r;
    std::vector<double> ap(n);
    Field tmp(rhs.grid);
    double rs = pairwise_map_sum(std::size_t{0}, n, [&](std::size_t i) { return r[i] * r[i]; });
    const double rs0 = rs;
    for (int it = 0; it < 500 && rs > 1e-28 * rs0; ++it) {
        tmp.values = p;
        Field lap = laplacian_apply(tmp);
        for (std::size_t i = 0; i < n; ++i) ap[i] = p[i] - tau_pre * lap.values[i];
        const double pap =
            pairwise_map_sum(std::size_t{0}, n, [&](std::size_t i) { return p[i] * ap[i]; });
        const double alpha = rs / pap;
        for (std::size_t i = 0; i < n; ++i) {
            out.values[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rs_new =
            pairwise_map_sum(std::size_t{0}, n, [&](std::size_t i) { return r[i] * r[i]; });
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + (rs_new / rs) * p[i];
        rs = rs_new;
    }
    return out;
}

}  // namespace detail

/// Minimize J over the discrete constraint set by normalized gradient flow
/// with optional backtracking and an optional semi-implicit mode that
/// preconditions the projected gradient with (I + tau(-lap))^{-1}.
/// Converged means: max_i r_i/|c_i|_2 < tol_residual and the relative energy
/// decrease of the last accepted step is below tol_energy.
inline SolveResult minimize(const TriField& init, const PotentialSet& pot, const ModelParams& prm,
                            const SolverOptions& opts, const SolveObserver& observer = {}) {
    opts.validate();
    prm.validate();
    require_shared_grid(init);
    const GridPtr grid = init.u.grid;
    if (opts.symmetrize_each_iter && grid->discretization() != Discretization::fd_dirichlet)
        throw config_error("symmetrize_each_iter requires the fd_dirichlet discretization");

    const std::array<double, 3> masses = target_masses(prm);
    TriField t = renormalize(init, masses);
    if (opts.symmetrize_each_iter) t = symmetrize(t);

    const double tau0 = opts.step_size > 0.0 ? opts.step_size : default_step_size(*grid);
    double tau = tau0;

    SolveResult result;
    result.minimizer = t;
    double e_current = energy(t, pot, prm);
    result.energy = e_current;
    result.energy_history.push_back(e_current);

    double last_rel_decrease = std::numeric_limits<double>::infinity();
    int consecutive_stalls = 0;
    bool converged = false;
    long iter = 0;

    for (iter = 0; iter < opts.max_iters; ++iter) {
        const TriField g = el_gradient(t, pot, prm);
        const Multipliers lam = multipliers(t, pot, prm);

        std::array<double, 3> res{};
        double rel_res = 0.0;
        for (int i = 0; i < 3; ++i) {
            const Field& gi = g.component(i);
            const Field& ci = t.component(i);
            const double l = lam[i];
            const double* gv = gi.values.data();
            const double* cv = ci.values.data();
            const double ss =
                detail::pairwise_map_sum(std::size_t{0}, gi.size(), [=](std::size_t j) {
                    const double x = gv[j] + l * cv[j];
                    return x * x;
                });
            res[i] = std::sqrt(grid->cell_volume() * ss);
            rel_res = std::max(rel_res, res[i] / std::sqrt(masses[i]));
        }

        IterationRecord rec{iter, e_current, res, lam, tau};
        result.history.push_back(rec);
        if (observer) {
            const bool checkpoint =
                opts.checkpoint_every > 0 && iter % opts.checkpoint_every == 0;
            observer(rec, t, checkpoint);
        }

        if (rel_res < opts.tol_residual && last_rel_decrease < opts.tol_energy) {
            converged = true;
            break;
        }
        if (consecutive_stalls >= 3) {
            converged = rel_res < opts.tol_residual;
            break;
        }

        // step direction
        TriField dir(grid);
        if (opts.scheme == Scheme::explicit_flow) {
            dir = g;
        } else {
            for (int i = 0; i < 3; ++i) {
                Field proj(grid);
                const std::vector<double>& gv = g.component(i).values;
                const std::vector<double>& cv = t.component(i).values;
                const double l = lam[i];
                for (std::size_t j = 0; j < proj.size(); ++j) proj.values[j] = gv[j] + l * cv[j];
                dir.component(i) = detail::precondition(proj, tau);
            }
        }

        auto take = [&](double step_tau) {
            TriField trial(grid);
            for (int i = 0; i < 3; ++i) {
                const std::vector<double>& tv = t.component(i).values;
                const std::vector<double>& dv = dir.component(i).values;
                std::vector<double>& out = trial.component(i).values;
                for (std::size_t j = 0; j < tv.size(); ++j) out[j] = tv[j] - step_tau * dv[j];
            }
            trial = renormalize(trial, masses);
            if (opts.symmetrize_each_iter) trial = symmetrize(trial);
            return trial;
        };

        auto relative_residual = [&](const TriField& s) {
            const TriField gs = el_gradient(s, pot, prm);
            const Multipliers ls = multipliers(s, pot, prm);
            double rel = 0.0;
            for (int i = 0; i < 3; ++i) {
                const double* gv = gs.component(i).values.data();
                const double* cv = s.component(i).values.data();
                const double l = ls[i];
                const double ss = detail::pairwise_map_sum(
                    std::size_t{0}, gs.component(i).size(), [=](std::size_t j) {
                        const double x = gv[j] + l * cv[j];
                        return x * x;
                    });
                rel = std::max(rel, std::sqrt(grid->cell_volume() * ss / masses[i]));
            }
            return rel;
        };

        // Once the per-step decrease tau*r^2 falls below the floating-point
        // resolution of J the backtracking cannot certify progress from
        // energies alone.  Steps whose measured energy sits inside the fp
        // noise band are then accepted when they do not increase the EL
        // residual; the tracked energy is clamped, so the recorded history
        // stays nonincreasing, and tau stops growing while in this regime.
        const double noise_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(1.0, std::abs(e_current));
        bool accepted = false;
        bool measurable = false;
        TriField next(grid);
        double e_next = 0.0;
        if (opts.line_search) {
            double trial_tau = tau;
            for (int cut = 0; cut <= 40; ++cut) {
                next = take(trial_tau);
                e_next = energy(next, pot, prm);
                if (std::isfinite(e_next) && e_next <= e_current) {
                    accepted = true;
                    measurable = true;
                    tau = trial_tau;
                    break;
                }
                if (std::isfinite(e_next) && e_next <= e_current + noise_floor &&
                    relative_residual(next) <= rel_res) {
                    accepted = true;
                    measurable = false;
                    tau = trial_tau;
                    break;
                }
                trial_tau *= 0.5;
            }
        } else {
            next = take(tau);
            e_next = energy(next, pot, prm);
            accepted = std::isfinite(e_next);
            measurable = true;
        }

        if (accepted) {
            t = std::move(next);
            if (measurable) {
                last_rel_decrease = opts.line_search
                                        ? (e_current - e_next) / std::max(1.0, std::abs(e_next))
                                        : std::abs(e_current - e_next) /
                                              std::max(1.0, std::abs(e_next));
                e_current = e_next;
                tau = std::min(tau * 1.25, tau0);
            } else {
                last_rel_decrease = 0.0;  // stagnated at measurement resolution
            }
            consecutive_stalls = 0;
        } else {
            // every step length failed both certificates: keep the iterate
            // and let the stop logic decide
            ++consecutive_stalls;
            last_rel_decrease = 0.0;
        }
        result.energy_history.push_back(e_current);

        if (e_current <= result.energy) {
            result.energy = e_current;
            result.minimizer = t;
        }
    }

    result.iterations = iter;
    result.converged = converged;
    // report multipliers/residuals evaluated exactly at the returned iterate
    result.lambdas = multipliers(result.minimizer, pot, prm);
    result.residuals = el_residual(result.minimizer, pot, prm, result.lambdas);
    result.energy = energy(result.minimizer, pot, prm);
    if (observer && opts.checkpoint_every > 0) {
        IterationRecord final_rec{result.iterations, result.energy, result.residuals,
                                  result.lambdas, tau};
        observer(final_rec, result.minimizer, true);
    }
    return result;
}

/// Warm-started sweep over an ascending list of coupling strengths.
inline std::vector<SolveResult> continuation_in_beta(const PotentialSet& pot, ModelParams prm,
                                                     const std::vector<double>& beta_list,
                                                     const SolverOptions& opts) {
    for (std::size_t i = 0; i < beta_list.size(); ++i) {
        if (!(beta_list[i] >= 0.0)) throw config_error("beta list entries must be >= 0");
        if (i > 0 && beta_list[i] < beta_list[i - 1])
            throw config_error("beta list must be sorted ascending");
    }
    std::vector<SolveResult> out;
    if (beta_list.empty()) return out;
    const GridPtr grid = pot[0].grid;
    TriField start = make_initial(grid, prm, opts);
    for (double beta : beta_list) {
        prm.beta = beta;
        out.push_back(minimize(start, pot, prm, opts));
        start = out.back().minimizer;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Post-solve verification

struct VerificationCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    std::string detail;
};

struct VerificationReport {
    std::vector<VerificationCheck> checks;
    bool passed = false;
};

/// Desk-scale checks on a converged minimizer: exact masses, strict interior
/// positivity, finite multipliers, small EL residuals, and energy at or below
/// the Gaussian trial state.  On FD grids the flow ends in the positive cone
/// and positivity must hold at every node; on spectral grids positivity is
/// required on the interior |x|_inf <= L/2 with the far field allowed a
/// ringing floor of -1e-7 * |c|_inf.
inline VerificationReport verify_theorem(const SolveResult& result, const PotentialSet& pot,
                                         const ModelParams& prm, double tol_residual = 1e-6) {
    VerificationReport report;
    const TriField& t = result.minimizer;
    const GridPtr grid = t.u.grid;
    const bool fd = grid->discretization() == Discretization::fd_dirichlet;
    const char* comp_names[3] = {"u", "v", "w"};

    {
        VerificationCheck c{"converged", result.converged, result.converged ? 1.0 : 0.0, ""};
        if (!result.converged) c.detail = "solver did not reach the residual tolerance";
        report.checks.push_back(c);
    }

    for (int i = 0; i < 3; ++i) {
        const double m = mass(t.component(i));
        const double target = prm.target_mass(i);
        const double err = std::abs(m - target) / target;
        VerificationCheck c;
        c.name = std::string("mass_") + comp_names[i];
        c.value = err;
        c.passed = err <= 1e-12;
        if (!c.passed) c.detail = "relative mass error above 1e-12";
        report.checks.push_back(c);
    }

    for (int i = 0; i < 3; ++i) {
        const Field& c_i = t.component(i);
        double global_min = std::numeric_limits<double>::infinity();
        double interior_min = std::numeric_limits<double>::infinity();
        double max_abs = 0.0;
        const double interior_extent = 0.5 * grid->half_width();
        double x[3];
        for (std::size_t j = 0; j < c_i.size(); ++j) {
            const double v = c_i.values[j];
            global_min = std::min(global_min, v);
            max_abs = std::max(max_abs, std::abs(v));
            grid->node_coords(j, x);
            bool interior = true;
            for (int d = 0; d < grid->dimension(); ++d)
                interior = interior && std::abs(x[d]) <= interior_extent;
            if (interior) interior_min = std::min(interior_min, v);
        }
        VerificationCheck c;
        c.name = std::string("positivity_") + comp_names[i];
        if (fd) {
            c.value = global_min;
            c.passed = global_min > 0.0;
            if (!c.passed) c.detail = "component not strictly positive";
        } else {
            c.value = interior_min;
            c.passed = interior_min > 0.0 && global_min >= -1e-7 * max_abs;
            if (!c.passed) c.detail = "component not positive on the interior region";
        }
        report.checks.push_back(c);
    }

    {
        bool finite = std::isfinite(result.lambdas[0]) && std::isfinite(result.lambdas[1]) &&
                      std::isfinite(result.lambdas[2]);
        VerificationCheck c{"multipliers_finite", finite, 0.0, ""};
        if (!finite) c.detail = "non-finite Lagrange multiplier";
        report.checks.push_back(c);
    }

    {
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, result.residuals[i] / std::sqrt(prm.target_mass(i)));
        VerificationCheck c{"el_residual", worst <= tol_residual, worst, ""};
        if (!c.passed) c.detail = "relative EL residual above tolerance";
        report.checks.push_back(c);
    }

    {
        SolverOptions gauss_opts;
        gauss_opts.init = InitKind::gaussian;
        const TriField trial = make_initial(grid, prm, gauss_opts);
        const double e_trial = energy(trial, pot, prm);
        const double slack = 1e-9 * (1.0 + std::abs(e_trial));
        VerificationCheck c{"energy_below_gaussian_trial", result.energy <= e_trial + slack,
                            result.energy - e_trial, ""};
        if (!c.passed) c.detail = "minimizer energy above the Gaussian trial state";
        report.checks.push_back(c);
    }

    report.passed = true;
    for (const VerificationCheck& c : report.checks) report.passed = report.passed && c.passed;
    return report;
}

}  // namespace triwave
