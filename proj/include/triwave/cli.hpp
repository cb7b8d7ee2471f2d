#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "triwave/analysis.hpp"
#include "triwave/config.hpp"
#include "triwave/report_json.hpp"

namespace triwave {

// exit codes shared by every subcommand
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitVerifyFailed = 3;

struct CliOverrides {
    std::optional<std::string> defaults_path;  // else $TRIWAVE_DEFAULTS, else compiled-in
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> gn_table;
    int jobs = 1;
};

namespace detail {

inline std::optional<std::string> resolve_defaults_path(const CliOverrides& ov) {
    if (ov.defaults_path) return ov.defaults_path;
    if (const char* env = std::getenv("TRIWAVE_DEFAULTS")) return std::string(env);
#ifdef TRIWAVE_DEFAULTS_FILE
    if (std::filesystem::exists(TRIWAVE_DEFAULTS_FILE)) return std::string(TRIWAVE_DEFAULTS_FILE);
#endif
    return std::nullopt;
}

inline RunConfig load_config_with_overrides(const std::string& config_path,
                                            const CliOverrides& ov) {
    RunConfig rc = load_run_config(config_path, resolve_defaults_path(ov));
    if (ov.out_dir) rc.output.directory = *ov.out_dir;
    if (ov.seed) rc.solver.seed = *ov.seed;
    if (ov.gn_table) rc.gn_table_path = *ov.gn_table;
    return rc;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    out << text;
}

inline std::string csv_cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RunArtifacts {
    SolveResult result;
    VerificationReport report;
};

// single solve plus artifact emission; shared by solve/sweep/oracle
inline RunArtifacts run_and_emit(const RunConfig& rc, const std::string& point_prefix = "") {
    const GridPtr grid = build_grid(rc.grid);
    const PotentialSet pot = sample_potential(rc.potential, grid);
    const TriField init = make_initial(grid, rc.model, rc.solver);

    const std::filesystem::path dir(rc.output.directory);
    const bool emit_any = rc.output.emit_fields || rc.output.emit_history || rc.output.emit_report;
    if (emit_any) std::filesystem::create_directories(dir);

    std::ofstream history;
    if (rc.output.emit_history) {
        history.open(dir / (point_prefix + "history.csv"));
        history << "iteration,energy,r1,r2,r3,lambda1,lambda2,lambda3\n";
    }
    SolveObserver observer = [&](const IterationRecord& rec, const TriField& t, bool checkpoint) {
        if (history.is_open()) {
            history << rec.iteration << ',' << csv_cell(rec.energy) << ','
                    << csv_cell(rec.residuals[0]) << ',' << csv_cell(rec.residuals[1]) << ','
                    << csv_cell(rec.residuals[2]) << ',' << csv_cell(rec.lambdas[0]) << ','
                    << csv_cell(rec.lambdas[1]) << ',' << csv_cell(rec.lambdas[2]) << '\n';
        }
        if (checkpoint && rc.output.emit_fields) {
            const char* names[3] = {"u", "v", "w"};
            for (int i = 0; i < 3; ++i)
                save_field(t.component(i),
                           (dir / (point_prefix + "checkpoint_" + names[i] + ".bin")).string());
        }
    };

    RunArtifacts art;
    art.result = minimize(init, pot, rc.model, rc.solver,
                          (rc.output.emit_history || rc.solver.checkpoint_every > 0) ? observer
                                                                                     : SolveObserver{});
    art.report = verify_theorem(art.result, pot, rc.model,
                                std::max(rc.solver.tol_residual * 10.0, 1e-10));

    if (rc.output.emit_fields) {
        const char* names[3] = {"u", "v", "w"};
        for (int i = 0; i < 3; ++i)
            save_field(art.result.minimizer.component(i),
                       (dir / (point_prefix + names[i] + std::string(".bin"))).string());
    }
    if (rc.output.emit_report) {
        write_text((dir / (point_prefix + "result.json")).string(),
                   result_summary_json(art.result, rc.grid, rc.model).dump(2) + "\n");
        write_text((dir / (point_prefix + "report.json")).string(),
                   to_json(art.report).dump(2) + "\n");
    }
    return art;
}

}  // namespace detail

/// solve: run the configured minimization, verify, persist artifacts.
inline int cmd_solve(const std::string& config_path, const CliOverrides& ov = {}) {
    RunConfig rc;
    try {
        rc = detail::load_config_with_overrides(config_path, ov);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    try {
        const detail::RunArtifacts art = detail::run_and_emit(rc);
        std::cout << "energy = " << art.result.energy << ", iterations = " << art.result.iterations
                  << ", converged = " << (art.result.converged ? "yes" : "no") << "\n";
        for (const VerificationCheck& c : art.report.checks)
            std::cout << "  check " << c.name << ": " << (c.passed ? "pass" : "FAIL")
                      << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
        if (!art.result.converged) return kExitNotConverged;
        if (!art.report.passed) return kExitVerifyFailed;
        return kExitOk;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const solve_error& e) {
        std::cerr << "solve error: " << e.what() << "\n";
        return kExitNotConverged;
    }
}

/// sweep: either a warm-started beta continuation or a mass-grid sweep
/// (points independent, run with up to `jobs` workers, rows written in
/// input order either way).
inline int cmd_sweep(const std::string& config_path, const std::vector<double>& beta_list,
                     const std::vector<std::array<double, 3>>& mass_grid,
                     const CliOverrides& ov = {}) {
    RunConfig rc;
    try {
        rc = detail::load_config_with_overrides(config_path, ov);
        if (beta_list.empty() && mass_grid.empty())
            throw config_error("sweep: provide --beta or --masses with at least one point");
        if (!beta_list.empty() && !mass_grid.empty())
            throw config_error("sweep: --beta and --masses are mutually exclusive");
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        const std::filesystem::path dir(rc.output.directory);
        std::filesystem::create_directories(dir);
        std::ofstream csv(dir / "sweep.csv");
        csv << "a,b,c,beta,p,m,lambda1,lambda2,lambda3,iterations,converged\n";
        bool all_converged = true;
        auto write_row = [&](const ModelParams& prm, const SolveResult& r) {
            csv << detail::csv_cell(prm.mass_a) << ',' << detail::csv_cell(prm.mass_b) << ','
                << detail::csv_cell(prm.mass_c) << ',' << detail::csv_cell(prm.beta) << ','
                << detail::csv_cell(prm.p) << ',' << detail::csv_cell(r.energy) << ','
                << detail::csv_cell(r.lambdas[0]) << ',' << detail::csv_cell(r.lambdas[1]) << ','
                << detail::csv_cell(r.lambdas[2]) << ',' << r.iterations << ','
                << (r.converged ? 1 : 0) << '\n';
            all_converged = all_converged && r.converged;
        };

        if (!beta_list.empty()) {
            const GridPtr grid = build_grid(rc.grid);
            const PotentialSet pot = sample_potential(rc.potential, grid);
            const std::vector<SolveResult> results =
                continuation_in_beta(pot, rc.model, beta_list, rc.solver);
            ModelParams prm = rc.model;
            for (std::size_t i = 0; i < results.size(); ++i) {
                prm.beta = beta_list[i];
                write_row(prm, results[i]);
                if (rc.output.emit_fields) {
                    const char* names[3] = {"u", "v", "w"};
                    for (int k = 0; k < 3; ++k)
                        save_field(results[i].minimizer.component(k),
                                   (dir / ("point_" + std::to_string(i) + "_" + names[k] + ".bin"))
                                       .string());
                }
            }
        } else {
            auto run_point = [&rc](std::array<double, 3> masses) {
                RunConfig point = rc;
                point.model.mass_a = masses[0];
                point.model.mass_b = masses[1];
                point.model.mass_c = masses[2];
                point.output.emit_fields = false;
                point.output.emit_history = false;
                point.output.emit_report = false;
                const GridPtr grid = build_grid(point.grid);
                const PotentialSet pot = sample_potential(point.potential, grid);
                const TriField init = make_initial(grid, point.model, point.solver);
                return minimize(init, pot, point.model, point.solver);
            };
            std::vector<SolveResult> results(mass_grid.size());
            const int jobs = std::max(1, ov.jobs);
            for (std::size_t base = 0; base < mass_grid.size();
                 base += static_cast<std::size_t>(jobs)) {
                std::vector<std::future<SolveResult>> batch;
                for (std::size_t i = base;
                     i < mass_grid.size() && i < base + static_cast<std::size_t>(jobs); ++i)
                    batch.push_back(std::async(std::launch::async, run_point, mass_grid[i]));
                for (std::size_t i = 0; i < batch.size(); ++i)
                    results[base + i] = batch[i].get();
            }
            for (std::size_t i = 0; i < results.size(); ++i) {
                ModelParams prm = rc.model;
                prm.mass_a = mass_grid[i][0];
                prm.mass_b = mass_grid[i][1];
                prm.mass_c = mass_grid[i][2];
                write_row(prm, results[i]);
                if (rc.output.emit_fields) {
                    const char* names[3] = {"u", "v", "w"};
                    for (int k = 0; k < 3; ++k)
                        save_field(results[i].minimizer.component(k),
                                   (dir / ("point_" + std::to_string(i) + "_" + names[k] + ".bin"))
                                       .string());
                }
            }
        }
        return all_converged ? kExitOk : kExitNotConverged;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const solve_error& e) {
        std::cerr << "solve error: " << e.what() << "\n";
        return kExitNotConverged;
    }
}

namespace detail {

struct SuiteOutcome {
    std::string name;
    bool passed = false;
    std::string summary;
    std::optional<nlohmann::ordered_json> report;
};

inline GNConstantTable load_table_or_throw(const CliOverrides& ov) {
    if (ov.gn_table) return GNConstantTable::load(*ov.gn_table);
    const std::optional<std::string> defaults = resolve_defaults_path(ov);
    if (defaults) {
        KeyValueConfig cfg = KeyValueConfig::parse_file(*defaults);
        if (auto path = cfg.get_string("paths.gn_table")) {
            // table path is relative to the defaults file
            std::filesystem::path p(*path);
            if (p.is_relative()) p = std::filesystem::path(*defaults).parent_path() / p;
            return GNConstantTable::load(p.string());
        }
    }
    throw config_error("no GN constant table: pass --table or set paths.gn_table in defaults");
}

// fixed desk-scale protocol for the verify suites (mirrors the acceptance
// criteria: 1000 trials for the randomized sweeps, 100 for the identity)
inline SuiteOutcome run_verify_suite(const std::string& name, const CliOverrides& ov) {
    SuiteOutcome out;
    out.name = name;
    std::ostringstream os;

    ModelParams prm;
    prm.mu1 = prm.mu2 = prm.mu3 = 1.0;
    prm.beta = 1.0;
    prm.p = 2.5;
    prm.dimension = 3;

    GridSpec spec;
    spec.dimension = 3;
    spec.half_width = 8.0;
    spec.points_per_axis = 16;

    PotentialOptions popt;
    popt.kind = PotentialKind::shifted_harmonic;
    popt.offsets = {0.0, -1.0, -2.0};

    if (name == "gn" || name == "coercivity") {
        const GNConstantTable table = load_table_or_throw(ov);
        spec.discretization = Discretization::spectral_periodic;
        const GridPtr grid = build_grid(spec);
        const PotentialSet pot = sample_potential(popt, grid);
        const InequalityName kind =
            name == "gn" ? InequalityName::gn : InequalityName::coercivity;
        const InequalityReport rep =
            inequality_sweep(kind, 1000, 20240610, grid, prm, pot, &table);
        out.passed = rep.violations == 0;
        os << rep.trials << " trials, " << rep.violations << " violations, worst margin "
           << rep.worst_margin;
        out.report = to_json(rep, spec, prm);
    } else if (name == "symmetrize") {
        spec.discretization = Discretization::fd_dirichlet;
        const GridPtr grid = build_grid(spec);
        const PotentialSet pot = sample_potential(popt, grid);
        const InequalityReport rep =
            inequality_sweep(InequalityName::symmetrize, 1000, 20240611, grid, prm, pot);
        out.passed = rep.violations == 0;
        os << rep.trials << " trials, " << rep.violations << " violations, worst margin "
           << rep.worst_margin;
        out.report = to_json(rep, spec, prm);
    } else if (name == "decomposition") {
        spec.discretization = Discretization::spectral_periodic;
        const GridPtr grid = build_grid(spec);
        const PotentialSet pot = sample_potential(popt, grid);
        const InequalityReport rep = inequality_sweep(InequalityName::energy_decomposition, 100,
                                                      20240612, grid, prm, pot);
        out.passed = rep.violations == 0 && rep.worst_margin <= 1e-12;
        os << rep.trials << " trials, " << rep.violations << " violations, worst deviation "
           << rep.worst_margin;
        out.report = to_json(rep, spec, prm);
    } else if (name == "oracles") {
        bool ok = true;
        // harmonic oscillator cases in N = 1 and N = 3
        for (const std::array<double, 3>& masses :
             {std::array<double, 3>{1.0, 1.0, 1.0}, std::array<double, 3>{2.0, 1.0, 1.0}}) {
            ModelParams oprm;
            oprm.mu1 = oprm.mu2 = oprm.mu3 = 0.0;
            oprm.beta = 0.0;
            oprm.p = 2.5;
            oprm.dimension = 1;
            oprm.mass_a = masses[0];
            oprm.mass_b = masses[1];
            oprm.mass_c = masses[2];
            GridSpec ospec;
            ospec.dimension = 1;
            ospec.half_width = 8.0;
            ospec.points_per_axis = 256;
            ospec.discretization = Discretization::spectral_periodic;
            SolverOptions opts;
            const OracleRun run = run_oracle(oracle_harmonic(oprm, ospec), ospec, opts);
            ok = ok && run.passed;
            os << run.oracle.name << "(a=" << masses[0] << "): err " << run.energy_error << "; ";
        }
        {
            ModelParams oprm;
            oprm.mu1 = oprm.mu2 = oprm.mu3 = 0.0;
            oprm.beta = 0.0;
            oprm.p = 2.5;
            oprm.dimension = 3;
            GridSpec ospec;
            ospec.dimension = 3;
            ospec.half_width = 8.0;
            ospec.points_per_axis = 32;
            ospec.discretization = Discretization::spectral_periodic;
            SolverOptions opts;
            const OracleRun run = run_oracle(oracle_harmonic(oprm, ospec), ospec, opts);
            ok = ok && run.passed;
            os << run.oracle.name << ": err " << run.energy_error << "; ";
        }
        // trapped-vs-free lower bound, N = 1
        {
            ModelParams fprm;
            fprm.mu1 = fprm.mu2 = fprm.mu3 = 1.0;
            fprm.beta = 1.0;
            fprm.p = 3.0;
            fprm.dimension = 1;
            GridSpec fspec;
            fspec.dimension = 1;
            fspec.half_width = 8.0;
            fspec.points_per_axis = 256;
            fspec.discretization = Discretization::spectral_periodic;
            const GridPtr grid = build_grid(fspec);
            PotentialOptions harm;
            harm.kind = PotentialKind::harmonic;
            PotentialOptions zero;
            zero.kind = PotentialKind::zero;
            const PotentialSet pot_h = sample_potential(harm, grid);
            const PotentialSet pot_0 = sample_potential(zero, grid);
            SolverOptions opts;
            const TriField init = make_initial(grid, fprm, opts);
            const SolveResult trapped = minimize(init, pot_h, fprm, opts);
            const SolveResult free_r = minimize(init, pot_0, fprm, opts);
            const double gap = free_vs_trapped(trapped, free_r, pot_h, fprm);
            const bool pass = gap >= -1e-6 && trapped.converged && free_r.converged;
            ok = ok && pass;
            os << "free_vs_trapped gap " << gap;
        }
        out.passed = ok;
    } else {
        throw config_error("unknown verify suite '" + name + "'");
    }
    out.summary = os.str();
    return out;
}

}  // namespace detail

/// verify: run the named analysis suite(s); one verdict line each; exit 0
/// iff every report passes.
inline int cmd_verify(const std::string& suite, const CliOverrides& ov = {}) {
    std::vector<std::string> names;
    if (suite == "all")
        names = {"gn", "coercivity", "symmetrize", "decomposition", "oracles"};
    else
        names = {suite};
    bool all_ok = true;
    try {
        for (const std::string& name : names) {
            detail::SuiteOutcome out = detail::run_verify_suite(name, ov);
            std::cout << out.name << ": " << (out.passed ? "PASS" : "FAIL") << " (" << out.summary
                      << ")\n";
            all_ok = all_ok && out.passed;
            if (out.report && ov.out_dir) {
                std::filesystem::create_directories(*ov.out_dir);
                detail::write_text(
                    (std::filesystem::path(*ov.out_dir) / (out.name + "_report.json")).string(),
                    out.report->dump(2) + "\n");
            }
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return all_ok ? kExitOk : kExitVerifyFailed;
}

/// oracle: print the closed-form expectation for the configured case and
/// (optionally) run the solver against it.
inline int cmd_oracle(const std::string& config_path, bool run, const CliOverrides& ov = {}) {
    RunConfig rc;
    try {
        rc = detail::load_config_with_overrides(config_path, ov);
        const OracleCase oc = oracle_harmonic(rc.model, rc.grid);
        std::cout << oc.name << ": expected energy " << oc.expected_energy << ", multipliers "
                  << oc.expected_multipliers[0] << ", tolerance " << oc.tolerance << "\n";
        if (!run) return kExitOk;
        const OracleRun orun = run_oracle(oc, rc.grid, rc.solver);
        std::cout << "computed energy " << orun.result.energy << " (error " << orun.energy_error
                  << "), multipliers " << orun.result.lambdas[0] << ", "
                  << orun.result.lambdas[1] << ", " << orun.result.lambdas[2] << "\n";
        if (!orun.result.converged) return kExitNotConverged;
        return orun.passed ? kExitOk : kExitVerifyFailed;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const misuse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

}  // namespace triwave
