#include <CLI11.hpp>

#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "triwave/cli.hpp"

namespace {

// "1,1,1;2,1,1" -> list of mass triples
std::vector<std::array<double, 3>> parse_mass_grid(const std::string& raw) {
    std::vector<std::array<double, 3>> out;
    std::istringstream ss(raw);
    std::string triple;
    while (std::getline(ss, triple, ';')) {
        std::array<double, 3> m{};
        std::string x;
        std::istringstream ts(triple);
        int k = 0;
        while (std::getline(ts, x, ',')) {
            if (k >= 3) throw triwave::config_error("mass triple has more than 3 entries: " + triple);
            m[k++] = std::stod(x);
        }
        if (k != 3) throw triwave::config_error("mass triple needs 3 entries: " + triple);
        out.push_back(m);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"triwave: normalized ground states of the three-wave Schrodinger system"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string defaults_path;
    std::string table_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("--config", config_path, "run configuration file")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--defaults", defaults_path, "defaults file (else $TRIWAVE_DEFAULTS)");
        cmd->add_option("--table", table_path, "GN constant table path");
        cmd->add_option("--seed", seed, "RNG seed (overrides config)")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--jobs", jobs, "max concurrent sweep points")->check(CLI::PositiveNumber);
    };

    CLI::App* solve = app.add_subcommand("solve", "minimize J and verify the result");
    add_common(solve, true);

    CLI::App* sweep = app.add_subcommand("sweep", "beta continuation or mass-grid sweep");
    add_common(sweep, true);
    std::vector<double> beta_list;
    std::string masses_raw;
    sweep->add_option("--beta", beta_list, "ascending beta values")->delimiter(',');
    sweep->add_option("--masses", masses_raw, "mass triples, e.g. 1,1,1;2,1,1");

    CLI::App* verify = app.add_subcommand("verify", "run analysis suites");
    std::string suite = "all";
    verify->add_option("suite", suite, "all|gn|coercivity|symmetrize|decomposition|oracles");
    add_common(verify, false);

    CLI::App* oracle = app.add_subcommand("oracle", "closed-form benchmark for the config");
    add_common(oracle, true);
    bool no_run = false;
    oracle->add_flag("--no-run", no_run, "print the expectation without solving");

    CLI11_PARSE(app, argc, argv);

    triwave::CliOverrides ov;
    if (!out_dir.empty()) ov.out_dir = out_dir;
    if (!defaults_path.empty()) ov.defaults_path = defaults_path;
    if (!table_path.empty()) ov.gn_table = table_path;
    if (seed_set) ov.seed = seed;
    ov.jobs = jobs;

    try {
        if (solve->parsed()) return triwave::cmd_solve(config_path, ov);
        if (sweep->parsed()) {
            std::vector<std::array<double, 3>> mass_grid;
            if (!masses_raw.empty()) mass_grid = parse_mass_grid(masses_raw);
            return triwave::cmd_sweep(config_path, beta_list, mass_grid, ov);
        }
        if (verify->parsed()) return triwave::cmd_verify(suite, ov);
        if (oracle->parsed()) return triwave::cmd_oracle(config_path, !no_run, ov);
    } catch (const triwave::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return triwave::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return triwave::kExitConfigError;
    }
    return triwave::kExitConfigError;
}
