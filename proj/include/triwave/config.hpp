#pragma once

#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "triwave/model.hpp"
#include "triwave/solver.hpp"

namespace triwave {

/// Flat line-oriented key-value format with dotted section keys:
///
///     # comment
///     grid.points_per_axis = 48
///     potential.offsets = 0 -1 -2
///
/// Parse errors, unknown keys and invalid values all report file:line.
class KeyValueConfig {
public:
    struct Entry {
        std::string value;
        std::string file;
        int line = 0;
        mutable bool used = false;
    };

    static KeyValueConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file: " + path);
        return parse(in, path);
    }

    static KeyValueConfig parse(std::istream& in, const std::string& name) {
        KeyValueConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const std::size_t eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw config_error(name + ":" + std::to_string(lineno) +
                                   ": expected 'key = value'");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw config_error(name + ":" + std::to_string(lineno) + ": empty key");
            auto it = cfg.entries_.find(key);
            if (it != cfg.entries_.end() && it->second.file == name)
                throw config_error(name + ":" + std::to_string(lineno) + ": duplicate key '" +
                                   key + "' (first set at line " +
                                   std::to_string(it->second.line) + ")");
            cfg.entries_[key] = Entry{value, name, lineno, false};
        }
        return cfg;
    }

    /// Later layers override earlier ones (defaults file, then run config).
    void merge_from(const KeyValueConfig& overlay) {
        for (const auto& [key, entry] : overlay.entries_) entries_[key] = entry;
    }

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<std::string> get_string(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    std::optional<double> get_double(const std::string& key) const {
        auto raw = get_string(key);
        if (!raw) return std::nullopt;
        char* end = nullptr;
        const double v = std::strtod(raw->c_str(), &end);
        if (end == raw->c_str() || *end != '\0') fail(key, "not a number: '" + *raw + "'");
        return v;
    }

    std::optional<long> get_long(const std::string& key) const {
        auto raw = get_string(key);
        if (!raw) return std::nullopt;
        char* end = nullptr;
        const long v = std::strtol(raw->c_str(), &end, 10);
        if (end == raw->c_str() || *end != '\0') fail(key, "not an integer: '" + *raw + "'");
        return v;
    }

    std::optional<bool> get_bool(const std::string& key) const {
        auto raw = get_string(key);
        if (!raw) return std::nullopt;
        if (*raw == "true" || *raw == "1" || *raw == "yes") return true;
        if (*raw == "false" || *raw == "0" || *raw == "no") return false;
        fail(key, "not a boolean (true/false): '" + *raw + "'");
        return std::nullopt;
    }

    std::optional<std::vector<double>> get_double_list(const std::string& key) const {
        auto raw = get_string(key);
        if (!raw) return std::nullopt;
        std::string normalized = *raw;
        for (char& c : normalized)
            if (c == ',') c = ' ';
        std::istringstream ss(normalized);
        std::vector<double> out;
        double v;
        while (ss >> v) out.push_back(v);
        if (!ss.eof()) fail(key, "not a list of numbers: '" + *raw + "'");
        return out;
    }

    /// Reject typo'd keys once every consumer has pulled what it knows.
    void ensure_all_used() const {
        for (const auto& [key, entry] : entries_)
            if (!entry.used)
                throw config_error(entry.file + ":" + std::to_string(entry.line) +
                                   ": unknown key '" + key + "'");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        auto it = entries_.find(key);
        const std::string where =
            it == entries_.end() ? std::string("<config>")
                                 : it->second.file + ":" + std::to_string(it->second.line);
        throw config_error(where + ": " + key + ": " + msg);
    }

    std::string location_of(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return "<config>";
        return it->second.file + ":" + std::to_string(it->second.line);
    }

private:
    static std::string trim(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    std::map<std::string, Entry> entries_;
};

struct OutputOptions {
    std::string directory = "out";
    bool emit_fields = true;
    bool emit_history = true;
    bool emit_report = true;
};

/// Everything a run needs, loaded from the defaults file plus one config.
struct RunConfig {
    GridSpec grid;
    PotentialOptions potential;
    ModelParams model;
    SolverOptions solver;
    OutputOptions output;
    std::string gn_table_path;

    void validate() const {
        grid.validate();
        model.validate();
        solver.validate();
    }
};

namespace detail {

inline Discretization parse_discretization(const KeyValueConfig& cfg, const std::string& key,
                                           const std::string& raw) {
    if (raw == "spectral_periodic") return Discretization::spectral_periodic;
    if (raw == "fd_dirichlet") return Discretization::fd_dirichlet;
    cfg.fail(key, "expected spectral_periodic or fd_dirichlet");
}

inline PotentialKind parse_potential_kind(const KeyValueConfig& cfg, const std::string& key,
                                          const std::string& raw) {
    if (raw == "zero") return PotentialKind::zero;
    if (raw == "harmonic") return PotentialKind::harmonic;
    if (raw == "shifted_harmonic") return PotentialKind::shifted_harmonic;
    if (raw == "anisotropic") return PotentialKind::anisotropic;
    if (raw == "from_file") return PotentialKind::from_file;
    cfg.fail(key, "expected zero|harmonic|shifted_harmonic|anisotropic|from_file");
}

inline InitKind parse_init_kind(const KeyValueConfig& cfg, const std::string& key,
                                const std::string& raw) {
    if (raw == "gaussian") return InitKind::gaussian;
    if (raw == "constant") return InitKind::constant;
    if (raw == "random") return InitKind::random;
    if (raw == "from_file") return InitKind::from_file;
    cfg.fail(key, "expected gaussian|constant|random|from_file");
}

inline Scheme parse_scheme(const KeyValueConfig& cfg, const std::string& key,
                           const std::string& raw) {
    if (raw == "explicit") return Scheme::explicit_flow;
    if (raw == "semi_implicit") return Scheme::semi_implicit;
    cfg.fail(key, "expected explicit or semi_implicit");
}

}  // namespace detail

inline RunConfig run_config_from(const KeyValueConfig& cfg) {
    RunConfig rc;

    if (auto v = cfg.get_long("grid.dimension")) rc.grid.dimension = static_cast<int>(*v);
    if (auto v = cfg.get_double("grid.half_width")) rc.grid.half_width = *v;
    if (auto v = cfg.get_long("grid.points_per_axis")) rc.grid.points_per_axis = static_cast<int>(*v);
    if (auto v = cfg.get_string("grid.discretization"))
        rc.grid.discretization = detail::parse_discretization(cfg, "grid.discretization", *v);

    if (auto v = cfg.get_string("potential.kind"))
        rc.potential.kind = detail::parse_potential_kind(cfg, "potential.kind", *v);
    for (int i = 0; i < 3; ++i) {
        const std::string idx = std::to_string(i + 1);
        if (auto v = cfg.get_double("potential.offset" + idx)) rc.potential.offsets[i] = *v;
        if (auto v = cfg.get_double_list("potential.weights" + idx)) {
            if (v->size() != 3 && static_cast<int>(v->size()) != rc.grid.dimension)
                cfg.fail("potential.weights" + idx, "expected one weight per axis");
            for (std::size_t d = 0; d < v->size() && d < 3; ++d)
                rc.potential.weights[i][d] = (*v)[d];
        }
        if (auto v = cfg.get_string("potential.file" + idx)) rc.potential.files[i] = *v;
    }

    if (auto v = cfg.get_double("model.mu1")) rc.model.mu1 = *v;
    if (auto v = cfg.get_double("model.mu2")) rc.model.mu2 = *v;
    if (auto v = cfg.get_double("model.mu3")) rc.model.mu3 = *v;
    if (auto v = cfg.get_double("model.beta")) rc.model.beta = *v;
    if (auto v = cfg.get_double("model.p")) rc.model.p = *v;
    if (auto v = cfg.get_double("model.a")) rc.model.mass_a = *v;
    if (auto v = cfg.get_double("model.b")) rc.model.mass_b = *v;
    if (auto v = cfg.get_double("model.c")) rc.model.mass_c = *v;
    rc.model.dimension = rc.grid.dimension;

    if (auto v = cfg.get_double("solver.step_size")) rc.solver.step_size = *v;
    if (auto v = cfg.get_long("solver.max_iters")) rc.solver.max_iters = *v;
    if (auto v = cfg.get_double("solver.tol_residual")) rc.solver.tol_residual = *v;
    if (auto v = cfg.get_double("solver.tol_energy")) rc.solver.tol_energy = *v;
    if (auto v = cfg.get_bool("solver.line_search")) rc.solver.line_search = *v;
    if (auto v = cfg.get_long("solver.seed")) rc.solver.seed = static_cast<std::uint64_t>(*v);
    if (auto v = cfg.get_string("solver.init"))
        rc.solver.init = detail::parse_init_kind(cfg, "solver.init", *v);
    for (int i = 0; i < 3; ++i)
        if (auto v = cfg.get_string("solver.init_file" + std::to_string(i + 1)))
            rc.solver.init_files[i] = *v;
    if (auto v = cfg.get_string("solver.scheme"))
        rc.solver.scheme = detail::parse_scheme(cfg, "solver.scheme", *v);
    if (auto v = cfg.get_bool("solver.symmetrize")) rc.solver.symmetrize_each_iter = *v;
    if (auto v = cfg.get_long("solver.checkpoint_every"))
        rc.solver.checkpoint_every = static_cast<int>(*v);

    if (auto v = cfg.get_string("output.directory")) rc.output.directory = *v;
    if (auto v = cfg.get_bool("output.emit_fields")) rc.output.emit_fields = *v;
    if (auto v = cfg.get_bool("output.emit_history")) rc.output.emit_history = *v;
    if (auto v = cfg.get_bool("output.emit_report")) rc.output.emit_report = *v;

    if (auto v = cfg.get_string("paths.gn_table")) rc.gn_table_path = *v;

    cfg.ensure_all_used();
    rc.validate();
    return rc;
}

/// Load the optional defaults layer plus the run config; the run config wins.
inline RunConfig load_run_config(const std::string& config_path,
                                 const std::optional<std::string>& defaults_path) {
    KeyValueConfig merged;
    if (defaults_path) merged = KeyValueConfig::parse_file(*defaults_path);
    merged.merge_from(KeyValueConfig::parse_file(config_path));
    return run_config_from(merged);
}

}  // namespace triwave
