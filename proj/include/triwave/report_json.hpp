#pragma once

#include <json.hpp>

#include "triwave/analysis.hpp"
#include "triwave/config.hpp"

namespace triwave {

inline nlohmann::ordered_json to_json(const GridSpec& spec) {
    return {{"dimension", spec.dimension},
            {"half_width", spec.half_width},
            {"points_per_axis", spec.points_per_axis},
            {"discretization", to_string(spec.discretization)}};
}

inline nlohmann::ordered_json to_json(const ModelParams& prm) {
    return {{"mu", {prm.mu1, prm.mu2, prm.mu3}},
            {"beta", prm.beta},
            {"p", prm.p},
            {"masses", {prm.mass_a, prm.mass_b, prm.mass_c}},
            {"dimension", prm.dimension}};
}

/// One JSON document per sweep: {name, trials, violations, worst_margin,
/// seed, grid, params}.
inline nlohmann::ordered_json to_json(const InequalityReport& rep, const GridSpec& spec,
                                      const ModelParams& prm) {
    return {{"name", rep.name},
            {"trials", rep.trials},
            {"violations", rep.violations},
            {"worst_margin", rep.worst_margin},
            {"seed", rep.seed},
            {"grid", to_json(spec)},
            {"params", to_json(prm)}};
}

inline nlohmann::ordered_json to_json(const VerificationReport& rep) {
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const VerificationCheck& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"value", c.value},
                          {"detail", c.detail}});
    return {{"passed", rep.passed}, {"checks", checks}};
}

inline nlohmann::ordered_json result_summary_json(const SolveResult& result,
                                                  const GridSpec& spec, const ModelParams& prm) {
    return {{"energy", result.energy},
            {"multipliers", {result.lambdas[0], result.lambdas[1], result.lambdas[2]}},
            {"residuals", {result.residuals[0], result.residuals[1], result.residuals[2]}},
            {"iterations", result.iterations},
            {"converged", result.converged},
            {"masses",
             {mass(result.minimizer.u), mass(result.minimizer.v), mass(result.minimizer.w)}},
            {"grid", to_json(spec)},
            {"params", to_json(prm)}};
}

}  // namespace triwave
