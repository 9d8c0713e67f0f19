#pragma once

// JSON report builders for the chain, scenario and minimizer front ends.

#include <json.hpp>

#include "qei/analysis.hpp"

namespace qei {

inline nlohmann::ordered_json chain_report_json(const ChainReport& r, int polarizations) {
    nlohmann::ordered_json j;
    j["t_s"] = r.t_s;
    j["hbar"] = r.hbar;
    j["polarizations"] = polarizations;
    j["bound_per_pol"] = r.bound_per_pol;
    j["bound_total"] = polarizations * r.bound_per_pol;
    j["witness"] = {{"x_f", r.witness_x_f},
                    {"E_n", r.witness_E_n},
                    {"abs_xi", r.witness_abs_xi}};
    j["en_grid"] = r.en_grid;
    j["en_independence_max_rel_dev"] = r.en_independence_max_rel_dev;
    j["steps"] = nlohmann::ordered_json::array();
    for (const auto& s : r.steps)
        j["steps"].push_back({{"name", s.name}, {"value", s.value}, {"paper_eq", s.paper_eq}});
    return j;
}

inline nlohmann::ordered_json minimize_report_json(const MinimizerProblem& p,
                                                   std::uint64_t seed, double closed_form,
                                                   const OracleResult& r, bool stalled) {
    nlohmann::ordered_json j;
    j["E_n"] = p.E_n;
    j["L"] = p.L;
    j["hbar"] = p.hbar;
    j["family_dim"] = p.family_dim;
    j["seed"] = seed;
    j["closed_form"] = closed_form;
    j["oracle_energy"] = r.energy;
    j["oracle_total"] = r.total;
    j["rel_gap"] = closed_form != 0.0 ? (r.energy - closed_form) / closed_form : 0.0;
    j["constraint_residual"] = r.constraint_residual;
    j["improvement_steps"] = r.improvement_steps;
    j["starts_used"] = r.starts_used;
    j["stalled"] = stalled;
    j["parameters"] = r.parameters;
    return j;
}

inline nlohmann::ordered_json timeline_report_json(const GedankenScenario& s,
                                                   const TimelineReport& r) {
    nlohmann::ordered_json j;
    j["t_s"] = s.t_s;
    j["x_i"] = s.x_i;
    j["x_f"] = s.x_f;
    j["E_n"] = s.E_n;
    j["events"] = nlohmann::ordered_json::array();
    for (const auto& e : r.events)
        j["events"].push_back({{"time", e.time}, {"label", e.label}, {"detail", e.detail}});
    j["reflected_negative"] = {r.reflected_negative.location, r.reflected_negative.weight};
    j["switching_window"] = {r.switching_window.lo, r.switching_window.hi};
    j["ts_integral_lower_bound"] = r.ts_integral_lower_bound;
    j["quiet_interval_empty"] = r.quiet_interval_empty;
    j["final_profile"] = r.final_profile;
    return j;
}

} // namespace qei
