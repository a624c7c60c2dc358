#include "cylstab/report_json.hpp"

#include <cmath>

namespace cylstab {

namespace {

nlohmann::ordered_json finite_or_inf(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

nlohmann::ordered_json optional_bound(const std::optional<double>& v) {
    if (!v) return nullptr;
    return finite_or_inf(*v);
}

}  // namespace

nlohmann::ordered_json report_to_json(const StabilityReport& report) {
    nlohmann::ordered_json j;
    j["scalars"] = {{"length", report.scalars.length},
                    {"area", report.scalars.area},
                    {"total_sq_curvature", report.scalars.total_sq_curvature},
                    {"moment", report.scalars.moment}};
    j["params"] = {{"a", report.params.a},
                   {"b", report.params.b},
                   {"symmetry_order", report.params.symmetry_order},
                   {"rotation_index", report.params.rotation_index}};
    j["theorem1"] = optional_bound(report.theorem1);
    j["theorem2"] = optional_bound(report.theorem2);
    j["stronger_bound"] = report.stronger_bound;
    j["modes"] = nlohmann::ordered_json::array();
    for (const ModeAnalysis& mode : report.modes) {
        j["modes"].push_back({{"mode_index", mode.mode_index},
                              {"constrained", mode.constrained},
                              {"eigenvalue", mode.eigenvalue},
                              {"threshold_length", finite_or_inf(mode.threshold_length)}});
    }
    j["per_mode_critical"] = finite_or_inf(report.per_mode_critical);
    j["oracle_critical"] = optional_bound(report.oracle_critical);
    j["verdict"] = report.verdict ? nlohmann::ordered_json(to_string(*report.verdict))
                                  : nlohmann::ordered_json(nullptr);
    j["margin"] = report.margin ? finite_or_inf(*report.margin)
                                : nlohmann::ordered_json(nullptr);
    return j;
}

}  // namespace cylstab
