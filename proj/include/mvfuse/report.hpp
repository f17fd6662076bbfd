#pragma once

#include "mvfuse/metrics.hpp"
#include "mvfuse/pipeline.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mvfuse::report {

/// Everything a `fuse` run produces besides the graph itself. Wall-clock
/// timings live under their own key so the rest is reproducible byte for byte.
struct RunReport {
    nlohmann::json config;
    std::vector<double> alpha;
    double initial_objective = 0.0;
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
    double eigengap = 0.0;
    std::vector<double> eigenvalues;
    Labels labels;
    std::vector<int> isolated_nodes;
    int empty_clusters = 0;
    std::optional<metrics::Scores> metrics;
    std::map<std::string, double> timings;

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

nlohmann::json config_to_json(const pipeline::PipelineConfig& cfg);

RunReport make_report(const pipeline::PipelineConfig& cfg, const pipeline::PipelineResult& result);

void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);

} // namespace mvfuse::report

namespace mvfuse::metrics {
void to_json(nlohmann::json& j, const Scores& s);
void from_json(const nlohmann::json& j, Scores& s);
inline bool operator==(const Scores& a, const Scores& b) {
    return a.nmi == b.nmi && a.ari == b.ari && a.acc == b.acc && a.purity == b.purity;
}
} // namespace mvfuse::metrics
