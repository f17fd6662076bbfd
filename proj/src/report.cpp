#include "mvfuse/report.hpp"

namespace mvfuse::metrics {

void to_json(nlohmann::json& j, const Scores& s) {
    j = {{"nmi", s.nmi}, {"ari", s.ari}, {"acc", s.acc}, {"purity", s.purity}};
}

void from_json(const nlohmann::json& j, Scores& s) {
    j.at("nmi").get_to(s.nmi);
    j.at("ari").get_to(s.ari);
    j.at("acc").get_to(s.acc);
    j.at("purity").get_to(s.purity);
}

} // namespace mvfuse::metrics

namespace mvfuse::report {

nlohmann::json config_to_json(const pipeline::PipelineConfig& cfg) {
    const auto& f = cfg.fusion;
    std::vector<double> lambda(f.lambda.data(), f.lambda.data() + f.lambda.size());
    return {
        {"mode", cfg.mode == pipeline::Mode::sgf ? "sgf" : "dgf"},
        {"k", cfg.k},
        {"clusters", cfg.n_clusters},
        {"metric", cfg.metric == graphs::Metric::euclidean ? "euclidean" : "cosine"},
        {"views_are", cfg.input == pipeline::InputKind::features ? "features" : "distances"},
        {"beta", f.beta},
        {"gamma", f.gamma},
        {"lambda", lambda},
        {"max_outer", f.max_outer},
        {"tol", f.rel_tol},
        {"afw_eps", f.afw_eps},
        {"dca_iters", f.dca_iters},
        {"kmeans_restarts", cfg.kmeans_restarts},
        {"kmeans_max_iter", cfg.kmeans_max_iter},
        {"seed", cfg.seed},
    };
}

RunReport make_report(const pipeline::PipelineConfig& cfg, const pipeline::PipelineResult& result) {
    RunReport r;
    r.config = config_to_json(cfg);
    const auto& state = result.fusion.state;
    r.alpha.assign(state.alpha.data(), state.alpha.data() + state.alpha.size());
    r.initial_objective = result.fusion.initial_objective;
    r.objective_trace = result.fusion.objective_trace;
    r.iterations = result.fusion.iterations;
    r.converged = result.fusion.converged;
    r.eigengap = result.embedding.eigengap;
    const auto& ev = result.embedding.eigenvalues;
    r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    r.labels = result.labels;
    r.isolated_nodes = result.isolated_nodes;
    r.empty_clusters = result.empty_clusters;
    r.timings = result.timings;
    return r;
}

void to_json(nlohmann::json& j, const RunReport& r) {
    j = nlohmann::json{
        {"config", r.config},
        {"alpha", r.alpha},
        {"initial_objective", r.initial_objective},
        {"objective_trace", r.objective_trace},
        {"iterations", r.iterations},
        {"converged", r.converged},
        {"eigengap", r.eigengap},
        {"eigenvalues", r.eigenvalues},
        {"labels", r.labels},
        {"isolated_nodes", r.isolated_nodes},
        {"empty_clusters", r.empty_clusters},
        {"timings", r.timings},
    };
    if (r.metrics) j["metrics"] = *r.metrics;
}

void from_json(const nlohmann::json& j, RunReport& r) {
    r.config = j.at("config");
    j.at("alpha").get_to(r.alpha);
    j.at("initial_objective").get_to(r.initial_objective);
    j.at("objective_trace").get_to(r.objective_trace);
    j.at("iterations").get_to(r.iterations);
    j.at("converged").get_to(r.converged);
    j.at("eigengap").get_to(r.eigengap);
    j.at("eigenvalues").get_to(r.eigenvalues);
    j.at("labels").get_to(r.labels);
    j.at("isolated_nodes").get_to(r.isolated_nodes);
    j.at("empty_clusters").get_to(r.empty_clusters);
    j.at("timings").get_to(r.timings);
    if (j.contains("metrics")) {
        r.metrics = j.at("metrics").get<metrics::Scores>();
    } else {
        r.metrics.reset();
    }
}

} // namespace mvfuse::report
