#include "mvfuse/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace mvfuse::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

PipelineResult finish(const Vector& similarity, const graphs::EdgeIndexSet& index, fusion::FusionResult fused,
                      const PipelineConfig& cfg, PipelineResult result) {
    auto start = Clock::now();
    const std::span<const double> weights(similarity.data(), static_cast<std::size_t>(similarity.size()));
    result.fused = symmetrize(keep_k_largest_per_row(weights, index, cfg.k));
    result.fusion = std::move(fused);

    std::vector<double> degree(result.fused.n(), 0.0);
    for (const auto& e : result.fused.edges()) degree[e.i] += e.weight;
    for (std::size_t i = 0; i < degree.size(); ++i)
        if (degree[i] < 1e-12) result.isolated_nodes.push_back(static_cast<int>(i));
    result.timings["select"] = seconds_since(start);

    start = Clock::now();
    spectral::EigenOptions eig;
    eig.seed = cfg.seed;
    result.embedding = spectral::spectral_embed(spectral::to_sparse_matrix(result.fused), cfg.n_clusters, eig);
    result.timings["embed"] = seconds_since(start);

    start = Clock::now();
    const auto km = spectral::kmeans(result.embedding.X, cfg.n_clusters,
                                     {cfg.kmeans_restarts, cfg.kmeans_max_iter, cfg.seed});
    result.labels = km.labels;
    result.empty_clusters = km.empty_clusters;
    result.timings["kmeans"] = seconds_since(start);
    return result;
}

std::vector<graphs::SparseViewGraph> normalized_knn(std::span<const Matrix> views, const PipelineConfig& cfg,
                                                    PipelineResult& result) {
    auto start = Clock::now();
    auto knn = knn_distance_graphs(views, cfg);
    result.timings["knn"] = seconds_since(start);
    start = Clock::now();
    for (auto& g : knn) g = graphs::normalize_knn_distances(g);
    result.timings["normalize"] = seconds_since(start);
    return knn;
}

} // namespace

void PipelineConfig::validate() const {
    require(k >= 1, "k must be >= 1");
    require(n_clusters >= 2, "need at least 2 clusters");
    require(kmeans_restarts >= 1 && kmeans_max_iter >= 1, "k-means controls must be >= 1");
}

graphs::SparseViewGraph keep_k_largest_per_row(std::span<const double> weights, const graphs::EdgeIndexSet& index,
                                               std::size_t k) {
    require_shape(weights.size() == index.size(), "weight vector length differs from the edge index size");
    std::vector<graphs::Edge> kept;
    const auto pairs = index.pairs();
    std::size_t begin = 0;
    std::vector<std::size_t> row;
    while (begin < pairs.size()) {
        std::size_t end = begin;
        while (end < pairs.size() && pairs[end].first == pairs[begin].first) ++end;
        row.clear();
        for (std::size_t p = begin; p < end; ++p) row.push_back(p);
        // pairs are sorted by column within the row, so position order is column order
        std::stable_sort(row.begin(), row.end(), [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
        for (std::size_t r = 0; r < std::min(k, row.size()); ++r) {
            const std::size_t p = row[r];
            if (weights[p] > 0.0) kept.push_back({pairs[p].first, pairs[p].second, weights[p]});
        }
        begin = end;
    }
    return graphs::SparseViewGraph(index.n(), std::move(kept), graphs::Semantics::similarity);
}

graphs::SparseViewGraph symmetrize(const graphs::SparseViewGraph& g) {
    std::vector<graphs::Edge> both;
    both.reserve(2 * g.edge_count());
    for (const auto& e : g.edges()) {
        both.push_back({e.i, e.j, 0.5 * e.weight});
        both.push_back({e.j, e.i, 0.5 * e.weight});
    }
    std::sort(both.begin(), both.end(), [](const graphs::Edge& a, const graphs::Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    std::vector<graphs::Edge> merged;
    for (const auto& e : both) {
        if (!merged.empty() && merged.back().i == e.i && merged.back().j == e.j) {
            merged.back().weight += e.weight;
        } else {
            merged.push_back(e);
        }
    }
    return graphs::SparseViewGraph(g.n(), std::move(merged), g.semantics());
}

std::vector<graphs::SparseViewGraph> knn_distance_graphs(std::span<const Matrix> views, const PipelineConfig& cfg) {
    cfg.validate();
    require(!views.empty(), "at least one view is required");
    require(static_cast<std::size_t>(cfg.n_clusters) <= static_cast<std::size_t>(views.front().rows()),
            "more clusters than instances");
    if (cfg.input == InputKind::features) return graphs::build_shared_knn_from_features(views, cfg.k, cfg.metric);
    return graphs::build_shared_knn(views, cfg.k);
}

PipelineResult run_sgf(std::span<const Matrix> views, const PipelineConfig& cfg) {
    PipelineResult result;
    auto graphs_ = normalized_knn(views, cfg, result);

    auto start = Clock::now();
    for (auto& g : graphs_) g = graphs::gaussian_kernel(g, graphs::KernelWidth::mean());
    const auto mv = graphs::build_mvdr(graphs_);
    result.timings["kernel"] = seconds_since(start);

    start = Clock::now();
    auto fused = fusion::learn_consistent_graph(mv, cfg.fusion);
    result.timings["fusion"] = seconds_since(start);

    const Vector similarity = fused.state.s;
    return finish(similarity, mv.index, std::move(fused), cfg, std::move(result));
}

PipelineResult run_dgf(std::span<const Matrix> views, const PipelineConfig& cfg) {
    PipelineResult result;
    auto graphs_ = normalized_knn(views, cfg, result);
    const auto mv = graphs::build_mvdr(graphs_);

    auto start = Clock::now();
    auto fused = fusion::learn_consistent_graph(mv, cfg.fusion);
    result.timings["fusion"] = seconds_since(start);

    start = Clock::now();
    const auto distance = graphs::scatter_to_sparse(fused.state.s, mv.index, graphs::Semantics::distance);
    const std::vector<double> w = graphs::gaussian_kernel(distance, graphs::KernelWidth::mean()).weights();
    const Vector similarity = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
    result.timings["kernel"] = seconds_since(start);
    return finish(similarity, mv.index, std::move(fused), cfg, std::move(result));
}

PipelineResult run(std::span<const Matrix> views, const PipelineConfig& cfg) {
    return cfg.mode == Mode::sgf ? run_sgf(views, cfg) : run_dgf(views, cfg);
}

} // namespace mvfuse::pipeline
