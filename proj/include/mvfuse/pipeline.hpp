#pragma once

#include "mvfuse/common.hpp"
#include "mvfuse/fusion.hpp"
#include "mvfuse/graphs.hpp"
#include "mvfuse/spectral.hpp"

#include <map>
#include <span>
#include <string>

namespace mvfuse::pipeline {

enum class Mode { sgf, dgf };
enum class InputKind { features, distances };

struct PipelineConfig {
    Mode mode = Mode::sgf;
    std::size_t k = 6;
    int n_clusters = 2;
    graphs::Metric metric = graphs::Metric::euclidean;
    InputKind input = InputKind::features;
    fusion::FusionParams fusion;
    int kmeans_restarts = 10;
    int kmeans_max_iter = 1000;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PipelineResult {
    Labels labels;
    fusion::FusionResult fusion;
    graphs::SparseViewGraph fused;      // symmetric, k largest per row kept
    spectral::Embedding embedding;
    std::vector<int> isolated_nodes;
    int empty_clusters = 0;
    std::map<std::string, double> timings; // seconds per stage
};

/// Keeps the k largest entries of each row (ties to the smaller column) of
/// the graph scattered from `weights` over `index`, zeroing the rest.
graphs::SparseViewGraph keep_k_largest_per_row(std::span<const double> weights, const graphs::EdgeIndexSet& index,
                                               std::size_t k);

/// (S + S') / 2 over the nonzero entries.
graphs::SparseViewGraph symmetrize(const graphs::SparseViewGraph& g);

/// Per-view kNN distance graphs over a shared edge set, before normalisation.
std::vector<graphs::SparseViewGraph> knn_distance_graphs(std::span<const Matrix> views, const PipelineConfig& cfg);

/// Similarity graph fusion: kNN -> normalise -> kernel -> fuse -> top-k ->
/// symmetrise -> spectral clustering.
PipelineResult run_sgf(std::span<const Matrix> views, const PipelineConfig& cfg);

/// Distance graph fusion: kNN -> normalise -> fuse -> kernel -> top-k ->
/// symmetrise -> spectral clustering.
PipelineResult run_dgf(std::span<const Matrix> views, const PipelineConfig& cfg);

/// Dispatches on cfg.mode.
PipelineResult run(std::span<const Matrix> views, const PipelineConfig& cfg);

} // namespace mvfuse::pipeline
