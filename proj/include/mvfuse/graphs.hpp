#pragma once

#include "mvfuse/common.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mvfuse::graphs {

enum class Semantics { similarity, distance };
enum class Metric { euclidean, cosine };

using NodePair = std::pair<std::uint32_t, std::uint32_t>;

struct Edge {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double weight = 0.0;

    NodePair pair() const { return {i, j}; }
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// One view's weighted adjacency over n nodes. Edges are kept sorted by
/// (i, j) with no duplicates and no self-loops; weights are nonnegative.
class SparseViewGraph {
public:
    SparseViewGraph() = default;

    /// Validates and sorts `edges`. Throws on self-loops, duplicate pairs,
    /// out-of-range nodes, and negative or non-finite weights.
    SparseViewGraph(std::size_t n, std::vector<Edge> edges, Semantics semantics);

    std::size_t n() const { return n_; }
    Semantics semantics() const { return semantics_; }
    std::span<const Edge> edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    /// Weight of (i, j), or 0 when the pair is absent.
    double weight(std::uint32_t i, std::uint32_t j) const;
    bool has_edge(std::uint32_t i, std::uint32_t j) const;

    std::vector<NodePair> pairs() const;
    std::vector<double> weights() const;

    /// Same pairs, new weights (same order as edges()).
    SparseViewGraph with_weights(std::span<const double> w, Semantics semantics) const;

    Matrix to_dense() const;

    friend bool operator==(const SparseViewGraph&, const SparseViewGraph&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    Semantics semantics_ = Semantics::similarity;
};

/// Sorted, duplicate-free list of off-diagonal node pairs (the common index
/// set of nonzeros across all views).
class EdgeIndexSet {
public:
    EdgeIndexSet() = default;
    EdgeIndexSet(std::size_t n, std::vector<NodePair> pairs);

    std::size_t n() const { return n_; }
    std::size_t size() const { return pairs_.size(); }
    std::span<const NodePair> pairs() const { return pairs_; }
    const NodePair& operator[](std::size_t k) const { return pairs_[k]; }

    friend bool operator==(const EdgeIndexSet&, const EdgeIndexSet&) = default;

private:
    std::size_t n_ = 0;
    std::vector<NodePair> pairs_;
};

/// Multi-view dense representation: row i of `W` holds view i's weight on
/// every pair of `index`, in index order.
struct MultiViewDenseGraph {
    EdgeIndexSet index;
    Matrix W; // views x edges

    std::size_t views() const { return static_cast<std::size_t>(W.rows()); }
    std::size_t edges() const { return static_cast<std::size_t>(W.cols()); }
};

// --- construction ---------------------------------------------------------

/// Exact pairwise distance matrix of the rows of `features`.
/// Cosine distance is 1 - cos; a zero row is treated as orthogonal to all.
Matrix pairwise_distances(const Matrix& features, Metric metric);

/// Shared-neighbour kNN: pair (i, j) is kept in every view whenever j is among
/// the k nearest neighbours of i in at least one view. Ties go to the smaller
/// node index. The result is directed (not symmetrised).
std::vector<SparseViewGraph> build_shared_knn(std::span<const Matrix> distance_matrices,
                                              std::size_t k);

std::vector<SparseViewGraph> build_shared_knn_from_features(std::span<const Matrix> features,
                                                            std::size_t k, Metric metric);

/// d -> max((d - mean)/std + 1, 0) with population std; all edges become 1
/// when std < 1e-12.
SparseViewGraph normalize_knn_distances(const SparseViewGraph& g);

/// Gaussian kernel width: a fixed positive value, or the mean edge weight.
struct KernelWidth {
    std::optional<double> value;

    static KernelWidth mean() { return {}; }
    static KernelWidth fixed(double rho) { return {rho}; }
};

/// Resolves a KernelWidth against a set of distances (mean < 1e-12 -> 1).
double resolve_kernel_width(std::span<const double> distances, KernelWidth width);

/// exp(-d^2 / (2 rho^2)) on every edge.
SparseViewGraph gaussian_kernel(const SparseViewGraph& g, KernelWidth width);

MultiViewDenseGraph build_mvdr(std::span<const SparseViewGraph> views);

/// Divides every row by its sum. Throws on a row with nonpositive sum.
MultiViewDenseGraph row_normalize(const MultiViewDenseGraph& g);

SparseViewGraph scatter_to_sparse(std::span<const double> s, const EdgeIndexSet& index,
                                  Semantics semantics = Semantics::similarity);

inline SparseViewGraph scatter_to_sparse(const Vector& s, const EdgeIndexSet& index,
                                         Semantics semantics = Semantics::similarity) {
    return scatter_to_sparse(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())),
                             index, semantics);
}

} // namespace mvfuse::graphs
