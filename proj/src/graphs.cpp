#include "mvfuse/graphs.hpp"

#include "mvfuse/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mvfuse::graphs {

namespace {

bool pair_less(const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
}

} // namespace

SparseViewGraph::SparseViewGraph(std::size_t n, std::vector<Edge> edges, Semantics semantics)
    : n_(n), edges_(std::move(edges)), semantics_(semantics) {
    std::sort(edges_.begin(), edges_.end(), pair_less);
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const Edge& e = edges_[k];
        require(e.i < n_ && e.j < n_, "edge node index out of range");
        require(e.i != e.j, "self-loop edge (" + std::to_string(e.i) + ")");
        require(std::isfinite(e.weight) && e.weight >= 0.0, "edge weights must be finite and >= 0");
        if (k > 0) {
            require(edges_[k - 1].pair() != e.pair(), "duplicate edge pair");
        }
    }
}

double SparseViewGraph::weight(std::uint32_t i, std::uint32_t j) const {
    const Edge key{i, j, 0.0};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key, pair_less);
    return (it != edges_.end() && it->i == i && it->j == j) ? it->weight : 0.0;
}

bool SparseViewGraph::has_edge(std::uint32_t i, std::uint32_t j) const {
    const Edge key{i, j, 0.0};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key, pair_less);
    return it != edges_.end() && it->i == i && it->j == j;
}

std::vector<NodePair> SparseViewGraph::pairs() const {
    std::vector<NodePair> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back(e.pair());
    return out;
}

std::vector<double> SparseViewGraph::weights() const {
    std::vector<double> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back(e.weight);
    return out;
}

SparseViewGraph SparseViewGraph::with_weights(std::span<const double> w, Semantics semantics) const {
    require_shape(w.size() == edges_.size(), "weight vector length differs from edge count");
    std::vector<Edge> edges = edges_;
    for (std::size_t k = 0; k < edges.size(); ++k) edges[k].weight = w[k];
    return SparseViewGraph(n_, std::move(edges), semantics);
}

Matrix SparseViewGraph::to_dense() const {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (const auto& e : edges_) m(e.i, e.j) = e.weight;
    return m;
}

EdgeIndexSet::EdgeIndexSet(std::size_t n, std::vector<NodePair> pairs) : n_(n), pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        require(pairs_[k].first < n_ && pairs_[k].second < n_, "pair index out of range");
        require(pairs_[k].first != pairs_[k].second, "self pair in edge index set");
        if (k > 0) require(pairs_[k - 1] != pairs_[k], "duplicate pair in edge index set");
    }
}

Matrix pairwise_distances(const Matrix& features, Metric metric) {
    const Eigen::Index n = features.rows();
    Matrix d = Matrix::Zero(n, n);
    Vector norms;
    if (metric == Metric::cosine) norms = features.rowwise().norm();

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        const auto i = static_cast<Eigen::Index>(row);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double value;
            if (metric == Metric::euclidean) {
                value = (features.row(i) - features.row(j)).norm();
            } else {
                const double denom = norms(i) * norms(j);
                const double cos = denom > 0.0 ? features.row(i).dot(features.row(j)) / denom : 0.0;
                value = std::clamp(1.0 - cos, 0.0, 2.0);
            }
            d(i, j) = value;
            d(j, i) = value;
        }
    });
    return d;
}

std::vector<SparseViewGraph> build_shared_knn(std::span<const Matrix> distance_matrices, std::size_t k) {
    require(!distance_matrices.empty(), "at least one view is required");
    const auto n = static_cast<std::size_t>(distance_matrices.front().rows());
    for (const auto& d : distance_matrices) {
        require_shape(static_cast<std::size_t>(d.rows()) == n && static_cast<std::size_t>(d.cols()) == n,
                      "distance matrices must all be n x n with the same n");
        require(d.allFinite() && (d.array() >= 0.0).all(), "distances must be finite and >= 0");
    }
    require(k >= 1, "k must be positive");
    require(k < n, "k must be smaller than the node count");

    const std::size_t v = distance_matrices.size();
    // neighbours[view][i*k + r]
    std::vector<std::vector<std::uint32_t>> neighbours(v, std::vector<std::uint32_t>(n * k));
    for (std::size_t view = 0; view < v; ++view) {
        const Matrix& d = distance_matrices[view];
        auto& out = neighbours[view];
        parallel_for(n, [&](std::size_t i) {
            std::vector<std::uint32_t> cand;
            cand.reserve(n - 1);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) cand.push_back(static_cast<std::uint32_t>(j));
            const auto row = static_cast<Eigen::Index>(i);
            std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(),
                              [&](std::uint32_t a, std::uint32_t b) {
                                  const double da = d(row, a);
                                  const double db = d(row, b);
                                  return da != db ? da < db : a < b;
                              });
            std::copy_n(cand.begin(), k, out.begin() + static_cast<std::ptrdiff_t>(i * k));
        });
    }

    std::vector<NodePair> pairs;
    pairs.reserve(n * k * v);
    for (std::size_t view = 0; view < v; ++view)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t r = 0; r < k; ++r)
                pairs.emplace_back(static_cast<std::uint32_t>(i), neighbours[view][i * k + r]);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    std::vector<SparseViewGraph> out;
    out.reserve(v);
    for (std::size_t view = 0; view < v; ++view) {
        std::vector<Edge> edges;
        edges.reserve(pairs.size());
        for (const auto& [i, j] : pairs) edges.push_back({i, j, distance_matrices[view](i, j)});
        out.emplace_back(n, std::move(edges), Semantics::distance);
    }
    return out;
}

std::vector<SparseViewGraph> build_shared_knn_from_features(std::span<const Matrix> features, std::size_t k,
                                                            Metric metric) {
    require(!features.empty(), "at least one view is required");
    const auto n = features.front().rows();
    for (const auto& f : features) {
        require_shape(f.rows() == n, "all views must have the same number of rows");
        require(f.allFinite(), "features must be finite");
    }
    std::vector<Matrix> distances;
    distances.reserve(features.size());
    for (const auto& f : features) distances.push_back(pairwise_distances(f, metric));
    return build_shared_knn(distances, k);
}

SparseViewGraph normalize_knn_distances(const SparseViewGraph& g) {
    require(g.edge_count() > 0, "cannot normalise a graph without edges");
    const std::vector<double> w = g.weights();
    const double count = static_cast<double>(w.size());
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / count;
    double ss = 0.0;
    for (double x : w) ss += (x - mean) * (x - mean);
    const double sigma = std::sqrt(ss / count);

    std::vector<double> out(w.size(), 1.0);
    if (sigma >= 1e-12) {
        for (std::size_t k = 0; k < w.size(); ++k) out[k] = std::max((w[k] - mean) / sigma + 1.0, 0.0);
    }
    return g.with_weights(out, Semantics::distance);
}

double resolve_kernel_width(std::span<const double> distances, KernelWidth width) {
    if (width.value) {
        require(std::isfinite(*width.value) && *width.value > 0.0, "kernel width must be positive");
        return *width.value;
    }
    require(!distances.empty(), "mean kernel width needs at least one edge");
    const double mean = std::accumulate(distances.begin(), distances.end(), 0.0) /
                        static_cast<double>(distances.size());
    return mean < 1e-12 ? 1.0 : mean;
}

SparseViewGraph gaussian_kernel(const SparseViewGraph& g, KernelWidth width) {
    std::vector<double> w = g.weights();
    const double rho = resolve_kernel_width(w, width);
    const double denom = 2.0 * rho * rho;
    for (double& x : w) x = std::exp(-(x * x) / denom);
    return g.with_weights(w, Semantics::similarity);
}

MultiViewDenseGraph build_mvdr(std::span<const SparseViewGraph> views) {
    require(!views.empty(), "at least one view is required");
    const SparseViewGraph& first = views.front();
    for (const auto& g : views) {
        require_shape(g.n() == first.n(), "views disagree on node count");
        require_shape(g.edge_count() == first.edge_count(), "views disagree on edge set");
        for (std::size_t k = 0; k < g.edge_count(); ++k)
            require_shape(g.edges()[k].pair() == first.edges()[k].pair(), "views disagree on edge set");
    }
    MultiViewDenseGraph out;
    out.index = EdgeIndexSet(first.n(), first.pairs());
    out.W.resize(static_cast<Eigen::Index>(views.size()), static_cast<Eigen::Index>(first.edge_count()));
    for (std::size_t v = 0; v < views.size(); ++v) {
        const auto edges = views[v].edges();
        for (std::size_t k = 0; k < edges.size(); ++k)
            out.W(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(k)) = edges[k].weight;
    }
    return out;
}

MultiViewDenseGraph row_normalize(const MultiViewDenseGraph& g) {
    require((g.W.array() >= 0.0).all() && g.W.allFinite(), "MVDR weights must be finite and >= 0");
    MultiViewDenseGraph out = g;
    for (Eigen::Index r = 0; r < out.W.rows(); ++r) {
        const double sum = out.W.row(r).sum();
        require(sum > 0.0, "view " + std::to_string(r) + " has no positive edge weight");
        out.W.row(r) /= sum;
    }
    return out;
}

SparseViewGraph scatter_to_sparse(std::span<const double> s, const EdgeIndexSet& index, Semantics semantics) {
    require_shape(s.size() == index.size(), "vector length differs from the edge index size");
    std::vector<Edge> edges;
    edges.reserve(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) edges.push_back({index[k].first, index[k].second, s[k]});
    return SparseViewGraph(index.n(), std::move(edges), semantics);
}

} // namespace mvfuse::graphs
