#pragma once

#include "mvfuse/common.hpp"
#include "mvfuse/graphs.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

namespace mvfuse::spectral {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Spectral embedding: rows are nodes, columns the leading eigenvectors of the
/// normalised affinity, each nonzero row scaled to unit length.
struct Embedding {
    Matrix X;
    Vector eigenvalues;            // descending, one per column of X
    double eigengap = 0.0;         // lambda_{n_c} - lambda_{n_c + 1}, 0 when n_c == n
    std::vector<int> zero_rows;    // rows left at zero (isolated nodes)
};

struct EigenOptions {
    /// Dense eigensolver up to this many nodes, Lanczos above.
    std::size_t dense_limit = 2000;
    double tol = 1e-8;
    std::uint64_t seed = 0;
};

SparseMatrix to_sparse_matrix(const graphs::SparseViewGraph& g);

/// D^{-1/2} S D^{-1/2}; nodes with degree < 1e-12 get zero rows and columns.
SparseMatrix normalized_affinity(const SparseMatrix& S);

/// Largest `count` eigenpairs of a symmetric sparse matrix, eigenvalues in
/// descending order. Lanczos with full reorthogonalisation and locking.
struct EigenPairs {
    Vector values;
    Matrix vectors;
};
EigenPairs lanczos_largest(const SparseMatrix& M, Eigen::Index count, double tol, std::uint64_t seed);

EigenPairs dense_largest(const SparseMatrix& M, Eigen::Index count);

Embedding spectral_embed(const SparseMatrix& S, int n_clusters, const EigenOptions& options = {});

struct KMeansOptions {
    int restarts = 10;
    int max_iter = 1000;
    std::uint64_t seed = 0;
};

struct KMeansResult {
    Labels labels;
    double inertia = 0.0;              // within-cluster sum of squares of the best restart
    int best_restart = 0;
    int empty_clusters = 0;            // clusters with no members in the best assignment
    bool fewer_distinct_points = false; // fewer distinct rows than clusters
    std::vector<double> inertia_trace;  // Lloyd objective per iteration of the best restart
};

/// k-means++ seeding followed by Lloyd iterations; the best of `restarts`
/// runs by inertia wins, ties to the lowest restart index.
KMeansResult kmeans(const Matrix& X, int n_clusters, const KMeansOptions& options = {});

} // namespace mvfuse::spectral
