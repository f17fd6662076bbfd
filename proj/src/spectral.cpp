#include "mvfuse/spectral.hpp"

#include "mvfuse/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace mvfuse::spectral {

namespace {

// Flip each column so that its largest-magnitude entry (first on ties) is positive.
void fix_signs(Matrix& V) {
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < V.rows(); ++r) {
            if (std::abs(V(r, c)) > best + 1e-12) {
                best = std::abs(V(r, c));
                arg = r;
            }
        }
        if (V(arg, c) < 0.0) V.col(c) *= -1.0;
    }
}

double squared_distance(const Matrix& X, Eigen::Index row, const Matrix& centers, Eigen::Index c) {
    return (X.row(row) - centers.row(c)).squaredNorm();
}

} // namespace

SparseMatrix to_sparse_matrix(const graphs::SparseViewGraph& g) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(g.edge_count());
    for (const auto& e : g.edges())
        if (e.weight != 0.0) triplets.emplace_back(e.i, e.j, e.weight);
    const auto n = static_cast<Eigen::Index>(g.n());
    SparseMatrix m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

SparseMatrix normalized_affinity(const SparseMatrix& S) {
    require_shape(S.rows() == S.cols(), "affinity matrix must be square");
    const Eigen::Index n = S.rows();
    Vector degree = Vector::Zero(n);
    for (Eigen::Index k = 0; k < S.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(S, k); it; ++it) {
            require(it.value() >= 0.0, "affinity weights must be >= 0");
            degree(it.row()) += it.value();
        }
    SparseMatrix N = S;
    for (Eigen::Index k = 0; k < N.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(N, k); it; ++it) {
            const double di = degree(it.row());
            const double dj = degree(it.col());
            it.valueRef() = (di < 1e-12 || dj < 1e-12) ? 0.0 : it.value() / std::sqrt(di * dj);
        }
    N.prune(0.0);
    return N;
}

EigenPairs dense_largest(const SparseMatrix& M, Eigen::Index count) {
    const Matrix dense = Matrix(M);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(dense);
    if (solver.info() != Eigen::Success) throw ConvergenceError("dense symmetric eigensolver failed");
    const Eigen::Index n = dense.rows();
    EigenPairs out;
    out.values.resize(count);
    out.vectors.resize(n, count);
    for (Eigen::Index k = 0; k < count; ++k) {
        out.values(k) = solver.eigenvalues()(n - 1 - k);
        out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
    return out;
}

EigenPairs lanczos_largest(const SparseMatrix& M, Eigen::Index count, double tol, std::uint64_t seed) {
    const Eigen::Index n = M.rows();
    require_shape(M.cols() == n, "lanczos_largest: matrix must be square");
    require(count >= 1 && count <= n, "lanczos_largest: invalid eigenpair count");

    Rng rng(seed);
    Matrix locked(n, 0);
    std::vector<double> locked_values;
    const double scale = std::max(1.0, Matrix(M.cwiseAbs()).rowwise().sum().maxCoeff());
    constexpr int max_restarts = 500;

    auto orthogonalise = [&](Vector& x, const Matrix& basis, Eigen::Index cols) {
        for (int pass = 0; pass < 2; ++pass) {
            if (locked.cols() > 0) x -= locked * (locked.transpose() * x);
            if (cols > 0) x -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * x);
        }
    };

    Vector start(n);
    bool fresh = true;
    int restarts = 0;
    while (static_cast<Eigen::Index>(locked_values.size()) < count) {
        const Eigen::Index free_dims = n - locked.cols();
        const Eigen::Index m = std::min<Eigen::Index>(free_dims, 60);
        if (fresh) {
            for (Eigen::Index i = 0; i < n; ++i) start(i) = rng.uniform(-1.0, 1.0);
        }
        Matrix Q(n, m);
        Vector alpha = Vector::Zero(m);
        Vector beta = Vector::Zero(m);
        Vector q = start;
        orthogonalise(q, Q, 0);
        q.normalize();
        Eigen::Index steps = 0;
        for (Eigen::Index j = 0; j < m; ++j) {
            Q.col(j) = q;
            Vector w = M * q;
            alpha(j) = q.dot(w);
            orthogonalise(w, Q, j + 1);
            steps = j + 1;
            const double b = w.norm();
            beta(j) = b;
            if (b < 1e-14 * scale || j + 1 == m) break;
            q = w / b;
        }

        Matrix T = Matrix::Zero(steps, steps);
        for (Eigen::Index j = 0; j < steps; ++j) {
            T(j, j) = alpha(j);
            if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta(j);
        }
        Eigen::SelfAdjointEigenSolver<Matrix> tri(T);
        const Eigen::Index top = steps - 1;
        const double theta = tri.eigenvalues()(top);
        const double residual = std::abs(beta(steps - 1) * tri.eigenvectors()(steps - 1, top));
        Vector ritz = Q.leftCols(steps) * tri.eigenvectors().col(top);
        ritz.normalize();

        // Only the top Ritz pair is locked per cycle so repeated eigenvalues
        // are picked up one copy at a time from fresh starts.
        if (residual <= tol * std::max(1.0, std::abs(theta)) || steps == free_dims) {
            locked.conservativeResize(n, locked.cols() + 1);
            locked.col(locked.cols() - 1) = ritz;
            locked_values.push_back(theta);
            fresh = true;
        } else {
            start = ritz;
            fresh = false;
            if (++restarts > max_restarts) throw ConvergenceError("Lanczos did not converge");
        }
    }

    // Locked values are produced in descending order up to rounding; sort to be safe.
    std::vector<Eigen::Index> order(locked_values.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<Eigen::Index>(k);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return locked_values[a] > locked_values[b]; });
    EigenPairs out;
    out.values.resize(count);
    out.vectors.resize(n, count);
    for (Eigen::Index k = 0; k < count; ++k) {
        out.values(k) = locked_values[order[k]];
        out.vectors.col(k) = locked.col(order[k]);
    }
    return out;
}

Embedding spectral_embed(const SparseMatrix& S, int n_clusters, const EigenOptions& options) {
    const Eigen::Index n = S.rows();
    require(n_clusters >= 2, "spectral_embed: need at least 2 clusters");
    require(n_clusters <= n, "spectral_embed: more clusters than nodes");

    const SparseMatrix N = normalized_affinity(S);
    const Eigen::Index wanted = std::min<Eigen::Index>(n, n_clusters + 1);
    EigenPairs pairs = static_cast<std::size_t>(n) <= options.dense_limit
                           ? dense_largest(N, wanted)
                           : lanczos_largest(N, wanted, options.tol, options.seed);

    Embedding out;
    out.eigenvalues = pairs.values.head(n_clusters);
    out.eigengap = wanted > n_clusters ? pairs.values(n_clusters - 1) - pairs.values(n_clusters) : 0.0;
    out.X = pairs.vectors.leftCols(n_clusters);
    fix_signs(out.X);
    for (Eigen::Index r = 0; r < n; ++r) {
        const double norm = out.X.row(r).norm();
        if (norm < 1e-12) {
            out.X.row(r).setZero();
            out.zero_rows.push_back(static_cast<int>(r));
        } else {
            out.X.row(r) /= norm;
        }
    }
    return out;
}

KMeansResult kmeans(const Matrix& X, int n_clusters, const KMeansOptions& options) {
    const Eigen::Index n = X.rows();
    require(n >= 1, "kmeans: no points");
    require(n_clusters >= 1, "kmeans: need at least one cluster");
    require(options.restarts >= 1, "kmeans: restarts must be >= 1");
    require(options.max_iter >= 1, "kmeans: max_iter must be >= 1");
    require(X.allFinite(), "kmeans: non-finite coordinates");
    const Eigen::Index k = n_clusters;

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < options.restarts; ++restart) {
        Rng rng(options.seed + static_cast<std::uint64_t>(restart));

        // k-means++ seeding
        Matrix centers(k, X.cols());
        centers.row(0) = X.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
        Vector closest(n);
        for (Eigen::Index i = 0; i < n; ++i) closest(i) = squared_distance(X, i, centers, 0);
        for (Eigen::Index c = 1; c < k; ++c) {
            const double total = closest.sum();
            Eigen::Index pick = n - 1;
            if (total > 0.0) {
                const double target = rng.uniform() * total;
                double acc = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    acc += closest(i);
                    if (acc > target) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
            }
            centers.row(c) = X.row(pick);
            for (Eigen::Index i = 0; i < n; ++i)
                closest(i) = std::min(closest(i), squared_distance(X, i, centers, c));
        }

        // Lloyd
        Labels labels(static_cast<std::size_t>(n), -1);
        std::vector<double> trace;
        double inertia = 0.0;
        for (int iter = 0; iter < options.max_iter; ++iter) {
            bool changed = false;
            inertia = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                int arg = 0;
                double dist = squared_distance(X, i, centers, 0);
                for (Eigen::Index c = 1; c < k; ++c) {
                    const double d = squared_distance(X, i, centers, c);
                    if (d < dist) {
                        dist = d;
                        arg = static_cast<int>(c);
                    }
                }
                inertia += dist;
                if (labels[static_cast<std::size_t>(i)] != arg) {
                    labels[static_cast<std::size_t>(i)] = arg;
                    changed = true;
                }
            }
            trace.push_back(inertia);
            if (!changed) break;

            Matrix sums = Matrix::Zero(k, X.cols());
            std::vector<int> counts(static_cast<std::size_t>(k), 0);
            for (Eigen::Index i = 0; i < n; ++i) {
                sums.row(labels[static_cast<std::size_t>(i)]) += X.row(i);
                ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
            }
            for (Eigen::Index c = 0; c < k; ++c)
                if (counts[static_cast<std::size_t>(c)] > 0) centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        }

        if (inertia < best.inertia) {
            best.labels = labels;
            best.inertia = inertia;
            best.best_restart = restart;
            best.inertia_trace = std::move(trace);
        }
    }

    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int label : best.labels) ++counts[static_cast<std::size_t>(label)];
    best.empty_clusters = static_cast<int>(std::count(counts.begin(), counts.end(), 0));

    std::set<std::vector<double>> distinct;
    for (Eigen::Index i = 0; i < n && static_cast<Eigen::Index>(distinct.size()) < k; ++i) {
        std::vector<double> row(static_cast<std::size_t>(X.cols()));
        for (Eigen::Index c = 0; c < X.cols(); ++c) row[static_cast<std::size_t>(c)] = X(i, c);
        distinct.insert(std::move(row));
    }
    best.fewer_distinct_points = static_cast<Eigen::Index>(distinct.size()) < k;
    return best;
}

} // namespace mvfuse::spectral
