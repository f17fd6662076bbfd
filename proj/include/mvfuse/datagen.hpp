#pragma once

#include "mvfuse/common.hpp"
#include "mvfuse/graphs.hpp"

#include <cstdint>
#include <vector>

namespace mvfuse::datagen {

/// Planted-partition multi-view similarity graphs.
///
/// Nodes are split into `n_clusters` contiguous blocks of size n / n_clusters
/// (the last block absorbs the remainder). For every unordered pair a clean
/// view draws weight p * (0.5 + 0.5 u), u ~ U[0, 1), with p = p_in inside a
/// block and p = p_out across blocks; zero weights are left out. A corrupted
/// view additionally adds noise_scale * u' to a `corrupt_rate` fraction of the
/// cross-block pairs, chosen uniformly. Weights are mirrored, so every view is
/// symmetric. All randomness comes from mvfuse::Rng (xoshiro256**).
struct SyntheticSpec {
    std::size_t n = 200;
    int n_clusters = 4;
    int views = 4;
    double p_in = 0.9;
    double p_out = 0.05;
    std::vector<int> corrupt_views;
    double corrupt_rate = 0.0;
    double noise_scale = 0.9;
    std::uint64_t seed = 0;

    void validate() const;
};

struct MultiViewData {
    std::vector<graphs::SparseViewGraph> views;
    Labels truth;
};

MultiViewData generate_multiview(const SyntheticSpec& spec);

/// Planted block labels used by the generators.
Labels block_labels(std::size_t n, int n_clusters);

/// Dense distance matrix of a similarity graph: 1 - w / max(w) on present
/// pairs, 1 on absent pairs, 0 on the diagonal.
Matrix similarity_to_distance(const graphs::SparseViewGraph& g);

struct Blobs {
    Matrix features; // n x dim
    Labels truth;
};

/// Unit-variance Gaussian blobs; centre c sits at c * separation along the
/// first axis, so centres are at least `separation` apart.
Blobs generate_blobs(std::size_t n, int n_clusters, int dim, double separation, std::uint64_t seed);

} // namespace mvfuse::datagen
