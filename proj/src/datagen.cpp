#include "mvfuse/datagen.hpp"

#include "mvfuse/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvfuse::datagen {

void SyntheticSpec::validate() const {
    require(n >= 2, "synthetic spec: need at least 2 nodes");
    require(n_clusters >= 1 && static_cast<std::size_t>(n_clusters) <= n, "synthetic spec: invalid cluster count");
    require(views >= 1, "synthetic spec: need at least one view");
    require(std::isfinite(p_in) && p_in >= 0.0 && std::isfinite(p_out) && p_out >= 0.0,
            "synthetic spec: p_in and p_out must be >= 0");
    require(corrupt_rate >= 0.0 && corrupt_rate <= 1.0, "synthetic spec: corrupt_rate must lie in [0, 1]");
    require(std::isfinite(noise_scale) && noise_scale > 0.0, "synthetic spec: noise_scale must be > 0");
    for (int v : corrupt_views)
        require(v >= 0 && v < views, "synthetic spec: corrupt view " + std::to_string(v) + " out of range");
}

Labels block_labels(std::size_t n, int n_clusters) {
    const std::size_t block = n / static_cast<std::size_t>(n_clusters);
    Labels out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<int>(std::min(i / std::max<std::size_t>(block, 1), static_cast<std::size_t>(n_clusters - 1)));
    return out;
}

MultiViewData generate_multiview(const SyntheticSpec& spec) {
    spec.validate();
    MultiViewData data;
    data.truth = block_labels(spec.n, spec.n_clusters);
    const std::size_t n = spec.n;

    for (int view = 0; view < spec.views; ++view) {
        // one independent stream per view
        Rng rng(spec.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(view));
        Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        std::vector<std::pair<std::uint32_t, std::uint32_t>> cross;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool same = data.truth[i] == data.truth[j];
                const double p = same ? spec.p_in : spec.p_out;
                w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p * (0.5 + 0.5 * rng.uniform());
                if (!same) cross.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
            }

        const bool corrupt =
            std::find(spec.corrupt_views.begin(), spec.corrupt_views.end(), view) != spec.corrupt_views.end();
        if (corrupt && !cross.empty()) {
            const auto hits = static_cast<std::size_t>(std::llround(spec.corrupt_rate * static_cast<double>(cross.size())));
            // partial Fisher-Yates: the first `hits` entries become a uniform sample
            for (std::size_t k = 0; k < hits; ++k) {
                const std::size_t pick = k + static_cast<std::size_t>(rng.below(cross.size() - k));
                std::swap(cross[k], cross[pick]);
                w(cross[k].first, cross[k].second) += spec.noise_scale * rng.uniform();
            }
        }

        std::vector<graphs::Edge> edges;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double x = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (x > 0.0) {
                    edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), x});
                    edges.push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(i), x});
                }
            }
        data.views.emplace_back(n, std::move(edges), graphs::Semantics::similarity);
    }
    return data;
}

Matrix similarity_to_distance(const graphs::SparseViewGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.n());
    Matrix d = Matrix::Ones(n, n);
    d.diagonal().setZero();
    double top = 0.0;
    for (const auto& e : g.edges()) top = std::max(top, e.weight);
    for (const auto& e : g.edges()) d(e.i, e.j) = top > 0.0 ? 1.0 - e.weight / top : 1.0;
    return d;
}

Blobs generate_blobs(std::size_t n, int n_clusters, int dim, double separation, std::uint64_t seed) {
    require(n >= 1 && n_clusters >= 1 && static_cast<std::size_t>(n_clusters) <= n, "blobs: invalid sizes");
    require(dim >= 1, "blobs: dim must be >= 1");
    require(separation >= 0.0, "blobs: separation must be >= 0");
    Rng rng(seed);
    Blobs out;
    out.truth = block_labels(n, n_clusters);
    out.features.resize(static_cast<Eigen::Index>(n), dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < dim; ++c) out.features(static_cast<Eigen::Index>(i), c) = rng.normal();
        out.features(static_cast<Eigen::Index>(i), 0) += separation * out.truth[i];
    }
    return out;
}

} // namespace mvfuse::datagen
