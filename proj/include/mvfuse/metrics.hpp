#pragma once

#include "mvfuse/common.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mvfuse::metrics {

/// counts(r, c): points with predicted cluster r and true class c. Cluster
/// ids of both partitions are compacted to 0..k-1 in order of first appearance.
struct ContingencyTable {
    std::vector<std::vector<std::int64_t>> counts;
    std::int64_t total = 0;

    std::size_t rows() const { return counts.size(); }
    std::size_t cols() const { return counts.empty() ? 0 : counts.front().size(); }
};

ContingencyTable contingency(std::span<const int> pred, std::span<const int> truth);

/// Mutual information over sqrt(H(pred) H(truth)). A single-cluster partition
/// scores 0 against anything but another single-cluster partition (1).
double nmi(std::span<const int> pred, std::span<const int> truth);

/// Pair-counting adjusted Rand index. Requires at least two points.
double ari(std::span<const int> pred, std::span<const int> truth);

/// Fraction of points matched under the best one-to-one cluster/class map.
double acc(std::span<const int> pred, std::span<const int> truth);

/// sum over predicted clusters of the largest class count, over n.
double purity(std::span<const int> pred, std::span<const int> truth);

/// Maximum-weight assignment on a rectangular weight matrix (Hungarian).
/// Returns, for every row, the assigned column or -1 when rows > cols.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

struct Scores {
    double nmi = 0.0;
    double ari = 0.0;
    double acc = 0.0;
    double purity = 0.0;
};

Scores evaluate(std::span<const int> pred, std::span<const int> truth);

} // namespace mvfuse::metrics
