#include "mvfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace mvfuse::metrics {

namespace {

std::vector<int> compact(std::span<const int> labels, std::size_t& clusters) {
    std::unordered_map<int, int> ids;
    std::vector<int> out;
    out.reserve(labels.size());
    for (int label : labels) {
        auto [it, inserted] = ids.try_emplace(label, static_cast<int>(ids.size()));
        out.push_back(it->second);
    }
    clusters = ids.size();
    return out;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

void check_lengths(std::span<const int> pred, std::span<const int> truth) {
    require_shape(pred.size() == truth.size(), "label vectors differ in length");
    require(!pred.empty(), "label vectors are empty");
}

} // namespace

ContingencyTable contingency(std::span<const int> pred, std::span<const int> truth) {
    check_lengths(pred, truth);
    std::size_t r = 0;
    std::size_t c = 0;
    const auto p = compact(pred, r);
    const auto t = compact(truth, c);
    ContingencyTable table;
    table.counts.assign(r, std::vector<std::int64_t>(c, 0));
    for (std::size_t i = 0; i < p.size(); ++i) ++table.counts[static_cast<std::size_t>(p[i])][static_cast<std::size_t>(t[i])];
    table.total = static_cast<std::int64_t>(p.size());
    return table;
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
    const ContingencyTable table = contingency(pred, truth);
    const double n = static_cast<double>(table.total);
    std::vector<double> row(table.rows(), 0.0);
    std::vector<double> col(table.cols(), 0.0);
    for (std::size_t a = 0; a < table.rows(); ++a)
        for (std::size_t b = 0; b < table.cols(); ++b) {
            row[a] += static_cast<double>(table.counts[a][b]);
            col[b] += static_cast<double>(table.counts[a][b]);
        }
    if (table.rows() == 1 || table.cols() == 1) return (table.rows() == 1 && table.cols() == 1) ? 1.0 : 0.0;

    auto entropy = [n](const std::vector<double>& sizes) {
        double h = 0.0;
        for (double s : sizes)
            if (s > 0.0) h -= (s / n) * std::log(s / n);
        return h;
    };
    double mi = 0.0;
    for (std::size_t a = 0; a < table.rows(); ++a)
        for (std::size_t b = 0; b < table.cols(); ++b) {
            const double nab = static_cast<double>(table.counts[a][b]);
            if (nab > 0.0) mi += (nab / n) * std::log(n * nab / (row[a] * col[b]));
        }
    const double value = mi / std::sqrt(entropy(row) * entropy(col));
    return std::clamp(value, 0.0, 1.0);
}

double ari(std::span<const int> pred, std::span<const int> truth) {
    check_lengths(pred, truth);
    require(pred.size() >= 2, "ARI needs at least two points");
    const ContingencyTable table = contingency(pred, truth);
    double index = 0.0;
    std::vector<double> row(table.rows(), 0.0);
    std::vector<double> col(table.cols(), 0.0);
    for (std::size_t a = 0; a < table.rows(); ++a)
        for (std::size_t b = 0; b < table.cols(); ++b) {
            const double nab = static_cast<double>(table.counts[a][b]);
            index += choose2(nab);
            row[a] += nab;
            col[b] += nab;
        }
    double sum_rows = 0.0;
    double sum_cols = 0.0;
    for (double x : row) sum_rows += choose2(x);
    for (double x : col) sum_cols += choose2(x);
    const double expected = sum_rows * sum_cols / choose2(static_cast<double>(table.total));
    const double max_index = 0.5 * (sum_rows + sum_cols);
    const double denom = max_index - expected;
    if (denom == 0.0) return index == max_index ? 1.0 : 0.0;
    return (index - expected) / denom;
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
    const std::size_t rows = weights.size();
    const std::size_t cols = rows == 0 ? 0 : weights.front().size();
    const std::size_t m = std::max(rows, cols);
    if (m == 0) return {};
    double top = 0.0;
    for (const auto& r : weights) {
        require_shape(r.size() == cols, "assignment weights must be rectangular");
        for (double w : r) top = std::max(top, w);
    }
    // Square cost matrix, 1-based, minimising top - w (padding has weight 0).
    auto cost = [&](std::size_t i, std::size_t j) {
        const double w = (i - 1 < rows && j - 1 < cols) ? weights[i - 1][j - 1] : 0.0;
        return top - w;
    };
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    std::vector<char> used(m + 1);
    for (std::size_t i = 1; i <= m; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(rows, -1);
    for (std::size_t j = 1; j <= m; ++j)
        if (p[j] >= 1 && p[j] <= rows && j <= cols) assignment[p[j] - 1] = static_cast<int>(j - 1);
    return assignment;
}

double acc(std::span<const int> pred, std::span<const int> truth) {
    const ContingencyTable table = contingency(pred, truth);
    std::vector<std::vector<double>> weights(table.rows(), std::vector<double>(table.cols()));
    for (std::size_t a = 0; a < table.rows(); ++a)
        for (std::size_t b = 0; b < table.cols(); ++b) weights[a][b] = static_cast<double>(table.counts[a][b]);
    const auto assignment = max_weight_assignment(weights);
    std::int64_t matched = 0;
    for (std::size_t a = 0; a < assignment.size(); ++a)
        if (assignment[a] >= 0) matched += table.counts[a][static_cast<std::size_t>(assignment[a])];
    return static_cast<double>(matched) / static_cast<double>(table.total);
}

double purity(std::span<const int> pred, std::span<const int> truth) {
    const ContingencyTable table = contingency(pred, truth);
    std::int64_t sum = 0;
    for (const auto& row : table.counts) sum += *std::max_element(row.begin(), row.end());
    return static_cast<double>(sum) / static_cast<double>(table.total);
}

Scores evaluate(std::span<const int> pred, std::span<const int> truth) {
    return {nmi(pred, truth), ari(pred, truth), acc(pred, truth), purity(pred, truth)};
}

} // namespace mvfuse::metrics
