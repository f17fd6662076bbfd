#include "doctest.h"

#include "mvfuse/metrics.hpp"
#include "oracles.hpp"

using namespace mvfuse;
using namespace mvfuse::metrics;

namespace {

using L = std::vector<int>;

L random_labels(Rng& rng, std::size_t n, int k) {
    L out(n);
    for (auto& x : out) x = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    return out;
}

L relabel(const L& labels, const std::vector<int>& perm) {
    L out;
    for (int x : labels) out.push_back(perm[static_cast<std::size_t>(x)]);
    return out;
}

} // namespace

TEST_CASE("contingency table compacts ids by first appearance") {
    const auto t = contingency(L{5, 5, 2, 9}, L{1, 0, 0, 0});
    CHECK(t.total == 4);
    REQUIRE(t.rows() == 3);
    REQUIRE(t.cols() == 2);
    CHECK(t.counts[0] == std::vector<std::int64_t>{1, 1});
    CHECK(t.counts[1] == std::vector<std::int64_t>{0, 1});
    CHECK_THROWS_AS(contingency(L{0, 1}, L{0}), ShapeError);
}

TEST_CASE("nmi") {
    const L truth{0, 0, 1, 1, 2, 2};
    CHECK(nmi(truth, truth) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(nmi(L{2, 2, 0, 0, 1, 1}, truth) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(nmi(L{0, 0, 1, 1}, L{0, 1, 0, 1}) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(nmi(L{0, 0, 0, 0}, L{0, 1, 0, 1}) == 0.0);
    CHECK(nmi(L{3, 3, 3}, L{1, 1, 1}) == 1.0);
    CHECK(nmi(L{1, 0, 1, 0, 0}, L{0, 0, 1, 1, 1}) == doctest::Approx(nmi(L{0, 0, 1, 1, 1}, L{1, 0, 1, 0, 0})));
}

TEST_CASE("ari") {
    const L truth{0, 0, 1, 1};
    CHECK(ari(truth, truth) == 1.0);
    CHECK(ari(L{0, 1, 0, 1}, truth) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(oracle::ari_pairs(L{0, 1, 0, 1}, truth) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(ari(L{0, 0, 0, 0}, truth) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(oracle::ari_pairs(L{0, 0, 0, 0}, truth) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(ari(L{0}, L{0}), std::invalid_argument);
}

TEST_CASE("acc") {
    CHECK(acc(L{1, 1, 0, 0}, L{0, 0, 1, 1}) == 1.0);
    CHECK(acc(L{0, 1, 0, 1}, L{0, 0, 1, 1}) == 0.5);
    CHECK(acc(L{0, 1, 2, 3}, L{0, 0, 0, 0}) == 0.25);
    CHECK(acc(L{0, 0, 0, 0}, L{0, 1, 2, 3}) == 0.25);
}

TEST_CASE("purity") {
    CHECK(purity(L{0, 0, 1, 1}, L{0, 0, 1, 1}) == 1.0);
    CHECK(purity(L{0, 0, 0, 0}, L{0, 0, 1, 1}) == 0.5);
    CHECK(purity(L{0, 0, 1, 2}, L{0, 0, 1, 1}) == 1.0);
}

TEST_CASE("max_weight_assignment equals brute force on small matrices") {
    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const int rows = 1 + static_cast<int>(rng.below(4));
        const int cols = 1 + static_cast<int>(rng.below(4));
        std::vector<std::vector<double>> w(static_cast<std::size_t>(rows), std::vector<double>(static_cast<std::size_t>(cols)));
        for (auto& r : w)
            for (auto& x : r) x = static_cast<double>(rng.below(10));
        const auto assign = max_weight_assignment(w);
        double got = 0.0;
        std::vector<int> used;
        for (int r = 0; r < rows; ++r) {
            const int c = assign[static_cast<std::size_t>(r)];
            if (c < 0) continue;
            CHECK(std::find(used.begin(), used.end(), c) == used.end());
            used.push_back(c);
            got += w[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        CHECK(static_cast<int>(used.size()) == std::min(rows, cols));

        std::vector<int> perm(static_cast<std::size_t>(std::max(rows, cols)));
        std::iota(perm.begin(), perm.end(), 0);
        double best = 0.0;
        do {
            double total = 0.0;
            for (int r = 0; r < rows; ++r)
                if (perm[static_cast<std::size_t>(r)] < cols)
                    total += w[static_cast<std::size_t>(r)][static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])];
            best = std::max(best, total);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(got == best);
    }
}

TEST_CASE("all metrics agree with brute-force oracles on random partitions") {
    Rng rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(7);
        const L a = random_labels(rng, n, 1 + static_cast<int>(rng.below(4)));
        const L b = random_labels(rng, n, 1 + static_cast<int>(rng.below(4)));
        CHECK(std::abs(ari(a, b) - oracle::ari_pairs(a, b)) <= 1e-12);
        CHECK(std::abs(acc(a, b) - oracle::acc_permutations(a, b)) <= 1e-12);
        CHECK(std::abs(nmi(a, b) - oracle::nmi_entropy(a, b)) <= 1e-12);
        CHECK(std::abs(purity(a, b) - oracle::purity_counts(a, b)) <= 1e-12);
    }
}

TEST_CASE("metrics ignore relabelling") {
    Rng rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const L a = random_labels(rng, 30, 4);
        const L b = random_labels(rng, 30, 3);
        const L pa = relabel(a, {2, 0, 3, 1});
        const L pb = relabel(b, {1, 2, 0});
        CHECK(nmi(pa, pb) == doctest::Approx(nmi(a, b)).epsilon(1e-12));
        CHECK(ari(pa, pb) == doctest::Approx(ari(a, b)).epsilon(1e-12));
        CHECK(acc(pa, b) == doctest::Approx(acc(a, b)).epsilon(1e-12));
        CHECK(purity(pa, b) == doctest::Approx(purity(a, b)).epsilon(1e-12));
        const auto s = evaluate(a, b);
        CHECK(s.acc <= 1.0);
        CHECK(s.purity <= 1.0);
        CHECK(s.nmi >= 0.0);
        CHECK(s.nmi <= 1.0 + 1e-12);
    }
}

TEST_CASE("acc equals purity when majorities are distinct") {
    const L truth{0, 0, 0, 1, 1, 1, 2, 2, 2};
    const L pred{0, 0, 1, 1, 1, 1, 2, 2, 0};
    CHECK(acc(pred, truth) == purity(pred, truth));
}
