#include "doctest.h"

#include "mvfuse/datagen.hpp"
#include "mvfuse/fusion.hpp"
#include "mvfuse/pipeline.hpp"
#include "oracles.hpp"

using namespace mvfuse;
using namespace mvfuse::fusion;

namespace {

// Random multi-view graph over a random pair set; a few entries are zero so
// views do not share identical supports.
graphs::MultiViewDenseGraph random_mvdr(Rng& rng, std::size_t n, int views, std::size_t edges) {
    std::vector<graphs::NodePair> pairs;
    while (pairs.size() < edges) {
        const auto i = static_cast<std::uint32_t>(rng.below(n));
        const auto j = static_cast<std::uint32_t>(rng.below(n));
        if (i == j) continue;
        if (std::find(pairs.begin(), pairs.end(), graphs::NodePair{i, j}) != pairs.end()) continue;
        pairs.emplace_back(i, j);
    }
    graphs::MultiViewDenseGraph mv{graphs::EdgeIndexSet(n, pairs), Matrix(views, static_cast<Eigen::Index>(edges))};
    for (int i = 0; i < views; ++i)
        for (Eigen::Index j = 0; j < mv.W.cols(); ++j) mv.W(i, j) = rng.uniform() < 0.15 ? 0.0 : rng.uniform(0.05, 1);
    for (int i = 0; i < views; ++i) mv.W(i, 0) += 0.1;
    return mv;
}

FusionState random_state(Rng& rng, const Matrix& W) {
    FusionState st;
    st.A = W;
    for (Eigen::Index i = 0; i < W.rows(); ++i)
        for (Eigen::Index j = 0; j < W.cols(); ++j) st.A(i, j) = W(i, j) * rng.uniform();
    st.alpha = oracle::random_simplex(rng, static_cast<int>(W.rows()));
    st.s = Vector(W.cols());
    for (Eigen::Index j = 0; j < W.cols(); ++j) st.s(j) = rng.uniform();
    return st;
}

FusionParams random_params(Rng& rng, int views) {
    FusionParams p;
    p.beta = rng.uniform(0, 5);
    p.gamma = rng.uniform(0, 50);
    p.lambda = Vector(views);
    for (int i = 0; i < views; ++i) p.lambda(i) = rng.uniform(0.2, 3);
    return p;
}

std::vector<std::pair<int, int>> int_pairs(const graphs::EdgeIndexSet& index) {
    std::vector<std::pair<int, int>> out;
    for (auto [i, j] : index.pairs()) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
    return out;
}

} // namespace

TEST_CASE("objective_value on small hand-checked states") {
    FusionParams params;
    SUBCASE("single view at its fixed point") {
        Matrix W(1, 3);
        W << 0.2, 0.3, 0.5;
        FusionState st{W, Vector::Ones(1), W.row(0).transpose()};
        CHECK(objective_value(W, st, params) == 0.0);
    }
    SUBCASE("two orthogonal views") {
        Matrix W = Matrix::Identity(2, 2);
        Vector alpha(2), s(2);
        alpha << 0.5, 0.5;
        s << 0.25, 0.25;
        FusionState st{W, alpha, s};
        CHECK(objective_value(W, st, params) == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("shape errors") {
        Matrix W = Matrix::Identity(2, 2);
        FusionState st{Matrix::Identity(2, 3), Vector::Constant(2, 0.5), Vector::Zero(2)};
        CHECK_THROWS_AS(objective_value(W, st, params), ShapeError);
    }
}

TEST_CASE("objective_value agrees with a sparse-matrix transcription") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const int v = 1 + static_cast<int>(rng.below(4));
        const auto mv = random_mvdr(rng, 12, v, 30);
        const auto st = random_state(rng, mv.W);
        const auto params = random_params(rng, v);
        const double expected = oracle::fusion_objective_sparse(int_pairs(mv.index), 12, mv.W, st.A, st.alpha,
                                                                st.s, params.lambda, params.beta, params.gamma);
        CHECK(objective_value(mv.W, st, params) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(objective_value(mv.W, st, params) >= 0.0);
    }
}

TEST_CASE("assemble_alpha_qp closed forms") {
    FusionParams params;
    SUBCASE("A = W leaves only the diagonal term") {
        Rng rng(4);
        const auto mv = random_mvdr(rng, 8, 3, 15);
        const Vector s = Vector::Constant(15, 0.3);
        const auto qp = assemble_alpha_qp(mv.W, mv.W, s, params);
        CHECK(qp.H.isDiagonal(0.0));
        for (int i = 0; i < 3; ++i) CHECK(qp.H(i, i) == doctest::Approx(2.0 * mv.W.row(i).squaredNorm()));
    }
    SUBCASE("single view") {
        Matrix W = Matrix::Ones(1, 2);
        const auto qp = assemble_alpha_qp(W, W, Vector::Ones(2), params);
        CHECK(qp.H(0, 0) == 4.0);
        CHECK(qp.c(0) == 4.0);
    }
}

TEST_CASE("assemble_alpha_qp differs from the objective in alpha by a constant") {
    Rng rng(202);
    for (int trial = 0; trial < 10; ++trial) {
        const int v = 2 + static_cast<int>(rng.below(3));
        const auto mv = random_mvdr(rng, 10, v, 25);
        auto st = random_state(rng, mv.W);
        const auto params = random_params(rng, v);
        const auto qp = assemble_alpha_qp(mv.W, st.A, st.s, params);
        CHECK((qp.H - qp.H.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (int pair = 0; pair < 10; ++pair) {
            st.alpha = oracle::random_simplex(rng, v);
            const double f1 = objective_value(mv.W, st, params);
            const double q1 = qp.objective(st.alpha);
            st.alpha = oracle::random_simplex(rng, v);
            const double f2 = objective_value(mv.W, st, params);
            const double q2 = qp.objective(st.alpha);
            CHECK(f1 - f2 == doctest::Approx(q1 - q2).epsilon(1e-9).scale(std::abs(f1) + 1.0));
        }
    }
}

TEST_CASE("update_s closed forms and optimality") {
    SUBCASE("single view copies the row") {
        Matrix A(1, 3);
        A << 0.1, 0.4, 0.5;
        CHECK(update_s(A, Vector::Ones(1), Vector::Ones(1)) == A.row(0).transpose());
    }
    SUBCASE("weighted average") {
        Matrix A = Matrix::Identity(2, 2);
        Vector alpha(2);
        alpha << 0.3, 0.7;
        const Vector s = update_s(A, alpha, Vector::Ones(2));
        CHECK(s(0) == doctest::Approx(0.15).epsilon(1e-15));
        CHECK(s(1) == doctest::Approx(0.35).epsilon(1e-15));
    }
    SUBCASE("no perturbation lowers the objective") {
        Rng rng(303);
        for (int trial = 0; trial < 10; ++trial) {
            const int v = 1 + static_cast<int>(rng.below(4));
            const auto mv = random_mvdr(rng, 10, v, 25);
            auto st = random_state(rng, mv.W);
            const auto params = random_params(rng, v);
            st.s = update_s(st.A, st.alpha, params.lambda);
            CHECK(st.s.minCoeff() >= 0.0);
            const double best = objective_value(mv.W, st, params);
            for (int p = 0; p < 10; ++p) {
                FusionState moved = st;
                for (Eigen::Index j = 0; j < moved.s.size(); ++j) moved.s(j) += 1e-3 * rng.normal();
                CHECK(best <= objective_value(mv.W, moved, params) + 1e-12);
            }
        }
    }
}

TEST_CASE("assemble_A_qp closed forms") {
    SUBCASE("no coupling leaves D diagonal and L = 2 t s'") {
        FusionParams params;
        params.beta = 0.0;
        params.gamma = 0.0;
        Rng rng(6);
        const auto mv = random_mvdr(rng, 8, 3, 12);
        const Vector alpha = oracle::random_simplex(rng, 3);
        const Vector s = Vector::Constant(12, 0.2);
        const auto b = assemble_A_qp(mv.W, alpha, s, params);
        CHECK(b.D.isDiagonal(0.0));
        CHECK((b.L - 2.0 * alpha * s.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(b.U == mv.W);
    }
    SUBCASE("single view") {
        FusionParams params;
        const auto b = assemble_A_qp(Matrix::Ones(1, 2), Vector::Ones(1), Vector::Ones(2), params);
        CHECK(b.D(0, 0) == 4.0);
    }
}

TEST_CASE("assemble_A_qp column quadratics differ from the objective in A by a constant") {
    Rng rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        const int v = 2 + static_cast<int>(rng.below(3));
        const auto mv = random_mvdr(rng, 10, v, 25);
        auto st = random_state(rng, mv.W);
        const auto params = random_params(rng, v);
        const auto b = assemble_A_qp(mv.W, st.alpha, st.s, params);
        for (int pair = 0; pair < 10; ++pair) {
            const double f1 = objective_value(mv.W, st, params);
            const double q1 = b.column_objectives(st.A).sum();
            st = FusionState{random_state(rng, mv.W).A, st.alpha, st.s};
            const double f2 = objective_value(mv.W, st, params);
            const double q2 = b.column_objectives(st.A).sum();
            CHECK(f1 - f2 == doctest::Approx(q1 - q2).epsilon(1e-9).scale(std::abs(f1) + 1.0));
        }
    }
}

TEST_CASE("assembled A Hessian always has a positive eigenvalue") {
    Rng rng(505);
    for (int trial = 0; trial < 100; ++trial) {
        const int v = 1 + static_cast<int>(rng.below(6));
        FusionParams params;
        params.beta = rng.uniform(0, 1e5);
        params.gamma = rng.uniform(0, 1e5);
        params.lambda = Vector(v);
        for (int i = 0; i < v; ++i) params.lambda(i) = rng.uniform(0.01, 10);
        const Vector alpha = oracle::random_simplex(rng, v);
        const auto b = assemble_A_qp(Matrix::Ones(v, 1), alpha, Vector::Ones(1), params);
        CHECK(qp::largest_eigenvalue(b.D) > 0.0);
    }
}

TEST_CASE("FusionParams validation") {
    FusionParams p;
    CHECK_NOTHROW(p.validate(3));
    p.lambda = Vector::Ones(2);
    CHECK_THROWS_AS(p.validate(3), ShapeError);
    p.lambda = Vector::Zero(3);
    CHECK_THROWS_AS(p.validate(3), std::invalid_argument);
    p.lambda.resize(0);
    p.beta = -1;
    CHECK_THROWS_AS(p.validate(3), std::invalid_argument);
    p.beta = 1;
    p.max_outer = 0;
    CHECK_THROWS_AS(p.validate(3), std::invalid_argument);
}

TEST_CASE("learn_consistent_graph: one view is a fixed point") {
    Rng rng(9);
    const auto mv = random_mvdr(rng, 20, 1, 60);
    const auto r = learn_consistent_graph(mv, {});
    const Matrix Wn = graphs::row_normalize(mv).W;
    CHECK(r.converged);
    CHECK(r.iterations <= 2);
    CHECK(r.state.alpha(0) == 1.0);
    CHECK((r.state.s - Wn.row(0).transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((r.state.A - Wn).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("learn_consistent_graph: identical views share the weight equally") {
    Rng rng(10);
    auto mv = random_mvdr(rng, 20, 1, 60);
    const Vector row = mv.W.row(0).transpose();
    mv.W = row.transpose().replicate(4, 1);
    const auto r = learn_consistent_graph(mv, {});
    const Vector rown = row / row.sum();
    for (int i = 0; i < 4; ++i) CHECK(r.state.alpha(i) == doctest::Approx(0.25).epsilon(1e-8));
    // s = sum_i t_i A_i with A_i = W_i, so s is the common row scaled by sum(alpha)/v
    CHECK((r.state.s / r.state.s.sum() - rown).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("learn_consistent_graph keeps every constraint and never increases the objective") {
    Rng rng(606);
    for (int trial = 0; trial < 12; ++trial) {
        const int v = 2 + static_cast<int>(rng.below(4));
        const auto mv = random_mvdr(rng, 30, v, 120);
        auto params = random_params(rng, v);
        if (trial % 3 == 0) params.gamma = 1e4;
        const Matrix Wn = graphs::row_normalize(mv).W;
        int calls = 0;
        const auto r = learn_consistent_graph(mv, params, [&](int iter, const FusionState& st, double f) {
            ++calls;
            CHECK(iter == calls);
            CHECK((st.A.array() >= 0.0).all());
            CHECK((st.A.array() <= Wn.array()).all());
            CHECK(st.alpha.minCoeff() >= 0.0);
            CHECK(std::abs(st.alpha.sum() - 1.0) <= 1e-10);
            CHECK(st.s.minCoeff() >= 0.0);
            CHECK(f == doctest::Approx(objective_value(Wn, st, params)).epsilon(1e-14));
        });
        CHECK(calls == r.iterations);
        CHECK(static_cast<int>(r.objective_trace.size()) == r.iterations);
        double prev = r.initial_objective;
        for (double f : r.objective_trace) {
            CHECK(f <= prev + 1e-8 * std::max(1.0, prev));
            prev = f;
        }
    }
}

TEST_CASE("learn_consistent_graph ignores the scale of any single view") {
    Rng rng(707);
    const auto mv = random_mvdr(rng, 30, 3, 120);
    // the AFW gap threshold is absolute, so it has to sit well below the
    // tolerance for the inner solutions to agree that closely
    FusionParams params;
    params.afw_eps = 1e-15;
    const auto base = learn_consistent_graph(mv, params);
    for (double c : {0.01, 3.0, 100.0}) {
        for (int view = 0; view < 3; ++view) {
            auto scaled = mv;
            scaled.W.row(view) *= c;
            const auto r = learn_consistent_graph(scaled, params);
            CHECK((r.state.alpha - base.state.alpha).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK((r.state.s - base.state.s).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("learn_consistent_graph iterates are unchanged by a uniform lambda scale without coupling") {
    Rng rng(808);
    const auto mv = random_mvdr(rng, 30, 3, 120);
    FusionParams params;
    params.beta = 0.0;
    params.gamma = 0.0;
    params.rel_tol = 0.0;
    params.max_outer = 8;
    params.afw_eps = 1e-14;
    params.lambda = Vector(3);
    params.lambda << 1.0, 2.0, 0.5;
    const auto base = learn_consistent_graph(mv, params);
    for (double c : {0.1, 7.0}) {
        auto scaled = params;
        scaled.lambda *= c;
        const auto r = learn_consistent_graph(mv, scaled);
        CHECK((r.state.alpha - base.state.alpha).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((r.state.s - base.state.s).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((r.state.A - base.state.A).cwiseAbs().maxCoeff() <= 1e-8);
        for (std::size_t k = 0; k < r.objective_trace.size(); ++k)
            CHECK(r.objective_trace[k] == doctest::Approx(c * base.objective_trace[k]).epsilon(1e-8));
    }
}

TEST_CASE("learn_consistent_graph rejects an all-zero view") {
    Rng rng(11);
    auto mv = random_mvdr(rng, 10, 2, 20);
    mv.W.row(1).setZero();
    CHECK_THROWS_AS(learn_consistent_graph(mv, {}), std::invalid_argument);
}

TEST_CASE("fused graph puts less weight across clusters than the corrupted view") {
    datagen::SyntheticSpec spec;
    spec.corrupt_views = {3};
    spec.corrupt_rate = 0.5;
    spec.seed = 3;
    const auto data = datagen::generate_multiview(spec);
    pipeline::PipelineConfig cfg;
    cfg.input = pipeline::InputKind::distances;
    cfg.n_clusters = 4;
    std::vector<Matrix> dist;
    for (const auto& g : data.views) dist.push_back(datagen::similarity_to_distance(g));
    auto knn = pipeline::knn_distance_graphs(dist, cfg);
    std::vector<graphs::SparseViewGraph> sims;
    for (const auto& g : knn) sims.push_back(graphs::gaussian_kernel(graphs::normalize_knn_distances(g), {}));
    const auto mv = graphs::build_mvdr(sims);
    const auto r = learn_consistent_graph(mv, {});
    const Matrix Wn = graphs::row_normalize(mv).W;

    auto cross_share = [&](const Vector& w) {
        double cross = 0.0;
        for (std::size_t j = 0; j < mv.index.size(); ++j) {
            const auto [a, b] = mv.index[j];
            if (data.truth[a] != data.truth[b]) cross += w(static_cast<Eigen::Index>(j));
        }
        return cross / w.sum();
    };
    CHECK(cross_share(r.state.s) < cross_share(Wn.row(3).transpose()));
}
