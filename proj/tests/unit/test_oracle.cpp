#include "sksv/errors.hpp"
#include "sksv/oracle.hpp"
#include "sksv/stream_io.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

namespace {

using namespace sksv;
using sksv::testing::matrix_config;

Eigen::VectorXd planted_sigma() {
    Eigen::VectorXd s(4);
    s << 8.0, 4.0, 2.0, 1.0;
    return s;
}

TEST(ExactSvd, RecoversPlantedSpectrum) {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd X = sksv::testing::planted_matrix(120, 16, planted_sigma(), rng);
    const auto o = exact_svd(X);
    ASSERT_EQ(o.k, 4u);
    EXPECT_LT((o.sigma - planted_sigma()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(relative_frobenius(o.U * o.sigma.asDiagonal() * o.V.transpose(), X), 1e-12);
    EXPECT_NEAR(o.eigenvalues()(0), 64.0, 1e-9);
    const Json j = to_json(o);
    EXPECT_EQ(j.at("k"), 4);
    EXPECT_EQ(j.at("right_vectors").size(), 16u);
}

TEST(ExactSvd, GoldenDecomposition) {
    // Reference values computed with LAPACK (numpy.linalg.svd) from the same log.
    const std::filesystem::path dir = SKSV_FIXTURE_DIR;
    std::ifstream in(dir / "planted_rank2.oracle.json");
    const Json golden = Json::parse(in);
    const auto log = read_matrix_log(dir / "planted_rank2.jsonl");
    const auto o = exact_svd(materialize_X(log, golden.at("N"), golden.at("n")));
    ASSERT_EQ(o.k, golden.at("k").get<std::size_t>());
    Eigen::MatrixXd V(o.V.rows(), o.V.cols());
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
        EXPECT_NEAR(o.sigma(j), golden.at("singular_values")[j].get<double>(), 1e-10);
        for (Eigen::Index i = 0; i < V.rows(); ++i) V(i, j) = golden.at("right_vectors")[i][j].get<double>();
    }
    EXPECT_LT((align_signs(V, o.V) - V).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ExactSvd, ZeroAndEmpty) {
    EXPECT_EQ(exact_svd(Eigen::MatrixXd::Zero(4, 3)).k, 0u);
    EXPECT_EQ(exact_svd(Eigen::MatrixXd(0, 3)).k, 0u);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
    bad(0, 1) = INFINITY;
    EXPECT_THROW(exact_svd(bad), NumericalError);
}

TEST(Budget, OracleLimits) {
    OracleBudget b;
    b.max_rows = 10;
    EXPECT_THROW(exact_svd(Eigen::MatrixXd::Zero(11, 2), kDefaultRankTol, b), ResourceError);
    EXPECT_THROW(materialize_X({}, 11, 2, b), ResourceError);
    OracleBudget mem;
    mem.memory.max_bytes = 64;
    EXPECT_THROW(materialize_X({}, 5, 5, mem), ResourceError);
    EXPECT_NO_THROW(materialize_X({}, 2, 4, mem));
}

TEST(MaterializeX, AccumulatesAndValidates) {
    const std::vector<MatrixUpdate> log{{0, 1, 2.0}, {0, 1, 0.5}, {2, 0, -1.0}};
    const auto X = materialize_X(log, 3, 2);
    EXPECT_EQ(X(0, 1), 2.5);
    EXPECT_EQ(X(2, 0), -1.0);
    EXPECT_EQ(X.sum(), 1.5);
    const std::vector<MatrixUpdate> bad{{3, 0, 1.0}};
    EXPECT_THROW(materialize_X(bad, 3, 2), DomainError);
}

TEST(Diagnostics, IdentityOperatorIsExact) {
    std::mt19937_64 rng(2);
    const Eigen::MatrixXd X = sksv::testing::planted_matrix(40, 8, planted_sigma(), rng);
    const auto c = matrix_config(0, JlFamily::identity(), 40, 40, 8);
    const auto o = exact_svd(X);
    const auto d = perturbation_diagnostics(c, o, sksv::testing::sketch_rows(c, X).Y);
    EXPECT_LT(d.projected_norm, 1e-13);
    EXPECT_LT(d.E_norm, 1e-11);
    EXPECT_LT(d.delta_phi_norm, 1e-15);
    const Eigen::MatrixXd expected_M = o.eigenvalues().asDiagonal();
    EXPECT_LT((d.M - expected_M).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_TRUE(subspace_embedding_check(c, o, 0.01));
}

TEST(Diagnostics, WideOperatorHasUnitDeltaFloor) {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd X = sksv::testing::planted_matrix(60, 6, planted_sigma(), rng);
    const auto c = matrix_config(3, JlFamily::gaussian(), 20, 60, 6);
    const auto o = exact_svd(X);
    const auto Y = sksv::testing::sketch_rows(c, X).Y;
    EXPECT_GE(perturbation_diagnostics(c, o, Y).delta_phi_norm, 1.0);
    EXPECT_TRUE(std::isnan(perturbation_diagnostics(c, o, Y, {}, {.full_delta_norm = false}).delta_phi_norm));
}

class RandomSketch : public ::testing::TestWithParam<int> {};

TEST_P(RandomSketch, PerturbationIdentities) {
    const int t = GetParam();
    std::mt19937_64 rng(100 + t);
    const Eigen::MatrixXd X = sksv::testing::planted_matrix(200, 12, planted_sigma(), rng);
    const auto c = matrix_config(100 + t, JlFamily::gaussian(), 150, 200, 12);
    const auto o = exact_svd(X);
    const auto Y = sksv::testing::sketch_rows(c, X).Y;
    const auto est = sketched_svd(Y);
    const auto d = perturbation_diagnostics(c, o, Y);

    // Y^T Y = V Sigma^2 V^T + E, so the eigenvalues of M are the squared sketch singular values.
    ASSERT_EQ(est.rank, 4u);
    const Eigen::VectorXd eig_M = symmetric_eigenvalues_desc(d.M);
    EXPECT_LT((eig_M - est.eigenvalues).cwiseAbs().maxCoeff(), 1e-9 * est.eigenvalues(0));
    const Eigen::MatrixXd YtY = Y.transpose() * Y;
    const Eigen::MatrixXd rebuilt = o.V * o.eigenvalues().asDiagonal() * o.V.transpose() + d.E;
    EXPECT_LT((YtY - rebuilt).cwiseAbs().maxCoeff(), 1e-9 * YtY.cwiseAbs().maxCoeff());

    EXPECT_TRUE(weyl_check(o, d, est));
    auto shifted = est;
    shifted.eigenvalues(0) += 2.0 * d.E_norm + 1e-6;
    EXPECT_FALSE(weyl_check(o, d, shifted));

    EXPECT_LE(d.projected_norm, d.delta_phi_norm + 1e-12);
    EXPECT_LE(d.E_norm, d.projected_norm * o.eigenvalues()(0) * (1.0 + 1e-12) + 1e-12);

    std::mt19937_64 xs(t);
    EXPECT_LE(max_rayleigh_deviation(d, o.sigma, 1000, xs), d.projected_norm + 1e-12);

    // Ratios of Rayleigh-extreme values: lambda_i(M) / sigma_i^2 stays within 1 +- projected_norm.
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double ratio = eig_M(i) / o.eigenvalues()(i);
        EXPECT_GE(ratio, 1.0 - d.projected_norm - 1e-12);
        EXPECT_LE(ratio, 1.0 + d.projected_norm + 1e-12);
    }

    // The subspace check and the projected norm describe the same event.
    const double eps_hit = d.projected_norm * (1.0 + 1e-6);
    if (eps_hit < 1.0) {
        EXPECT_TRUE(subspace_embedding_check(c, o, eps_hit));
    }
    EXPECT_FALSE(subspace_embedding_check(c, o, d.projected_norm * 0.999));
}

INSTANTIATE_TEST_SUITE_P(Trials, RandomSketch, ::testing::Range(0, 8));

TEST(SubspaceEmbedding, TooFewRowsFails) {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd X = sksv::testing::planted_matrix(50, 8, planted_sigma(), rng);
    const auto o = exact_svd(X);
    EXPECT_FALSE(subspace_embedding_check(matrix_config(4, JlFamily::gaussian(), 3, 50, 8), o, 0.99));
    EXPECT_THROW(subspace_embedding_check(matrix_config(4, JlFamily::gaussian(), 3, 49, 8), o, 0.5), DomainError);
    EXPECT_THROW(subspace_embedding_check(matrix_config(4, JlFamily::gaussian(), 3, 50, 8), o, 1.0), DomainError);
}

TEST(Weyl, SpanOverload) {
    const std::vector<double> truth{4.0, 1.0};
    EXPECT_TRUE(weyl_check(truth, std::vector<double>{4.5, 0.5}, 0.5));
    EXPECT_FALSE(weyl_check(truth, std::vector<double>{4.5, 0.4}, 0.5));
    EXPECT_THROW(weyl_check(truth, std::vector<double>{4.0}, 0.5), DomainError);
}

TEST(Rayleigh, QuotientAndDomain) {
    Eigen::MatrixXd M(2, 2);
    M << 4.0, 0.0,
         0.0, 1.0;
    Eigen::VectorXd sigma(2);
    sigma << 2.0, 1.0;
    Eigen::VectorXd x(2);
    x << 0.3, -0.7;
    EXPECT_NEAR(rayleigh_quotient(M, sigma, x), 1.0, 1e-15);
    EXPECT_THROW(rayleigh_quotient(M, sigma, Eigen::VectorXd::Zero(2)), DomainError);
}

TEST(SymmetricHelpers, EigenvaluesDescendingAndNorm) {
    Eigen::MatrixXd S(3, 3);
    S << 1, 0, 0,
         0, -5, 0,
         0, 0, 3;
    const auto ev = symmetric_eigenvalues_desc(S);
    EXPECT_EQ(ev(0), 3.0);
    EXPECT_EQ(ev(2), -5.0);
    EXPECT_EQ(symmetric_norm2(S), 5.0);
    EXPECT_EQ(symmetric_norm2(Eigen::MatrixXd(0, 0)), 0.0);
}

} // namespace
