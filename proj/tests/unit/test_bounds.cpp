#include "sksv/bounds.hpp"
#include "sksv/errors.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace {

using namespace sksv;

const double kSqrt2 = std::sqrt(2.0);

TEST(ValueEnvelope, ReferenceValues) {
    const auto [lo, hi] = value_envelope(0.5);
    EXPECT_NEAR(lo, 0.70711, 1e-5);
    EXPECT_NEAR(hi, 1.22474, 1e-5);
    const auto [lo2, hi2] = value_envelope(0.19);
    EXPECT_NEAR(lo2, 0.9, 1e-12);
    EXPECT_NEAR(hi2, 1.0908712, 1e-7);
    EXPECT_THROW(value_envelope(0.0), DomainError);
    EXPECT_THROW(value_envelope(1.0), DomainError);
}

TEST(MinOverC, ClosedFormExamples) {
    EXPECT_NEAR(min_over_c_denominator(2.0, 1.0, 0.1), 2.9, 1e-12);
    EXPECT_NEAR(min_over_c_denominator(1.0, 2.0, 0.1), 2.6, 1e-12);
    EXPECT_EQ(min_over_c_denominator(1.0, 1.01, 0.05), 0.0);
    EXPECT_EQ(min_over_c_denominator(3.0, 3.0, 0.01), 0.0);
    EXPECT_THROW(min_over_c_denominator(0.0, 1.0, 0.1), DomainError);
    EXPECT_THROW(min_over_c_denominator(1.0, -1.0, 0.1), DomainError);
}

TEST(MinOverC, AgreesWithGridSearch) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> sv(0.1, 5.0);
    std::uniform_real_distribution<double> ep(0.01, 0.9);
    const int grid = 20001;
    for (int t = 0; t < 300; ++t) {
        const double si = sv(rng), sj = sv(rng), eps = ep(rng);
        double brute = INFINITY;
        for (int g = 0; g < grid; ++g) {
            const double c = -1.0 + 2.0 * g / (grid - 1);
            brute = std::min(brute, std::abs(si * si - sj * sj * (1.0 + c * eps)));
        }
        const double closed = min_over_c_denominator(si, sj, eps);
        // The grid spacing bounds how far the sampled minimum can sit above the true one.
        EXPECT_LE(closed, brute + 1e-12);
        EXPECT_GE(closed, brute - sj * sj * eps * 2.0 / (grid - 1) - 1e-12);
    }
}

TEST(VectorBound, ReferenceValues) {
    const std::vector<double> two{2.0, 1.0};
    EXPECT_NEAR(vector_error_bound(two, 0.1, 0), 0.12026707, 1e-8);
    EXPECT_NEAR(vector_error_bound(two, 0.1, 1), 0.10782565, 1e-8);

    const std::vector<double> tied{5.0, 5.0, 1.0};
    EXPECT_DOUBLE_EQ(vector_error_bound(tied, 0.1, 0), kSqrt2);

    const std::vector<double> planted{8.0, 4.0, 2.0, 1.0};
    EXPECT_DOUBLE_EQ(vector_error_bound(planted, 0.5, 0), kSqrt2);
    EXPECT_DOUBLE_EQ(vector_error_bound(planted, 0.5, 1), kSqrt2);
    EXPECT_DOUBLE_EQ(vector_error_bound(planted, 0.5, 2), kSqrt2);
    EXPECT_NEAR(vector_error_bound(planted, 0.5, 3), 0.9797959, 1e-7);
}

TEST(VectorBound, SingletonIsZero) {
    const std::vector<double> one{3.0};
    EXPECT_EQ(vector_error_bound(one, 0.3, 0), 0.0);
}

TEST(VectorBound, RejectsBadArguments) {
    const std::vector<double> two{2.0, 1.0};
    EXPECT_THROW(vector_error_bound(two, 0.1, 2), DomainError);
    EXPECT_THROW(vector_error_bound(two, 1.5, 0), DomainError);
}

TEST(VectorBound, CappedAndNonNegative) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> sv(0.01, 10.0);
    std::uniform_real_distribution<double> ep(0.001, 0.999);
    for (int t = 0; t < 2000; ++t) {
        std::vector<double> sigma(2 + t % 6);
        for (auto& s : sigma) s = sv(rng);
        std::sort(sigma.rbegin(), sigma.rend());
        const double eps = ep(rng);
        for (std::size_t j = 0; j < sigma.size(); ++j) {
            const double b = vector_error_bound(sigma, eps, j);
            EXPECT_GE(b, 0.0);
            EXPECT_LE(b, kSqrt2);
        }
    }
}

TEST(VectorBound, MonotoneInEps) {
    const std::vector<double> sigma{10.0, 3.0, 1.0};
    for (std::size_t j = 0; j < sigma.size(); ++j) {
        double prev = 0.0;
        for (int i = 1; i < 99; ++i) {
            const double b = vector_error_bound(sigma, i / 100.0, j);
            EXPECT_GE(b, prev - 1e-15);
            prev = b;
        }
    }
}

TEST(EigenvalueEnvelope, Boundaries) {
    const std::vector<double> truth{4.0};
    EXPECT_TRUE(eigenvalue_envelope_check(truth, std::vector<double>{4.4}, 0.1)[0]);
    EXPECT_FALSE(eigenvalue_envelope_check(truth, std::vector<double>{4.41}, 0.1)[0]);
    EXPECT_TRUE(eigenvalue_envelope_check(truth, std::vector<double>{3.6}, 0.1)[0]);
    EXPECT_FALSE(eigenvalue_envelope_check(truth, std::vector<double>{3.59}, 0.1)[0]);
    EXPECT_THROW(eigenvalue_envelope_check(truth, std::vector<double>{1.0, 2.0}, 0.1), DomainError);
}

TEST(EigenvalueEnvelope, ImpliedByValueEnvelope) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 5000; ++t) {
        const double eps = 0.01 + 0.98 * u(rng);
        const auto [lo, hi] = value_envelope(eps);
        const double sigma = 0.1 + 10.0 * u(rng);
        const double ratio = lo + (hi - lo) * u(rng);
        const std::vector<double> truth{sigma * sigma};
        const std::vector<double> est{(ratio * sigma) * (ratio * sigma)};
        EXPECT_TRUE(eigenvalue_envelope_check(truth, est, eps)[0]);
    }
}

TEST(RelativeGaps, Examples) {
    const std::vector<double> a{4.0, 1.0};
    const auto g = relative_gaps(a);
    ASSERT_EQ(g.relative_gaps.size(), 2u);
    EXPECT_DOUBLE_EQ(g.relative_gaps[0], 0.75);
    EXPECT_DOUBLE_EQ(g.relative_gaps[1], 3.0);
    const std::vector<double> b{9.0, 4.0, 1.0};
    EXPECT_DOUBLE_EQ(relative_gaps(b).relative_gaps[1], 0.75);
    EXPECT_TRUE(relative_gaps(std::vector<double>{2.0}).relative_gaps.empty());
    EXPECT_THROW(relative_gaps(std::vector<double>{2.0, 0.0}), DomainError);
}

OracleDecomposition diag_oracle(const std::vector<double>& sigma, Eigen::Index n) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < sigma.size(); ++i) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = sigma[i];
    return exact_svd(X);
}

TEST(Certify, ExactEstimatePasses) {
    const auto oracle = diag_oracle({3.0, 2.0, 1.0}, 5);
    const auto cert = certify(oracle, sketched_svd(oracle.X), 0.1);
    EXPECT_TRUE(cert.overall_pass);
    ASSERT_EQ(cert.records.size(), 3u);
    for (const auto& r : cert.records) {
        EXPECT_EQ(r.status, RecordStatus::checked);
        EXPECT_NEAR(*r.ratio, 1.0, 1e-14);
        EXPECT_LT(*r.vector_err, 1e-14);
    }
    EXPECT_EQ(cert.rank_true, 3u);
    EXPECT_FALSE(cert.singleton_spectrum);
    EXPECT_EQ(cert.gaps.relative_gaps.size(), 3u);
}

TEST(Certify, SignFlipsDoNotCount) {
    const auto oracle = diag_oracle({3.0, 2.0}, 3);
    auto est = sketched_svd(oracle.X);
    est.right_vectors = -est.right_vectors;
    EXPECT_TRUE(certify(oracle, est, 0.1).overall_pass);
}

TEST(Certify, ValueOutsideEnvelopeFails) {
    const auto oracle = diag_oracle({3.0, 2.0}, 3);
    auto est = sketched_svd(oracle.X);
    est.singular_values(1) = 2.0 * 1.1;
    const auto cert = certify(oracle, est, 0.1);
    EXPECT_FALSE(cert.overall_pass);
    EXPECT_TRUE(cert.records[0].passed());
    EXPECT_FALSE(cert.records[1].value_pass);
}

TEST(Certify, TruncatedEstimateIsRankMismatch) {
    const auto oracle = diag_oracle({3.0, 2.0, 1.0}, 4);
    auto est = sketched_svd(oracle.X);
    est.rank = 2;
    est.singular_values.conservativeResize(2);
    est.right_vectors.conservativeResize(Eigen::NoChange, 2);
    const auto cert = certify(oracle, est, 0.1);
    EXPECT_FALSE(cert.overall_pass);
    ASSERT_EQ(cert.records.size(), 3u);
    EXPECT_EQ(cert.records[2].status, RecordStatus::rank_mismatch);
    EXPECT_TRUE(cert.records[2].sigma_true.has_value());
    EXPECT_FALSE(cert.records[2].sigma_est.has_value());
    EXPECT_TRUE(cert.records[0].passed());
}

TEST(Certify, ExtraEstimateRankIsMismatch) {
    const auto oracle = diag_oracle({3.0}, 3);
    Eigen::MatrixXd Y = oracle.X;
    Y(1, 1) = 0.5;
    const auto cert = certify(oracle, sketched_svd(Y), 0.1);
    EXPECT_TRUE(cert.singleton_spectrum);
    ASSERT_EQ(cert.records.size(), 2u);
    EXPECT_EQ(cert.records[0].status, RecordStatus::checked);
    EXPECT_EQ(*cert.records[0].vector_bound, 0.0);
    EXPECT_EQ(cert.records[1].status, RecordStatus::rank_mismatch);
    EXPECT_FALSE(cert.overall_pass);
}

TEST(Certify, RejectsDegenerateInput) {
    const auto zero = exact_svd(Eigen::MatrixXd::Zero(3, 3));
    EXPECT_THROW(certify(zero, sketched_svd(Eigen::MatrixXd::Identity(3, 3)), 0.1), DomainError);
    const auto oracle = diag_oracle({1.0}, 3);
    EXPECT_THROW(certify(oracle, sketched_svd(Eigen::MatrixXd::Identity(4, 4)), 0.1), DomainError);
}

TEST(Certify, JsonEcho) {
    const auto oracle = diag_oracle({3.0, 2.0}, 3);
    const Json j = to_json(certify(oracle, sketched_svd(oracle.X), 0.2), {897, 42, 7});
    EXPECT_EQ(j.at("m"), 897);
    EXPECT_EQ(j.at("seed"), 42);
    EXPECT_EQ(j.at("trial_id"), 7);
    EXPECT_EQ(j.at("overall_pass"), true);
    ASSERT_EQ(j.at("records").size(), 2u);
    EXPECT_EQ(j.at("records")[0].at("status"), "checked");
}

} // namespace
