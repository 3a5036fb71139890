#include "sksv/oracle.hpp"

#include "sksv/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sksv {

void OracleBudget::require(std::size_t rows, std::size_t cols, std::string_view what) const {
    if (rows > max_rows || cols > max_cols) {
        throw ResourceError(std::string(what) + " of " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " exceeds the oracle limits of " + std::to_string(max_rows) + "x" +
                            std::to_string(max_cols));
    }
    memory.require(rows, cols, what);
}

Eigen::MatrixXd materialize_X(std::span<const MatrixUpdate> log, std::size_t N, std::size_t n,
                              const OracleBudget& budget) {
    budget.require(N, n, "materialized data matrix");
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(n));
    for (const auto& u : log) {
        if (u.row >= N || u.col >= n) {
            throw DomainError("update (" + std::to_string(u.row) + ", " + std::to_string(u.col) +
                              ") outside the " + std::to_string(N) + "x" + std::to_string(n) + " matrix");
        }
        if (!std::isfinite(u.delta)) {
            throw DomainError("update delta must be finite");
        }
        X(static_cast<Eigen::Index>(u.row), static_cast<Eigen::Index>(u.col)) += u.delta;
    }
    return X;
}

OracleDecomposition exact_svd(const Eigen::MatrixXd& X, double tol, const OracleBudget& budget) {
    budget.require(static_cast<std::size_t>(X.rows()), static_cast<std::size_t>(X.cols()), "oracle SVD input");
    if (!X.allFinite()) {
        throw NumericalError("oracle matrix contains non-finite entries");
    }
    OracleDecomposition o;
    o.X = X;
    if (X.size() == 0) {
        o.U.resize(X.rows(), 0);
        o.V.resize(X.cols(), 0);
        return o;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd, Eigen::ColPivHouseholderQRPreconditioner> svd(
        X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericalError("oracle SVD did not converge");
    }
    const Eigen::VectorXd& s = svd.singularValues();
    o.k = numerical_rank(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), tol);
    const auto k = static_cast<Eigen::Index>(o.k);
    o.sigma = s.head(k);
    o.U = svd.matrixU().leftCols(k);
    o.V = svd.matrixV().leftCols(k);
    return o;
}

Eigen::VectorXd symmetric_eigenvalues_desc(const Eigen::MatrixXd& S) {
    if (S.size() == 0) {
        return {};
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolve did not converge");
    }
    return eig.eigenvalues().reverse();
}

double symmetric_norm2(const Eigen::MatrixXd& S) {
    if (S.size() == 0) {
        return 0.0;
    }
    return symmetric_eigenvalues_desc(S).cwiseAbs().maxCoeff();
}

PerturbationDiagnostics perturbation_diagnostics(const Eigen::MatrixXd& phi, const OracleDecomposition& oracle,
                                                 const Eigen::MatrixXd& Y, DiagnosticsOptions options) {
    if (phi.cols() != oracle.U.rows() || Y.cols() != oracle.V.rows() || Y.rows() != phi.rows()) {
        throw DomainError("operator, oracle, and sketch dimensions disagree");
    }
    const auto k = static_cast<Eigen::Index>(oracle.k);
    PerturbationDiagnostics d;

    const Eigen::MatrixXd phi_u = phi * oracle.U;
    d.projected = phi_u.transpose() * phi_u - Eigen::MatrixXd::Identity(k, k);
    d.projected_norm = symmetric_norm2(d.projected);

    const Eigen::MatrixXd scaled = oracle.sigma.asDiagonal() * d.projected * oracle.sigma.asDiagonal();
    d.E = oracle.V * scaled * oracle.V.transpose();
    d.E_norm = symmetric_norm2(d.E);

    const Eigen::MatrixXd yv = Y * oracle.V;
    d.M = yv.transpose() * yv;

    if (options.full_delta_norm) {
        // Eigenvalues of Phi^T Phi are the squared singular values of Phi,
        // plus zeros when m < N. Work with the smaller Gram matrix.
        const Eigen::MatrixXd gram = phi.rows() <= phi.cols() ? Eigen::MatrixXd(phi * phi.transpose())
                                                              : Eigen::MatrixXd(phi.transpose() * phi);
        const Eigen::VectorXd ev = symmetric_eigenvalues_desc(gram);
        double norm = (ev.array() - 1.0).abs().maxCoeff();
        if (phi.rows() < phi.cols()) {
            norm = std::max(norm, 1.0);
        }
        d.delta_phi_norm = norm;
    } else {
        d.delta_phi_norm = std::numeric_limits<double>::quiet_NaN();
    }
    return d;
}

PerturbationDiagnostics perturbation_diagnostics(const SketchConfig& config, const OracleDecomposition& oracle,
                                                 const Eigen::MatrixXd& Y, const OracleBudget& budget,
                                                 DiagnosticsOptions options) {
    return perturbation_diagnostics(materialize_phi(config, budget.memory), oracle, Y, options);
}

bool weyl_check(std::span<const double> lambda_true, std::span<const double> lambda_est, double E_norm) {
    if (lambda_true.size() != lambda_est.size()) {
        throw DomainError("weyl_check needs eigenvalue lists of equal length");
    }
    const double bound = E_norm + 1e-9 * E_norm + 1e-12;
    for (std::size_t j = 0; j < lambda_true.size(); ++j) {
        if (!(std::abs(lambda_est[j] - lambda_true[j]) <= bound)) {
            return false;
        }
    }
    return true;
}

bool weyl_check(const OracleDecomposition& oracle, const PerturbationDiagnostics& diagnostics,
                const SpectralEstimate& estimate) {
    const auto len = static_cast<Eigen::Index>(std::max(oracle.k, estimate.rank));
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(len);
    Eigen::VectorXd est = Eigen::VectorXd::Zero(len);
    truth.head(static_cast<Eigen::Index>(oracle.k)) = oracle.eigenvalues();
    est.head(static_cast<Eigen::Index>(estimate.rank)) = estimate.eigenvalues;
    return weyl_check(std::span<const double>(truth.data(), static_cast<std::size_t>(len)),
                      std::span<const double>(est.data(), static_cast<std::size_t>(len)), diagnostics.E_norm);
}

bool subspace_embedding_check(const Eigen::MatrixXd& phi, const OracleDecomposition& oracle, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("eps must lie strictly inside (0, 1)");
    }
    if (phi.cols() != oracle.U.rows()) {
        throw DomainError("operator and oracle dimensions disagree");
    }
    if (oracle.k == 0) {
        return true;
    }
    if (static_cast<std::size_t>(phi.rows()) < oracle.k) {
        return false; // Phi U has a nontrivial null space
    }
    const Eigen::MatrixXd phi_u = phi * oracle.U;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi_u);
    const Eigen::VectorXd& s = svd.singularValues();
    constexpr double slack = 1e-12;
    return s.minCoeff() >= std::sqrt(1.0 - eps) - slack && s.maxCoeff() <= std::sqrt(1.0 + eps) + slack;
}

bool subspace_embedding_check(const SketchConfig& config, const OracleDecomposition& oracle, double eps,
                              const OracleBudget& budget) {
    return subspace_embedding_check(materialize_phi(config, budget.memory), oracle, eps);
}

double rayleigh_quotient(const Eigen::MatrixXd& M, const Eigen::VectorXd& sigma, const Eigen::VectorXd& x) {
    const double denom = (sigma.array() * x.array()).matrix().squaredNorm();
    if (!(denom > 0.0)) {
        throw DomainError("rayleigh quotient needs x outside the null space of Sigma");
    }
    return x.dot(M * x) / denom;
}

double max_rayleigh_deviation(const PerturbationDiagnostics& diagnostics, const Eigen::VectorXd& sigma,
                              std::size_t samples, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd x(sigma.size());
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x[i] = normal(rng);
        }
        worst = std::max(worst, std::abs(rayleigh_quotient(diagnostics.M, sigma, x) - 1.0));
    }
    return worst;
}

Json to_json(const OracleDecomposition& o) {
    Json j;
    j["k"] = o.k;
    j["singular_values"] = Json::array();
    j["eigenvalues"] = Json::array();
    for (Eigen::Index i = 0; i < o.sigma.size(); ++i) {
        j["singular_values"].push_back(o.sigma[i]);
        j["eigenvalues"].push_back(o.sigma[i] * o.sigma[i]);
    }
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < o.V.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < o.V.cols(); ++c) {
            row.push_back(o.V(r, c));
        }
        rows.push_back(std::move(row));
    }
    j["right_vectors"] = std::move(rows);
    return j;
}

} // namespace sksv
