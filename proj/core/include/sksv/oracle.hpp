#pragma once

#include "sksv/jl_sketch.hpp"
#include "sksv/spectral.hpp"
#include "sksv/turnstile.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <random>
#include <span>

namespace sksv {

/// Desk-scale limits for dense ground-truth work. The oracle is a
/// verification tool and never runs on the streaming path.
struct OracleBudget {
    std::size_t max_rows = 20000;
    std::size_t max_cols = 256;
    MemoryBudget memory = MemoryBudget::from_env();

    void require(std::size_t rows, std::size_t cols, std::string_view what) const;
};

/// Truncated SVD X = U diag(sigma) V^T of a materialized matrix.
struct OracleDecomposition {
    Eigen::MatrixXd X;     ///< N x n
    Eigen::MatrixXd U;     ///< N x k
    Eigen::VectorXd sigma; ///< descending, positive
    Eigen::MatrixXd V;     ///< n x k
    std::size_t k = 0;

    Eigen::VectorXd eigenvalues() const { return sigma.array().square(); }
};

/// Perturbation of X^T X induced by the sketch, in the coordinates of X's
/// truncated SVD. With Delta = Phi^T Phi - I:
///   projected = U^T Delta U            (k x k)
///   E         = V Sigma projected Sigma V^T   (n x n), so Y^T Y = V Sigma^2 V^T + E
///   M         = V^T Y^T Y V            (k x k)
struct PerturbationDiagnostics {
    double delta_phi_norm = 0.0; ///< ||Phi^T Phi - I||_2, or NaN when not computed
    double projected_norm = 0.0; ///< ||U^T Delta U||_2
    double E_norm = 0.0;         ///< ||E||_2
    Eigen::MatrixXd projected;   ///< k x k
    Eigen::MatrixXd E;           ///< n x n
    Eigen::MatrixXd M;           ///< k x k
};

Eigen::MatrixXd materialize_X(std::span<const MatrixUpdate> log, std::size_t N, std::size_t n,
                              const OracleBudget& budget = {});

OracleDecomposition exact_svd(const Eigen::MatrixXd& X, double tol = kDefaultRankTol,
                              const OracleBudget& budget = {});

struct DiagnosticsOptions {
    /// ||Phi^T Phi - I||_2 needs the spectrum of the full operator; skip it
    /// when only the projected quantities matter.
    bool full_delta_norm = true;
};

PerturbationDiagnostics perturbation_diagnostics(const SketchConfig& config, const OracleDecomposition& oracle,
                                                 const Eigen::MatrixXd& Y, const OracleBudget& budget = {},
                                                 DiagnosticsOptions options = {});

/// Same, for an operator that is already materialized.
PerturbationDiagnostics perturbation_diagnostics(const Eigen::MatrixXd& phi, const OracleDecomposition& oracle,
                                                 const Eigen::MatrixXd& Y, DiagnosticsOptions options = {});

/// |lambda_est_j - lambda_true_j| <= E_norm (1 + 1e-9) + 1e-12 for every j.
/// Throws DomainError on length mismatch.
bool weyl_check(std::span<const double> lambda_true, std::span<const double> lambda_est, double E_norm);

/// Weyl bound over the full spectra of X^T X and Y^T Y: the shorter list is
/// padded with zeros, since eigenvalues past either rank are (numerically) zero.
bool weyl_check(const OracleDecomposition& oracle, const PerturbationDiagnostics& diagnostics,
                const SpectralEstimate& estimate);

/// sqrt(1-eps) <= s_min(Phi U) and s_max(Phi U) <= sqrt(1+eps): the norm of
/// every vector in colspan(U) is preserved within the two-sided bound.
bool subspace_embedding_check(const Eigen::MatrixXd& phi, const OracleDecomposition& oracle, double eps);
bool subspace_embedding_check(const SketchConfig& config, const OracleDecomposition& oracle, double eps,
                              const OracleBudget& budget = {});

/// x^T M x / x^T Sigma^2 x.
double rayleigh_quotient(const Eigen::MatrixXd& M, const Eigen::VectorXd& sigma, const Eigen::VectorXd& x);

/// Largest |quotient - 1| over `samples` standard-normal x. The quotient
/// minus one never exceeds projected_norm in magnitude.
double max_rayleigh_deviation(const PerturbationDiagnostics& diagnostics, const Eigen::VectorXd& sigma,
                              std::size_t samples, std::mt19937_64& rng);

/// Eigenvalues of a symmetric matrix, descending.
Eigen::VectorXd symmetric_eigenvalues_desc(const Eigen::MatrixXd& S);

/// Largest absolute eigenvalue of a symmetric matrix (its spectral norm).
double symmetric_norm2(const Eigen::MatrixXd& S);

Json to_json(const OracleDecomposition& oracle);

} // namespace sksv
