#pragma once

#include "sksv/jl_sketch.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>

namespace sksv {

/// Relative threshold below which singular values count as zero.
inline constexpr double kDefaultRankTol = 1e-8;

/// Truncated SVD of a sketch: estimates of the singular values and right
/// singular vectors of the sketched matrix.
struct SpectralEstimate {
    Eigen::VectorXd singular_values; ///< descending, all > tol_used * max
    Eigen::MatrixXd right_vectors;   ///< n x rank, orthonormal columns
    Eigen::VectorXd eigenvalues;     ///< singular_values squared
    std::size_t rank = 0;
    double tol_used = kDefaultRankTol;
    std::optional<Eigen::MatrixXd> left_vectors; ///< m x rank, only when requested
};

/// Number of entries strictly above tol * values[0]. Throws DomainError when
/// the input is not sorted descending or contains negative entries.
std::size_t numerical_rank(std::span<const double> singular_values, double tol);

/// Full dense SVD of Y truncated at numerical_rank. The estimates of X's
/// spectrum are Y's singular values and right singular vectors, unchanged.
SpectralEstimate sketched_svd(const Eigen::MatrixXd& Y, double tol = kDefaultRankTol, bool retain_left = false);

/// Negates each estimate column whose inner product with the matching
/// reference column is negative. A zero inner product leaves it as is.
Eigen::MatrixXd align_signs(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& estimate);

Eigen::VectorXd eigen_estimates(const SpectralEstimate& estimate);

/// {rank, tol_used, singular_values, eigenvalues, right_vectors (row-major nested)}.
Json to_json(const SpectralEstimate& estimate);

} // namespace sksv
