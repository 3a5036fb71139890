#include "sksv/spectral.hpp"

#include "sksv/errors.hpp"

#include <Eigen/SVD>

namespace sksv {

std::size_t numerical_rank(std::span<const double> values, double tol) {
    if (!(tol >= 0.0)) {
        throw DomainError("rank tolerance must be nonnegative");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0)) {
            throw DomainError("singular values must be nonnegative");
        }
        if (i > 0 && values[i] > values[i - 1]) {
            throw DomainError("singular values must be sorted descending");
        }
    }
    if (values.empty() || values[0] == 0.0) {
        return 0;
    }
    const double cutoff = tol * values[0];
    std::size_t r = 0;
    while (r < values.size() && values[r] > cutoff) {
        ++r;
    }
    return r;
}

SpectralEstimate sketched_svd(const Eigen::MatrixXd& Y, double tol, bool retain_left) {
    if (!Y.allFinite()) {
        throw NumericalError("sketch contains non-finite entries");
    }
    if (!(tol >= 0.0)) {
        throw DomainError("rank tolerance must be nonnegative");
    }
    SpectralEstimate est;
    est.tol_used = tol;
    if (Y.size() == 0) {
        est.right_vectors.resize(Y.cols(), 0);
        if (retain_left) est.left_vectors = Eigen::MatrixXd(Y.rows(), 0);
        return est;
    }

    const Eigen::JacobiSVD<Eigen::MatrixXd, Eigen::ColPivHouseholderQRPreconditioner> svd(
        Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericalError("dense SVD of the sketch did not converge");
    }
    const Eigen::VectorXd& s = svd.singularValues();
    const auto r = numerical_rank(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), tol);
    const auto k = static_cast<Eigen::Index>(r);

    est.rank = r;
    est.singular_values = s.head(k);
    est.right_vectors = svd.matrixV().leftCols(k);
    est.eigenvalues = est.singular_values.array().square();
    if (retain_left) {
        est.left_vectors = svd.matrixU().leftCols(k);
    }
    return est;
}

Eigen::MatrixXd align_signs(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& estimate) {
    if (reference.rows() != estimate.rows() || reference.cols() != estimate.cols()) {
        throw DomainError("align_signs needs equally shaped matrices");
    }
    Eigen::MatrixXd out = estimate;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        if (reference.col(j).dot(out.col(j)) < 0.0) {
            out.col(j) = -out.col(j);
        }
    }
    return out;
}

Eigen::VectorXd eigen_estimates(const SpectralEstimate& estimate) {
    return estimate.singular_values.array().square();
}

Json to_json(const SpectralEstimate& e) {
    Json j;
    j["rank"] = e.rank;
    j["tol_used"] = e.tol_used;
    j["singular_values"] = Json::array();
    j["eigenvalues"] = Json::array();
    for (Eigen::Index i = 0; i < e.singular_values.size(); ++i) {
        j["singular_values"].push_back(e.singular_values[i]);
        j["eigenvalues"].push_back(e.eigenvalues[i]);
    }
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < e.right_vectors.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < e.right_vectors.cols(); ++c) {
            row.push_back(e.right_vectors(r, c));
        }
        rows.push_back(std::move(row));
    }
    j["right_vectors"] = std::move(rows);
    return j;
}

} // namespace sksv
