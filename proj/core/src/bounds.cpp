#include "sksv/bounds.hpp"

#include "sksv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sksv {

namespace {

void require_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("eps must lie strictly inside (0, 1)");
    }
}

Json optional_number(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

} // namespace

std::pair<double, double> value_envelope(double eps) {
    require_eps(eps);
    return {std::sqrt(1.0 - eps), std::sqrt(1.0 + eps)};
}

double min_over_c_denominator(double sigma_i, double sigma_j, double eps) {
    require_eps(eps);
    if (!(sigma_i > 0.0) || !(sigma_j > 0.0)) {
        throw DomainError("singular values must be positive");
    }
    const double target = sigma_i * sigma_i;
    const double base = sigma_j * sigma_j;
    const double lo = base * (1.0 - eps);
    const double hi = base * (1.0 + eps);
    if (target >= lo && target <= hi) {
        return 0.0;
    }
    return std::min(std::abs(target - lo), std::abs(target - hi));
}

double vector_error_bound(std::span<const double> sigma, double eps, std::size_t j) {
    require_eps(eps);
    if (j >= sigma.size()) {
        throw DomainError("vector_error_bound index out of range");
    }
    if (sigma.size() == 1) {
        return 0.0;
    }
    const double cap = std::sqrt(2.0);
    const double prefactor = eps * std::sqrt(1.0 + eps) / std::sqrt(1.0 - eps);
    double worst = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (i == j) continue;
        const double denom = min_over_c_denominator(sigma[i], sigma[j], eps);
        if (denom == 0.0) {
            return cap;
        }
        worst = std::max(worst, cap * sigma[i] * sigma[j] / denom);
    }
    return std::min(cap, prefactor * worst);
}

std::vector<bool> eigenvalue_envelope_check(std::span<const double> lambda_true, std::span<const double> lambda_est,
                                            double eps) {
    require_eps(eps);
    if (lambda_true.size() != lambda_est.size()) {
        throw DomainError("eigenvalue lists differ in length");
    }
    std::vector<bool> pass(lambda_true.size());
    for (std::size_t j = 0; j < lambda_true.size(); ++j) {
        if (!(lambda_true[j] > 0.0)) {
            throw DomainError("true eigenvalues must be positive");
        }
        const double ratio = lambda_est[j] / lambda_true[j];
        pass[j] = ratio >= 1.0 - eps - kEnvelopeSlack && ratio <= 1.0 + eps + kEnvelopeSlack;
    }
    return pass;
}

SpectrumGaps relative_gaps(std::span<const double> lambda) {
    SpectrumGaps g;
    for (const double l : lambda) {
        if (!(l > 0.0)) {
            throw DomainError("relative gaps need positive eigenvalues");
        }
    }
    if (lambda.size() < 2) {
        return g;
    }
    g.relative_gaps.reserve(lambda.size());
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            if (i != j) gap = std::min(gap, std::abs(lambda[i] - lambda[j]));
        }
        g.relative_gaps.push_back(gap / std::abs(lambda[j]));
    }
    return g;
}

ErrorCertificate certify(const OracleDecomposition& oracle, const SpectralEstimate& estimate, double eps) {
    require_eps(eps);
    if (oracle.k == 0) {
        throw DomainError("certification needs an oracle of rank at least 1");
    }
    if (oracle.V.rows() != estimate.right_vectors.rows()) {
        throw DomainError("oracle and estimate have different column counts");
    }
    const auto [lo, hi] = value_envelope(eps);
    const std::size_t shared = std::min(oracle.k, estimate.rank);
    const auto shared_idx = static_cast<Eigen::Index>(shared);
    const Eigen::MatrixXd aligned =
        align_signs(oracle.V.leftCols(shared_idx), estimate.right_vectors.leftCols(shared_idx));
    const std::span<const double> sigma(oracle.sigma.data(), oracle.k);

    ErrorCertificate cert;
    cert.eps = eps;
    cert.rank_true = oracle.k;
    cert.rank_est = estimate.rank;
    cert.singleton_spectrum = oracle.k == 1;
    const Eigen::VectorXd lambda = oracle.eigenvalues();
    cert.gaps = relative_gaps(std::span<const double>(lambda.data(), oracle.k));

    const std::size_t total = std::max(oracle.k, estimate.rank);
    cert.records.reserve(total);
    for (std::size_t j = 0; j < total; ++j) {
        CertificateRecord rec;
        rec.j = j;
        rec.ratio_lo = lo;
        rec.ratio_hi = hi;
        const auto ji = static_cast<Eigen::Index>(j);
        if (j < oracle.k) rec.sigma_true = oracle.sigma[ji];
        if (j < estimate.rank) rec.sigma_est = estimate.singular_values[ji];
        if (j >= shared) {
            rec.status = RecordStatus::rank_mismatch;
            cert.records.push_back(rec);
            continue;
        }
        rec.ratio = *rec.sigma_est / *rec.sigma_true;
        rec.value_pass = *rec.ratio >= lo - kEnvelopeSlack && *rec.ratio <= hi + kEnvelopeSlack;
        rec.vector_err = (oracle.V.col(ji) - aligned.col(ji)).norm();
        rec.vector_bound = vector_error_bound(sigma, eps, j);
        rec.vector_pass = *rec.vector_err <= *rec.vector_bound + kEnvelopeSlack;
        cert.records.push_back(rec);
    }
    cert.overall_pass = std::all_of(cert.records.begin(), cert.records.end(),
                                    [](const CertificateRecord& r) { return r.passed(); });
    return cert;
}

Json to_json(const ErrorCertificate& c, const CertificateEcho& echo) {
    Json j;
    j["eps"] = c.eps;
    j["m"] = echo.m;
    j["seed"] = echo.seed;
    j["trial_id"] = echo.trial_id;
    j["rank_true"] = c.rank_true;
    j["rank_est"] = c.rank_est;
    j["singleton_spectrum"] = c.singleton_spectrum;
    j["overall_pass"] = c.overall_pass;
    j["relative_gaps"] = c.gaps.relative_gaps;
    Json records = Json::array();
    for (const auto& r : c.records) {
        Json rec;
        rec["j"] = r.j;
        rec["status"] = r.status == RecordStatus::checked ? "checked" : "rank_mismatch";
        rec["sigma_true"] = optional_number(r.sigma_true);
        rec["sigma_est"] = optional_number(r.sigma_est);
        rec["ratio"] = optional_number(r.ratio);
        rec["ratio_lo"] = r.ratio_lo;
        rec["ratio_hi"] = r.ratio_hi;
        rec["value_pass"] = r.value_pass;
        rec["vector_err"] = optional_number(r.vector_err);
        rec["vector_bound"] = optional_number(r.vector_bound);
        rec["vector_pass"] = r.vector_pass;
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    return j;
}

} // namespace sksv
