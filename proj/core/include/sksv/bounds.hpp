#pragma once

#include "sksv/jl_sketch.hpp"
#include "sksv/oracle.hpp"
#include "sksv/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sksv {

/// Absolute slack on every envelope comparison, absorbing rounding in the
/// evaluation of the envelope itself.
inline constexpr double kEnvelopeSlack = 1e-12;

/// ((1-eps)^{1/2}, (1+eps)^{1/2}): the admissible range of sigma'_j / sigma_j.
std::pair<double, double> value_envelope(double eps);

/// min over c in [-1, 1] of |sigma_i^2 - sigma_j^2 (1 + c eps)|, in closed form:
/// zero when sigma_i^2 lies in [sigma_j^2 (1-eps), sigma_j^2 (1+eps)], else
/// the distance to the nearer endpoint.
double min_over_c_denominator(double sigma_i, double sigma_j, double eps);

/// Upper bound on ||v_j - v'_j||_2 (j is 0-based):
///   min{ sqrt2, eps sqrt(1+eps)/sqrt(1-eps) * max_{i != j} sqrt2 sigma_i sigma_j / min_over_c(i, j) }.
/// A zero denominator makes the max infinite, so the bound collapses to sqrt2.
/// A single-value spectrum has an empty max and the bound is 0.
double vector_error_bound(std::span<const double> singular_values, double eps, std::size_t j);

/// Per index: 1 - eps <= lambda_est / lambda_true <= 1 + eps.
std::vector<bool> eigenvalue_envelope_check(std::span<const double> lambda_true, std::span<const double> lambda_est,
                                            double eps);

struct SpectrumGaps {
    std::vector<double> relative_gaps; ///< rho_j = min_{i != j} |lambda_i - lambda_j| / |lambda_j|
};

SpectrumGaps relative_gaps(std::span<const double> eigenvalues);

enum class RecordStatus {
    checked,        ///< both spectra have index j
    rank_mismatch,  ///< j is beyond the rank of the oracle or of the sketch
};

struct CertificateRecord {
    std::size_t j = 0; ///< 0-based index
    RecordStatus status = RecordStatus::checked;
    std::optional<double> sigma_true;
    std::optional<double> sigma_est;
    std::optional<double> ratio;
    double ratio_lo = 0.0;
    double ratio_hi = 0.0;
    bool value_pass = false;
    std::optional<double> vector_err;
    std::optional<double> vector_bound;
    bool vector_pass = false;

    bool passed() const noexcept { return value_pass && vector_pass; }
};

/// Per-index comparison of sketch estimates against the oracle and the
/// theoretical envelopes.
struct ErrorCertificate {
    std::vector<CertificateRecord> records;
    double eps = 0.0;
    std::size_t rank_true = 0;
    std::size_t rank_est = 0;
    bool singleton_spectrum = false; ///< k = 1: the vector bound is 0 by convention
    SpectrumGaps gaps;
    bool overall_pass = false;
};

/// Signs of the estimate are aligned to the oracle before vector errors are
/// measured. Indices past min(rank_true, rank_est) are rank-mismatch failures.
ErrorCertificate certify(const OracleDecomposition& oracle, const SpectralEstimate& estimate, double eps);

/// Reproducibility echo attached to serialized certificates.
struct CertificateEcho {
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::uint64_t trial_id = 0;
};

Json to_json(const ErrorCertificate& certificate, const CertificateEcho& echo);

} // namespace sksv
