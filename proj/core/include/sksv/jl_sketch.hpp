#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace sksv {

using Json = nlohmann::ordered_json;

enum class JlKind {
    gaussian,    ///< iid N(0, 1/m)
    rademacher,  ///< iid +-1/sqrt(m)
    sparse_sign, ///< sqrt(s/m) * {+1, 0, -1} with probabilities {1/2s, 1 - 1/s, 1/2s}
    identity,    ///< Phi = I (m == N); a test override, not a random embedding
};

/// Distribution of the sketching operator. Every random family is scaled so
/// that E||Phi x||^2 = ||x||^2.
struct JlFamily {
    JlKind kind = JlKind::gaussian;
    std::uint32_t sparsity = 3; ///< only meaningful for sparse_sign

    static JlFamily gaussian() { return {JlKind::gaussian, 3}; }
    static JlFamily rademacher() { return {JlKind::rademacher, 3}; }
    static JlFamily sparse_sign(std::uint32_t s = 3) { return {JlKind::sparse_sign, s}; }
    static JlFamily identity() { return {JlKind::identity, 3}; }

    std::string_view name() const noexcept;
    static JlFamily from_name(std::string_view name, std::uint32_t s = 3);

    friend bool operator==(const JlFamily& a, const JlFamily& b) noexcept {
        return a.kind == b.kind && (a.kind != JlKind::sparse_sign || a.sparsity == b.sparsity);
    }
};

/// How the sketched matrix is addressed by the input stream.
enum class StreamLayout {
    matrix, ///< entry updates (row, col, delta) to an N x n matrix
    graph,  ///< edge updates (u, v, delta) to an incidence matrix with N = n(n-1)/2
};

/// Immutable description of the sketching operator and the accuracy target.
struct SketchConfig {
    std::uint64_t seed = 0;
    JlFamily family;
    std::size_t m = 1; ///< sketch rows
    std::size_t N = 1; ///< ambient rows of X
    std::size_t n = 1; ///< columns of X
    double eps = 0.5;
    double delta = 0.05;
    std::optional<std::size_t> k_hint;
    StreamLayout layout = StreamLayout::matrix;

    /// Throws DomainError describing the first violated constraint.
    void validate() const;

    friend bool operator==(const SketchConfig&, const SketchConfig&) = default;
};

/// Canonical JSON object with fixed field order:
/// {seed, family, s?, m, N, n, eps, delta, k_hint?, layout?}.
/// `s` is present only for sparse_sign, `layout` only for graph sketches.
Json to_json(const SketchConfig& config);
SketchConfig config_from_json(const Json& j);

/// The exponent f(eps) in the distributional JL tail 2 exp(-m f(eps)).
/// For the subgaussian families this is eps^2/4 - eps^3/6.
double concentration_exponent(const JlFamily& family, double eps);

using ExponentFn = std::function<double(double)>;

/// Smallest m with m >= (k ln(42/eps) + ln(2/delta)) / f(eps/sqrt(2)).
std::size_t required_measurements(std::size_t k, double eps, double delta, const JlFamily& family);
std::size_t required_measurements(std::size_t k, double eps, double delta, const ExponentFn& exponent);

/// Entry (row, col) of Phi. A pure function of (seed, family, m, row, col).
double phi_entry(const SketchConfig& config, std::uint64_t row, std::uint64_t col);

/// Column `col` of Phi written into `out` (size m).
void phi_column_into(const SketchConfig& config, std::uint64_t col, std::span<double> out);
Eigen::VectorXd phi_column(const SketchConfig& config, std::uint64_t col);

/// Upper bound on bytes a dense oracle-side materialization may allocate.
struct MemoryBudget {
    std::size_t max_bytes = std::size_t{512} << 20;

    /// Reads SKSV_BUDGET_MB when set, otherwise the default.
    static MemoryBudget from_env();
    void require(std::size_t rows, std::size_t cols, std::string_view what) const;
};

/// Dense m x N operator; throws ResourceError when over budget.
Eigen::MatrixXd materialize_phi(const SketchConfig& config, const MemoryBudget& budget = {});

} // namespace sksv
