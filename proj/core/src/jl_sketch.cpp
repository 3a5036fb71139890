#include "sksv/jl_sketch.hpp"

#include "sksv/errors.hpp"
#include "sksv/philox.hpp"
#include "sksv/portable_math.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace sksv {

namespace {

void require_open_unit(double value, const char* name) {
    if (!(value > 0.0 && value < 1.0)) {
        throw DomainError(std::string(name) + " must lie strictly inside (0, 1), got " +
                          std::to_string(value));
    }
}

Philox4x32::Key key_of(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

Philox4x32::Counter counter_of(std::uint64_t row, std::uint64_t col, std::uint32_t attempt) {
    return {static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col),
            static_cast<std::uint32_t>(col >> 32), attempt};
}

// Marsaglia polar method; rejected pairs advance the last counter word.
double standard_normal(std::uint64_t row, std::uint64_t col, const Philox4x32::Key& key) {
    for (std::uint32_t attempt = 0;; ++attempt) {
        const auto r = Philox4x32::generate(counter_of(row, col, attempt), key);
        const double u = 2.0 * uniform53(r[0], r[1]) - 1.0;
        const double v = 2.0 * uniform53(r[2], r[3]) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * portable::log(s) / s);
        }
    }
}

struct EntryGenerator {
    JlKind kind;
    Philox4x32::Key key;
    double scale;     // 1/sqrt(m), or sqrt(s/m) for sparse_sign
    double threshold; // 1/(2s) for sparse_sign

    explicit EntryGenerator(const SketchConfig& c)
        : kind(c.family.kind), key(key_of(c.seed)), scale(1.0 / std::sqrt(static_cast<double>(c.m))),
          threshold(0.0) {
        if (kind == JlKind::sparse_sign) {
            const double s = static_cast<double>(c.family.sparsity);
            scale = std::sqrt(s / static_cast<double>(c.m));
            threshold = 1.0 / (2.0 * s);
        }
    }

    double operator()(std::uint64_t row, std::uint64_t col) const {
        switch (kind) {
        case JlKind::gaussian:
            return scale * standard_normal(row, col, key);
        case JlKind::rademacher: {
            const auto r = Philox4x32::generate(counter_of(row, col, 0), key);
            return (r[0] & 1u) ? scale : -scale;
        }
        case JlKind::sparse_sign: {
            const auto r = Philox4x32::generate(counter_of(row, col, 0), key);
            const double u = uniform53(r[0], r[1]);
            if (u < threshold) return scale;
            if (u < 2.0 * threshold) return -scale;
            return 0.0;
        }
        case JlKind::identity:
            return row == col ? 1.0 : 0.0;
        }
        return 0.0;
    }
};

} // namespace

std::string_view JlFamily::name() const noexcept {
    switch (kind) {
    case JlKind::gaussian: return "gaussian";
    case JlKind::rademacher: return "rademacher";
    case JlKind::sparse_sign: return "sparse_sign";
    case JlKind::identity: return "identity";
    }
    return "unknown";
}

JlFamily JlFamily::from_name(std::string_view name, std::uint32_t s) {
    if (name == "gaussian") return gaussian();
    if (name == "rademacher") return rademacher();
    if (name == "sparse_sign") return sparse_sign(s);
    if (name == "identity") return identity();
    throw DomainError("unknown sketch family '" + std::string(name) + "'");
}

void SketchConfig::validate() const {
    if (m == 0 || N == 0 || n == 0) {
        throw DomainError("sketch dimensions m, N, n must all be positive");
    }
    if (m > std::numeric_limits<std::uint32_t>::max()) {
        throw DomainError("sketch row count m must fit in 32 bits");
    }
    require_open_unit(eps, "eps");
    require_open_unit(delta, "delta");
    if (k_hint && (*k_hint == 0 || *k_hint > n)) {
        throw DomainError("k_hint must lie in [1, n]");
    }
    if (family.kind == JlKind::sparse_sign && family.sparsity == 0) {
        throw DomainError("sparse_sign sparsity s must be positive");
    }
    if (family.kind == JlKind::identity && m != N) {
        throw DomainError("identity sketch requires m == N");
    }
    if (layout == StreamLayout::graph) {
        if (n < 2) {
            throw DomainError("graph sketch needs at least two vertices");
        }
        if (N != n * (n - 1) / 2) {
            throw DomainError("graph sketch requires N == n(n-1)/2");
        }
    }
}

Json to_json(const SketchConfig& c) {
    Json j;
    j["seed"] = c.seed;
    j["family"] = std::string(c.family.name());
    if (c.family.kind == JlKind::sparse_sign) {
        j["s"] = c.family.sparsity;
    }
    j["m"] = c.m;
    j["N"] = c.N;
    j["n"] = c.n;
    j["eps"] = c.eps;
    j["delta"] = c.delta;
    if (c.k_hint) {
        j["k_hint"] = *c.k_hint;
    }
    if (c.layout == StreamLayout::graph) {
        j["layout"] = "graph";
    }
    return j;
}

SketchConfig config_from_json(const Json& j) {
    SketchConfig c;
    try {
        c.seed = j.at("seed").get<std::uint64_t>();
        const auto s = j.contains("s") ? j.at("s").get<std::uint32_t>() : 3u;
        c.family = JlFamily::from_name(j.at("family").get<std::string>(), s);
        c.m = j.at("m").get<std::size_t>();
        c.N = j.at("N").get<std::size_t>();
        c.n = j.at("n").get<std::size_t>();
        c.eps = j.at("eps").get<double>();
        c.delta = j.at("delta").get<double>();
        if (j.contains("k_hint")) {
            c.k_hint = j.at("k_hint").get<std::size_t>();
        }
        if (j.contains("layout")) {
            const auto layout = j.at("layout").get<std::string>();
            if (layout == "graph") {
                c.layout = StreamLayout::graph;
            } else if (layout != "matrix") {
                throw DomainError("unknown layout '" + layout + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed sketch config: ") + e.what());
    }
    c.validate();
    return c;
}

double concentration_exponent(const JlFamily& family, double eps) {
    require_open_unit(eps, "eps");
    switch (family.kind) {
    case JlKind::gaussian:
    case JlKind::rademacher:
    case JlKind::sparse_sign:
        return eps * eps / 4.0 - eps * eps * eps / 6.0;
    case JlKind::identity:
        break;
    }
    throw DomainError("the identity operator has no concentration exponent");
}

std::size_t required_measurements(std::size_t k, double eps, double delta, const ExponentFn& exponent) {
    if (k == 0) {
        throw DomainError("k must be at least 1");
    }
    require_open_unit(eps, "eps");
    require_open_unit(delta, "delta");
    const double f = exponent(eps / std::sqrt(2.0));
    if (!(f > 0.0) || !std::isfinite(f)) {
        throw DomainError("concentration exponent must be positive and finite");
    }
    const double numerator = static_cast<double>(k) * std::log(42.0 / eps) + std::log(2.0 / delta);
    return static_cast<std::size_t>(std::ceil(numerator / f));
}

std::size_t required_measurements(std::size_t k, double eps, double delta, const JlFamily& family) {
    return required_measurements(k, eps, delta, [&family](double e) { return concentration_exponent(family, e); });
}

double phi_entry(const SketchConfig& config, std::uint64_t row, std::uint64_t col) {
    if (row >= config.m || col >= config.N) {
        throw DomainError("phi entry index out of range");
    }
    return EntryGenerator(config)(row, col);
}

void phi_column_into(const SketchConfig& config, std::uint64_t col, std::span<double> out) {
    if (col >= config.N) {
        throw DomainError("phi column index " + std::to_string(col) + " out of range [0, " +
                          std::to_string(config.N) + ")");
    }
    if (out.size() != config.m) {
        throw DomainError("phi column buffer must have m entries");
    }
    const EntryGenerator gen(config);
    for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] = gen(r, col);
    }
}

Eigen::VectorXd phi_column(const SketchConfig& config, std::uint64_t col) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(config.m));
    phi_column_into(config, col, std::span<double>(v.data(), config.m));
    return v;
}

MemoryBudget MemoryBudget::from_env() {
    MemoryBudget b;
    if (const char* mb = std::getenv("SKSV_BUDGET_MB"); mb != nullptr && *mb != '\0') {
        char* end = nullptr;
        const unsigned long long value = std::strtoull(mb, &end, 10);
        if (end == mb || *end != '\0') {
            throw DomainError("SKSV_BUDGET_MB must be a nonnegative integer");
        }
        b.max_bytes = static_cast<std::size_t>(value) << 20;
    }
    return b;
}

void MemoryBudget::require(std::size_t rows, std::size_t cols, std::string_view what) const {
    const std::size_t limit_entries = max_bytes / sizeof(double);
    if (cols != 0 && rows > limit_entries / cols) {
        throw ResourceError(std::string(what) + " of " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " doubles exceeds the budget of " + std::to_string(max_bytes >> 20) +
                            " MB (raise SKSV_BUDGET_MB to allow it)");
    }
}

Eigen::MatrixXd materialize_phi(const SketchConfig& config, const MemoryBudget& budget) {
    config.validate();
    budget.require(config.m, config.N, "materialized sketching operator");
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(config.m), static_cast<Eigen::Index>(config.N));
    for (std::size_t c = 0; c < config.N; ++c) {
        phi_column_into(config, c, std::span<double>(phi.col(static_cast<Eigen::Index>(c)).data(), config.m));
    }
    return phi;
}

} // namespace sksv
