#include "sksv/turnstile.hpp"

#include "sksv/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <thread>
#include <vector>

namespace sksv {

namespace {

void validate_update(const SketchConfig& c, const MatrixUpdate& u) {
    if (u.row >= c.N) {
        throw DomainError("update row " + std::to_string(u.row) + " out of range [0, " + std::to_string(c.N) + ")");
    }
    if (u.col >= c.n) {
        throw DomainError("update col " + std::to_string(u.col) + " out of range [0, " + std::to_string(c.n) + ")");
    }
    if (!std::isfinite(u.delta)) {
        throw DomainError("update delta must be finite");
    }
}

void axpy_column(Eigen::MatrixXd& Y, std::uint64_t col, double delta, std::span<const double> phi) {
    double* y = Y.col(static_cast<Eigen::Index>(col)).data();
    for (std::size_t r = 0; r < phi.size(); ++r) {
        y[r] += delta * phi[r];
    }
}

void put_le64(std::string& out, double value) {
    auto bits = std::bit_cast<std::uint64_t>(value);
    for (int b = 0; b < 8; ++b) {
        out.push_back(static_cast<char>(bits & 0xFFu));
        bits >>= 8;
    }
}

double get_le64(const char* p) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) {
        bits = (bits << 8) | static_cast<unsigned char>(p[b]);
    }
    return std::bit_cast<double>(bits);
}

} // namespace

SketchState new_sketch(const SketchConfig& config) {
    config.validate();
    SketchState s;
    s.config = config;
    s.Y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(config.m), static_cast<Eigen::Index>(config.n));
    return s;
}

void apply_update(SketchState& state, const MatrixUpdate& u) {
    validate_update(state.config, u);
    std::vector<double> phi(state.config.m);
    phi_column_into(state.config, u.row, phi);
    axpy_column(state.Y, u.col, u.delta, phi);
    ++state.updates_applied;
}

void apply_row(SketchState& state, std::uint64_t row, std::span<const double> deltas) {
    if (deltas.size() != state.config.n) {
        throw DomainError("row update must carry one delta per column");
    }
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        validate_update(state.config, {row, j, deltas[j]});
    }
    std::vector<double> phi(state.config.m);
    phi_column_into(state.config, row, phi);
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        axpy_column(state.Y, j, deltas[j], phi);
    }
    state.updates_applied += deltas.size();
}

void apply_updates(SketchState& state, std::span<const MatrixUpdate> updates, unsigned threads) {
    for (const auto& u : updates) {
        validate_update(state.config, u);
    }
    threads = std::max(1u, threads);
    // Worker w owns the columns with col % threads == w.
    auto work = [&](unsigned w) {
        std::vector<double> phi(state.config.m);
        for (const auto& u : updates) {
            if (u.col % threads != w) continue;
            phi_column_into(state.config, u.row, phi);
            axpy_column(state.Y, u.col, u.delta, phi);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(work, w);
        }
    }
    state.updates_applied += updates.size();
}

void require_compatible(const SketchState& a, const SketchState& b) {
    if (!(a.config == b.config)) {
        throw IncompatibleStateError("sketch configs differ: " + to_json(a.config).dump() + " vs " +
                                     to_json(b.config).dump());
    }
}

SketchState merge(SketchState a, const SketchState& b) {
    require_compatible(a, b);
    a.Y += b.Y;
    a.updates_applied += b.updates_applied;
    return a;
}

std::string serialize(const SketchState& state) {
    Json header = to_json(state.config);
    header["updates_applied"] = state.updates_applied;
    std::string out(kStateMagic);
    out += header.dump();
    out.push_back('\n');
    out.reserve(out.size() + 8 * static_cast<std::size_t>(state.Y.size()));
    for (Eigen::Index r = 0; r < state.Y.rows(); ++r) {
        for (Eigen::Index c = 0; c < state.Y.cols(); ++c) {
            put_le64(out, state.Y(r, c));
        }
    }
    return out;
}

SketchState deserialize(std::string_view bytes) {
    if (!bytes.starts_with(kStateMagic)) {
        throw FormatError("not a sketch-state file (bad magic)");
    }
    bytes.remove_prefix(kStateMagic.size());
    const auto eol = bytes.find('\n');
    if (eol == std::string_view::npos) {
        throw FormatError("sketch-state header is not terminated");
    }
    Json header;
    try {
        header = Json::parse(bytes.substr(0, eol));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("sketch-state header is not valid JSON: ") + e.what());
    }
    SketchState s;
    try {
        s = new_sketch(config_from_json(header));
        s.updates_applied = header.at("updates_applied").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("sketch-state header: ") + e.what());
    } catch (const DomainError& e) {
        throw FormatError(std::string("sketch-state header: ") + e.what());
    }
    bytes.remove_prefix(eol + 1);
    const std::size_t expected = 8 * s.config.m * s.config.n;
    if (bytes.size() != expected) {
        throw FormatError("sketch-state payload has " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(expected));
    }
    const char* p = bytes.data();
    for (Eigen::Index r = 0; r < s.Y.rows(); ++r) {
        for (Eigen::Index c = 0; c < s.Y.cols(); ++c, p += 8) {
            s.Y(r, c) = get_le64(p);
        }
    }
    return s;
}

SketchState load_state(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open sketch-state file " + path.string());
    }
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

void save_state_atomic(const SketchState& state, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw FormatError("cannot write " + tmp.string());
        }
        const std::string bytes = serialize(state);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            throw FormatError("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::uint64_t content_digest(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char ch : bytes) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ull;
    }
    return h;
}

double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double diff = (a - b).norm();
    const double base = b.norm();
    return base > 0.0 ? diff / base : diff;
}

} // namespace sksv
