#pragma once

#include "sksv/jl_sketch.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace sksv {

/// One turnstile stream item: X(row, col) += delta.
struct MatrixUpdate {
    std::uint64_t row = 0;
    std::uint64_t col = 0;
    double delta = 0.0;

    friend bool operator==(const MatrixUpdate&, const MatrixUpdate&) = default;
};

/// Live sketch Y = Phi X (m x n), maintained without storing Phi or X.
///
/// Y is column-major, so writers touching disjoint columns touch disjoint
/// memory and may run concurrently. Updates to the same column must be
/// serialized by the caller.
struct SketchState {
    SketchConfig config;
    Eigen::MatrixXd Y;
    std::uint64_t updates_applied = 0;
};

SketchState new_sketch(const SketchConfig& config);

/// Y.col(u.col) += u.delta * phi_column(u.row). Validation precedes mutation,
/// so a rejected update leaves the state untouched.
void apply_update(SketchState& state, const MatrixUpdate& u);

/// Applies the updates (row, j, deltas[j]) for j = 0..n-1 in column order,
/// generating phi_column(row) once. Equivalent to n calls to apply_update.
void apply_row(SketchState& state, std::uint64_t row, std::span<const double> deltas);

/// Applies a batch, fanning column groups out over `threads` workers. Updates
/// within one column keep their stream order, so the result is bit-identical
/// to applying the batch sequentially. All-or-nothing on validation failure.
void apply_updates(SketchState& state, std::span<const MatrixUpdate> updates, unsigned threads = 1);

/// Throws IncompatibleStateError unless the configs match exactly.
void require_compatible(const SketchState& a, const SketchState& b);

/// Y = a.Y + b.Y; counters add.
SketchState merge(SketchState a, const SketchState& b);

inline Eigen::MatrixXd snapshot(const SketchState& state) { return state.Y; }

// Persisted layout: "SKSV1\n", header JSON (the config fields followed by
// "updates_applied"), "\n", then m*n little-endian float64 in row-major order.
inline constexpr std::string_view kStateMagic = "SKSV1\n";

std::string serialize(const SketchState& state);
SketchState deserialize(std::string_view bytes);

SketchState load_state(const std::filesystem::path& path);

/// Write-temp-then-rename so an interrupted save never leaves a torn file.
void save_state_atomic(const SketchState& state, const std::filesystem::path& path);

/// 64-bit FNV-1a content hash.
std::uint64_t content_digest(std::string_view bytes) noexcept;

/// ||a - b||_F / ||b||_F, or ||a - b||_F when b is zero.
double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

} // namespace sksv
