#pragma once

#include "sksv/jl_sketch.hpp"
#include "sksv/oracle.hpp"
#include "sksv/spectral.hpp"
#include "sksv/turnstile.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sksv {

/// Weight change Delta on the undirected edge {u, v}.
struct EdgeUpdate {
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    double delta = 0.0;

    friend bool operator==(const EdgeUpdate&, const EdgeUpdate&) = default;
};

/// Row of the incidence matrix for {u, v}: pairs (a, b), a < b, enumerated
/// lexicographically, i.e. a*n - a(a+1)/2 + (b - a - 1).
std::uint64_t edge_row_index(std::uint64_t u, std::uint64_t v, std::uint64_t n);

/// Sketch of the implicit C(n,2) x n incidence matrix of a dynamic graph.
struct GraphSketch {
    std::size_t vertices = 0;
    SketchState inner;
};

/// Config for a graph sketch over `vertices` vertices (N = n(n-1)/2).
SketchConfig graph_config(std::uint64_t seed, JlFamily family, std::size_t vertices, std::size_t m, double eps,
                          double delta, std::optional<std::size_t> k_hint = std::nullopt);

GraphSketch new_graph_sketch(const SketchConfig& config);

/// Wraps an existing graph-layout state. Throws DomainError otherwise.
GraphSketch as_graph_sketch(SketchState state);

/// The two incidence-matrix entry updates one edge update stands for: with
/// (a, b) the endpoints in increasing order, column a gets +delta and
/// column b gets -delta in row edge_row_index(a, b).
std::array<MatrixUpdate, 2> incidence_updates(const EdgeUpdate& e, std::size_t vertices);

/// y_a += delta phi_r, y_b -= delta phi_r with one generated column.
/// Counts as a single applied update.
void apply_edge_update(GraphSketch& g, const EdgeUpdate& e);

/// Laplacian spectrum estimate: eigenvalues are the lambda' estimates,
/// right vectors the eigenvector estimates.
SpectralEstimate graph_spectrum(const GraphSketch& g, double tol = kDefaultRankTol);

enum class NegativeWeightPolicy { error, warn };

/// Dense ground truth for a graph stream.
struct GraphOracle {
    Eigen::MatrixXd adjacency;      ///< accumulated A(j, k), symmetric
    Eigen::MatrixXd laplacian;      ///< diag(d) - A
    Eigen::MatrixXd incidence;      ///< X built with the literal +-delta update rule
    Eigen::MatrixXd incidence_gram; ///< X^T X; equals the Laplacian for unit weights
    std::size_t components = 0;     ///< over edges with nonzero final weight
    double weighted_discrepancy = 0.0; ///< max |X^T X - (diag(d) - A)|
    std::vector<std::string> warnings;
};

GraphOracle oracle_laplacian(std::span<const EdgeUpdate> log, std::size_t vertices,
                             NegativeWeightPolicy policy = NegativeWeightPolicy::error,
                             const OracleBudget& budget = {});

} // namespace sksv
