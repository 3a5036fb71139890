#include "sksv/graph_stream.hpp"

#include "sksv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace sksv {

namespace {

void validate_edge(const EdgeUpdate& e, std::uint64_t n) {
    if (e.u >= n || e.v >= n) {
        throw DomainError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                          ") references a vertex outside [0, " + std::to_string(n) + ")");
    }
    if (e.u == e.v) {
        throw SelfLoopError("self-loop on vertex " + std::to_string(e.u));
    }
    if (!std::isfinite(e.delta)) {
        throw DomainError("edge delta must be finite");
    }
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

} // namespace

std::uint64_t edge_row_index(std::uint64_t u, std::uint64_t v, std::uint64_t n) {
    validate_edge({u, v, 0.0}, n);
    const auto [a, b] = std::minmax(u, v);
    return a * n - a * (a + 1) / 2 + (b - a - 1);
}

SketchConfig graph_config(std::uint64_t seed, JlFamily family, std::size_t vertices, std::size_t m, double eps,
                          double delta, std::optional<std::size_t> k_hint) {
    SketchConfig c;
    c.seed = seed;
    c.family = family;
    c.m = m;
    c.N = vertices * (vertices - 1) / 2;
    c.n = vertices;
    c.eps = eps;
    c.delta = delta;
    c.k_hint = k_hint;
    c.layout = StreamLayout::graph;
    c.validate();
    return c;
}

GraphSketch new_graph_sketch(const SketchConfig& config) {
    return as_graph_sketch(new_sketch(config));
}

GraphSketch as_graph_sketch(SketchState state) {
    if (state.config.layout != StreamLayout::graph) {
        throw DomainError("sketch state does not use the graph layout");
    }
    state.config.validate();
    GraphSketch g;
    g.vertices = state.config.n;
    g.inner = std::move(state);
    return g;
}

std::array<MatrixUpdate, 2> incidence_updates(const EdgeUpdate& e, std::size_t vertices) {
    const auto row = edge_row_index(e.u, e.v, vertices);
    const auto [a, b] = std::minmax(e.u, e.v);
    return {MatrixUpdate{row, a, e.delta}, MatrixUpdate{row, b, -e.delta}};
}

void apply_edge_update(GraphSketch& g, const EdgeUpdate& e) {
    validate_edge(e, g.vertices);
    const auto row = edge_row_index(e.u, e.v, g.vertices);
    const auto [a, b] = std::minmax(e.u, e.v);
    std::vector<double> phi(g.inner.config.m);
    phi_column_into(g.inner.config, row, phi);
    double* ya = g.inner.Y.col(static_cast<Eigen::Index>(a)).data();
    double* yb = g.inner.Y.col(static_cast<Eigen::Index>(b)).data();
    const double minus = -e.delta;
    for (std::size_t r = 0; r < phi.size(); ++r) {
        ya[r] += e.delta * phi[r];
        yb[r] += minus * phi[r];
    }
    ++g.inner.updates_applied;
}

SpectralEstimate graph_spectrum(const GraphSketch& g, double tol) {
    return sketched_svd(g.inner.Y, tol);
}

GraphOracle oracle_laplacian(std::span<const EdgeUpdate> log, std::size_t n, NegativeWeightPolicy policy,
                             const OracleBudget& budget) {
    if (n < 2) {
        throw DomainError("graph oracle needs at least two vertices");
    }
    const std::size_t N = n * (n - 1) / 2;
    budget.require(N, n, "materialized incidence matrix");

    GraphOracle o;
    const auto ni = static_cast<Eigen::Index>(n);
    o.adjacency = Eigen::MatrixXd::Zero(ni, ni);
    std::vector<MatrixUpdate> entries;
    entries.reserve(2 * log.size());
    for (const auto& e : log) {
        validate_edge(e, n);
        const auto [a, b] = std::minmax(e.u, e.v);
        o.adjacency(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += e.delta;
        for (const auto& u : incidence_updates(e, n)) {
            entries.push_back(u);
        }
    }

    DisjointSets sets(n);
    std::size_t components = n;
    for (Eigen::Index a = 0; a < ni; ++a) {
        for (Eigen::Index b = a + 1; b < ni; ++b) {
            const double w = o.adjacency(a, b);
            o.adjacency(b, a) = w;
            if (w < 0.0) {
                const std::string msg = "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                        ") has negative final weight " + std::to_string(w);
                if (policy == NegativeWeightPolicy::error) {
                    throw WellFormednessError(msg);
                }
                o.warnings.push_back(msg);
            }
            if (w != 0.0 && sets.unite(static_cast<std::size_t>(a), static_cast<std::size_t>(b))) {
                --components;
            }
        }
    }
    o.components = components;

    const Eigen::VectorXd degree = o.adjacency.rowwise().sum();
    o.laplacian = Eigen::MatrixXd(degree.asDiagonal()) - o.adjacency;
    o.incidence = materialize_X(entries, N, n, budget);
    o.incidence_gram = o.incidence.transpose() * o.incidence;
    o.weighted_discrepancy = (o.incidence_gram - o.laplacian).cwiseAbs().maxCoeff();
    if (o.weighted_discrepancy > 0.0) {
        o.warnings.push_back("X^T X differs from diag(d) - A by up to " + std::to_string(o.weighted_discrepancy) +
                             " (non-unit weights); certifying against X^T X");
    }
    return o;
}

} // namespace sksv
