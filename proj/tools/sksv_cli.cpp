#include "sksv_cli.hpp"

#include "sksv/sksv.hpp"

#include <CLI11.hpp>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sksv::cli {

namespace {

namespace fs = std::filesystem;

/// Flags that parse but do not make sense together.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string hex_digest(std::uint64_t d) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
    return buf;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// One per command, emitted exactly once whether the command succeeds or not.
class Manifest {
public:
    explicit Manifest(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

    void config(const SketchConfig& c) { config_ = to_json(c); }
    void input(const std::string& path, std::string_view bytes) {
        inputs_.push_back({{"path", path}, {"digest", hex_digest(content_digest(bytes))}});
    }
    void output(const std::string& path) { outputs_.push_back(path); }
    Json& extra() { return extra_; }

    Json finish(int exit_code) const {
        Json j;
        j["command"] = command_;
        j["config"] = config_;
        j["inputs"] = inputs_;
        j["outputs"] = outputs_;
        for (auto it = extra_.begin(); it != extra_.end(); ++it) {
            j[it.key()] = it.value();
        }
        j["exit_code"] = exit_code;
        j["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        return j;
    }

private:
    std::string command_;
    Json config_ = nullptr;
    Json inputs_ = Json::array();
    Json outputs_ = Json::array();
    Json extra_ = Json::object();
    std::chrono::steady_clock::time_point start_;
};

/// Advisory exclusive lock on "<state>.lock" for the lifetime of the object.
class StateLock {
public:
    explicit StateLock(const fs::path& state) {
        auto lock_path = state;
        lock_path += ".lock";
        fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0) {
            throw FormatError("cannot open lock file " + lock_path.string());
        }
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw FormatError("cannot lock " + lock_path.string());
        }
    }
    ~StateLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    StateLock(const StateLock&) = delete;
    StateLock& operator=(const StateLock&) = delete;

private:
    int fd_ = -1;
};

void write_report(const Json& report, const std::string& out_path, std::ostream& out, Manifest& manifest) {
    const std::string text = report.dump(2) + "\n";
    if (out_path.empty() || out_path == "-") {
        out << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw FormatError("cannot write report to " + out_path);
    }
    file << text;
    manifest.output(out_path);
}

// ---------------------------------------------------------------------------

struct InitOptions {
    std::string out = "sketch.sksv";
    std::string mode = "matrix";
    std::optional<std::size_t> rows, cols, vertices, k, m;
    double eps = 0.5;
    double delta = 0.05;
    std::optional<std::uint64_t> seed;
    std::string family = "gaussian";
    std::uint32_t sparsity = 3;
    std::string phi;
    bool unsafe_test_mode = false;
    bool force = false;
};

int cmd_init(const InitOptions& o, std::ostream& out, Manifest& manifest) {
    SketchConfig c;
    c.seed = *o.seed;
    c.eps = o.eps;
    c.delta = o.delta;
    c.family = JlFamily::from_name(o.family, o.sparsity);
    if (!o.phi.empty()) {
        if (o.phi != "identity") {
            throw UsageError("--phi only accepts 'identity'");
        }
        if (!o.unsafe_test_mode) {
            throw UsageError("--phi identity requires --unsafe-test-mode");
        }
        c.family = JlFamily::identity();
    }
    if (o.mode == "graph") {
        if (o.rows || o.cols) {
            throw UsageError("graph mode takes --vertices, not --rows/--cols");
        }
        if (!o.vertices) {
            throw UsageError("graph mode requires --vertices");
        }
        c.layout = StreamLayout::graph;
        c.n = *o.vertices;
        c.N = c.n * (c.n - 1) / 2;
    } else if (o.mode == "matrix") {
        if (o.vertices) {
            throw UsageError("matrix mode takes --rows/--cols, not --vertices");
        }
        if (!o.rows || !o.cols) {
            throw UsageError("matrix mode requires --rows and --cols");
        }
        c.N = *o.rows;
        c.n = *o.cols;
    } else {
        throw UsageError("--mode must be 'matrix' or 'graph'");
    }
    c.k_hint = o.k;
    if (o.m) {
        c.m = *o.m;
    } else if (c.family.kind == JlKind::identity) {
        c.m = c.N;
    } else {
        // Without a rank estimate, k = n covers any matrix with N >= n.
        c.m = required_measurements(o.k.value_or(c.n), c.eps, c.delta, c.family);
    }
    c.validate();
    manifest.config(c);

    if (fs::exists(o.out) && !o.force) {
        throw UsageError(o.out + " already exists (pass --force to overwrite)");
    }
    save_state_atomic(new_sketch(c), o.out);
    manifest.output(o.out);
    manifest.extra()["m"] = c.m;
    out << to_json(c).dump() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct UpdateOptions {
    std::string state;
    std::string input = "-";
    std::string on_error = "abort";
};

int cmd_update(const UpdateOptions& o, std::istream& in, std::ostream& err, Manifest& manifest) {
    if (o.on_error != "abort" && o.on_error != "skip") {
        throw UsageError("--on-error must be 'abort' or 'skip'");
    }
    const StateLock lock(o.state);
    const std::string state_bytes = read_file(o.state);
    manifest.input(o.state, state_bytes);
    SketchState state = deserialize(state_bytes);
    manifest.config(state.config);

    std::string stream;
    if (o.input == "-") {
        stream.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    } else {
        stream = read_file(o.input);
    }
    manifest.input(o.input == "-" ? "<stdin>" : o.input, stream);

    const bool graph = state.config.layout == StreamLayout::graph;
    std::optional<GraphSketch> g;
    if (graph) g = as_graph_sketch(std::move(state));

    std::uint64_t applied = 0;
    std::uint64_t rejected = 0;
    std::istringstream lines(stream);
    std::optional<std::string> abort_reason;
    for_each_record(lines, [&](std::size_t line_no, std::string_view line) {
        if (abort_reason) return;
        try {
            if (graph) {
                apply_edge_update(*g, parse_edge_update(line));
            } else {
                apply_update(state, parse_matrix_update(line));
            }
            ++applied;
        } catch (const std::exception& e) {
            if (dynamic_cast<const FormatError*>(&e) == nullptr && dynamic_cast<const DomainError*>(&e) == nullptr) {
                throw;
            }
            ++rejected;
            if (o.on_error == "abort") {
                abort_reason = "line " + std::to_string(line_no) + ": " + e.what();
            }
        }
    });
    manifest.extra()["applied"] = applied;
    manifest.extra()["rejected"] = rejected;
    if (abort_reason) {
        err << "sksv update: " << *abort_reason << " (state left unchanged)\n";
        return kExitIngestion;
    }
    if (graph) state = std::move(g->inner);
    manifest.extra()["updates_applied"] = state.updates_applied;
    if (applied > 0) {
        save_state_atomic(state, o.state);
        manifest.output(o.state);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct SpectrumOptions {
    std::string state;
    double tol = kDefaultRankTol;
    std::string out;
    std::string log;
};

int cmd_spectrum(const SpectrumOptions& o, std::ostream& out, Manifest& manifest) {
    const std::string bytes = read_file(o.state);
    manifest.input(o.state, bytes);
    const SketchState state = deserialize(bytes);
    manifest.config(state.config);

    const SpectralEstimate est = sketched_svd(state.Y, o.tol);
    Json report = to_json(est);
    report["n"] = state.config.n;
    report["k_detected"] = est.rank;
    Json warnings = Json::array();
    if (state.config.k_hint) {
        report["k_hint"] = *state.config.k_hint;
        if (*state.config.k_hint != est.rank) {
            warnings.push_back("detected rank " + std::to_string(est.rank) + " differs from k_hint " +
                               std::to_string(*state.config.k_hint));
        }
    }
    if (!o.log.empty()) {
        if (state.config.layout != StreamLayout::graph) {
            throw UsageError("--log on spectrum is only meaningful for graph sketches");
        }
        const std::string log_bytes = read_file(o.log);
        manifest.input(o.log, log_bytes);
        const auto oracle = oracle_laplacian(read_edge_log(o.log), state.config.n, NegativeWeightPolicy::warn,
                                             OracleBudget{});
        report["c_oracle"] = oracle.components;
    }
    report["warnings"] = warnings;
    write_report(report, o.out, out, manifest);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct OracleInputs {
    OracleDecomposition decomposition;
    std::optional<GraphOracle> graph;
};

OracleInputs build_oracle(const SketchState& state, const std::string& log_path, double tol, bool allow_negative,
                          Manifest& manifest) {
    const std::string log_bytes = read_file(log_path);
    manifest.input(log_path, log_bytes);
    const OracleBudget budget;
    OracleInputs result;
    if (state.config.layout == StreamLayout::graph) {
        result.graph = oracle_laplacian(read_edge_log(log_path), state.config.n,
                                        allow_negative ? NegativeWeightPolicy::warn : NegativeWeightPolicy::error,
                                        budget);
        result.decomposition = exact_svd(result.graph->incidence, tol, budget);
    } else {
        const auto log = read_matrix_log(log_path);
        result.decomposition = exact_svd(materialize_X(log, state.config.N, state.config.n, budget), tol, budget);
    }
    return result;
}

Json graph_details(const GraphOracle& g) {
    Json j;
    j["c_oracle"] = g.components;
    j["weighted_discrepancy"] = g.weighted_discrepancy;
    j["laplacian_eigenvalues"] = Json::array();
    for (const double v : symmetric_eigenvalues_desc(g.laplacian)) {
        j["laplacian_eigenvalues"].push_back(v);
    }
    j["warnings"] = g.warnings;
    return j;
}

struct CertifyOptions {
    std::string state;
    std::string log;
    std::optional<double> eps;
    double tol = kDefaultRankTol;
    std::uint64_t trial_id = 0;
    std::string out;
    bool allow_negative = false;
    bool skip_full_delta = false;
};

int cmd_certify(const CertifyOptions& o, std::ostream& out, Manifest& manifest) {
    const std::string bytes = read_file(o.state);
    manifest.input(o.state, bytes);
    const SketchState state = deserialize(bytes);
    manifest.config(state.config);
    const double eps = o.eps.value_or(state.config.eps);

    const OracleInputs oracle = build_oracle(state, o.log, o.tol, o.allow_negative, manifest);
    if (oracle.decomposition.k == 0) {
        throw FormatError("the update log defines a zero matrix; nothing to certify");
    }
    const SpectralEstimate est = sketched_svd(state.Y, o.tol);
    const ErrorCertificate cert = certify(oracle.decomposition, est, eps);

    const Eigen::MatrixXd phi = materialize_phi(state.config, OracleBudget{}.memory);
    const PerturbationDiagnostics diag =
        perturbation_diagnostics(phi, oracle.decomposition, state.Y, {.full_delta_norm = !o.skip_full_delta});
    const bool weyl = weyl_check(oracle.decomposition, diag, est);
    const bool embedding = subspace_embedding_check(phi, oracle.decomposition, eps);
    const double residual = relative_frobenius(state.Y, phi * oracle.decomposition.X);

    Json report = to_json(cert, CertificateEcho{state.config.m, state.config.seed, o.trial_id});
    report["weyl_pass"] = weyl;
    Json d;
    d["delta_phi_norm"] = o.skip_full_delta ? Json(nullptr) : Json(diag.delta_phi_norm);
    d["projected_norm"] = diag.projected_norm;
    d["E_norm"] = diag.E_norm;
    d["subspace_embedding_pass"] = embedding;
    report["diagnostics"] = d;
    report["replay_residual"] = residual;
    Json warnings = Json::array();
    if (residual > 1e-10) {
        warnings.push_back("sketch differs from Phi * X(log) by relative residual " + std::to_string(residual) +
                           "; the log may not be the stream that built this state");
    }
    if (state.config.k_hint && *state.config.k_hint != est.rank) {
        warnings.push_back("detected rank " + std::to_string(est.rank) + " differs from k_hint " +
                           std::to_string(*state.config.k_hint));
    }
    if (oracle.graph) {
        report["graph"] = graph_details(*oracle.graph);
    }
    report["warnings"] = warnings;
    write_report(report, o.out, out, manifest);
    manifest.extra()["overall_pass"] = cert.overall_pass;
    return cert.overall_pass ? kExitOk : kExitCertifyFailed;
}

// ---------------------------------------------------------------------------

struct MergeOptions {
    std::string a, b, out;
};

int cmd_merge(const MergeOptions& o, Manifest& manifest) {
    const std::optional<StateLock> lock_out = o.out == o.a ? std::nullopt : std::optional<StateLock>(std::in_place, o.out);
    const StateLock lock_a(o.a);
    const std::string a_bytes = read_file(o.a);
    const std::string b_bytes = read_file(o.b);
    manifest.input(o.a, a_bytes);
    manifest.input(o.b, b_bytes);
    SketchState a = deserialize(a_bytes);
    manifest.config(a.config);
    const SketchState merged = merge(std::move(a), deserialize(b_bytes));
    save_state_atomic(merged, o.out);
    manifest.output(o.out);
    manifest.extra()["updates_applied"] = merged.updates_applied;
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct OracleOptions {
    std::string state;
    std::string log;
    double tol = kDefaultRankTol;
    std::string out;
    bool allow_negative = false;
};

int cmd_oracle(const OracleOptions& o, std::ostream& out, Manifest& manifest) {
    const std::string bytes = read_file(o.state);
    manifest.input(o.state, bytes);
    const SketchState state = deserialize(bytes);
    manifest.config(state.config);
    const OracleInputs oracle = build_oracle(state, o.log, o.tol, o.allow_negative, manifest);
    Json report = to_json(oracle.decomposition);
    report["N"] = state.config.N;
    report["n"] = state.config.n;
    if (oracle.graph) {
        report["graph"] = graph_details(*oracle.graph);
    }
    write_report(report, o.out, out, manifest);
    return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Streaming sketched SVD: maintain Y = Phi X under turnstile updates, estimate its spectrum, "
                 "and certify the estimate against a dense oracle",
                 "sksv"};
    app.require_subcommand(1);
    std::string manifest_path;
    app.add_option("--manifest", manifest_path, "Write the run manifest here instead of standard error");

    InitOptions init;
    auto* init_cmd = app.add_subcommand("init", "Create an empty sketch-state file");
    init_cmd->add_option("-o,--out", init.out, "State file to create")->capture_default_str();
    init_cmd->add_option("--mode", init.mode, "matrix | graph")->capture_default_str();
    init_cmd->add_option("--rows", init.rows, "Rows N of the data matrix (matrix mode)");
    init_cmd->add_option("--cols", init.cols, "Columns n of the data matrix (matrix mode)");
    init_cmd->add_option("--vertices", init.vertices, "Vertex count (graph mode)");
    init_cmd->add_option("--k", init.k, "Target rank; sizes m and is recorded as k_hint");
    init_cmd->add_option("--m", init.m, "Sketch rows; computed from k, eps, delta when omitted");
    init_cmd->add_option("--eps", init.eps, "Distortion eps in (0,1)")->capture_default_str();
    init_cmd->add_option("--delta", init.delta, "Failure probability delta in (0,1)")->capture_default_str();
    init_cmd->add_option("--seed", init.seed, "64-bit seed of the sketching operator")->required();
    init_cmd->add_option("--family", init.family, "gaussian | rademacher | sparse_sign")->capture_default_str();
    init_cmd->add_option("--s", init.sparsity, "Sparsity parameter of sparse_sign")->capture_default_str();
    init_cmd->add_option("--phi", init.phi, "Operator override (only 'identity'; test use)");
    init_cmd->add_flag("--unsafe-test-mode", init.unsafe_test_mode, "Allow test-only operator overrides");
    init_cmd->add_flag("--force", init.force, "Overwrite an existing state file");

    UpdateOptions update;
    auto* update_cmd = app.add_subcommand("update", "Apply a JSON Lines update stream to a state file");
    update_cmd->add_option("state", update.state, "Sketch-state file")->required();
    update_cmd->add_option("-i,--input", update.input, "JSON Lines stream, '-' for standard input")->capture_default_str();
    update_cmd->add_option("--on-error", update.on_error, "abort | skip")->capture_default_str();

    SpectrumOptions spectrum;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Estimate singular values and right singular vectors");
    spectrum_cmd->add_option("state", spectrum.state, "Sketch-state file")->required();
    spectrum_cmd->add_option("--tol", spectrum.tol, "Relative rank tolerance")->capture_default_str();
    spectrum_cmd->add_option("-o,--out", spectrum.out, "Report path (default: standard output)");
    spectrum_cmd->add_option("--log", spectrum.log, "Edge log; adds the oracle component count (graph sketches)");

    CertifyOptions cert;
    auto* certify_cmd = app.add_subcommand("certify", "Certify the sketch estimate against a dense oracle");
    certify_cmd->add_option("state", cert.state, "Sketch-state file")->required();
    certify_cmd->add_option("--log", cert.log, "Update log that built the state")->required();
    certify_cmd->add_option("--eps", cert.eps, "Envelope eps (default: the state's eps)");
    certify_cmd->add_option("--tol", cert.tol, "Relative rank tolerance")->capture_default_str();
    certify_cmd->add_option("--trial-id", cert.trial_id, "Echoed in the certificate")->capture_default_str();
    certify_cmd->add_option("-o,--out", cert.out, "Report path (default: standard output)");
    certify_cmd->add_flag("--allow-negative-weights", cert.allow_negative, "Warn instead of failing on negative edge weights");
    certify_cmd->add_flag("--skip-full-delta", cert.skip_full_delta, "Skip ||Phi^T Phi - I||_2");

    MergeOptions merge_opts;
    auto* merge_cmd = app.add_subcommand("merge", "Add two sketches built with the same configuration");
    merge_cmd->add_option("a", merge_opts.a, "First state file")->required();
    merge_cmd->add_option("b", merge_opts.b, "Second state file")->required();
    merge_cmd->add_option("-o,--out", merge_opts.out, "Merged state file")->required();

    OracleOptions oracle;
    auto* oracle_cmd = app.add_subcommand("oracle", "Dump the dense oracle decomposition of an update log");
    oracle_cmd->add_option("state", oracle.state, "Sketch-state file (supplies dimensions and layout)")->required();
    oracle_cmd->add_option("--log", oracle.log, "Update log")->required();
    oracle_cmd->add_option("--tol", oracle.tol, "Relative rank tolerance")->capture_default_str();
    oracle_cmd->add_option("-o,--out", oracle.out, "Report path (default: standard output)");
    oracle_cmd->add_flag("--allow-negative-weights", oracle.allow_negative, "Warn instead of failing on negative edge weights");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "sksv: " << e.what() << "\n";
        return kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    Manifest manifest(chosen->get_name());
    int code = kExitOk;
    try {
        if (chosen == init_cmd) {
            try {
                code = cmd_init(init, out, manifest);
            } catch (const DomainError& e) {
                throw UsageError(e.what());
            }
        } else if (chosen == update_cmd) {
            code = cmd_update(update, in, err, manifest);
        } else if (chosen == spectrum_cmd) {
            code = cmd_spectrum(spectrum, out, manifest);
        } else if (chosen == certify_cmd) {
            code = cmd_certify(cert, out, manifest);
        } else if (chosen == merge_cmd) {
            code = cmd_merge(merge_opts, manifest);
        } else if (chosen == oracle_cmd) {
            code = cmd_oracle(oracle, out, manifest);
        }
    } catch (const UsageError& e) {
        err << "sksv " << chosen->get_name() << ": " << e.what() << "\n";
        code = kExitUsage;
    } catch (const IncompatibleStateError& e) {
        err << "sksv " << chosen->get_name() << ": " << e.what() << "\n";
        code = kExitIncompatible;
    } catch (const ResourceError& e) {
        err << "sksv " << chosen->get_name() << ": " << e.what() << "\n";
        code = kExitResource;
    } catch (const NumericalError& e) {
        err << "sksv " << chosen->get_name() << ": " << e.what() << "\n";
        code = kExitNumerical;
    } catch (const std::exception& e) {
        // Format, domain, and filesystem errors all trace back to the inputs.
        err << "sksv " << chosen->get_name() << ": " << e.what() << "\n";
        code = kExitIngestion;
    }

    const std::string line = manifest.finish(code).dump() + "\n";
    if (manifest_path.empty()) {
        err << line;
    } else {
        std::ofstream m(manifest_path, std::ios::app);
        m << line;
    }
    return code;
}

} // namespace sksv::cli
