#pragma once

#include "sksv/graph_stream.hpp"
#include "sksv/turnstile.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace sksv {

// JSON Lines stream records:
//   matrix: {"row": int, "col": int, "delta": float}
//   graph:  {"u": int, "v": int, "delta": float}
// Blank lines are ignored. Malformed records raise FormatError.

MatrixUpdate parse_matrix_update(std::string_view line);
EdgeUpdate parse_edge_update(std::string_view line);

std::string to_jsonl(const MatrixUpdate& u);
std::string to_jsonl(const EdgeUpdate& e);

/// Calls `visit(line_number, line)` for every nonblank line (1-based numbers).
void for_each_record(std::istream& in, const std::function<void(std::size_t, std::string_view)>& visit);

std::vector<MatrixUpdate> read_matrix_log(const std::filesystem::path& path);
std::vector<EdgeUpdate> read_edge_log(const std::filesystem::path& path);

} // namespace sksv
