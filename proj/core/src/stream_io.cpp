#include "sksv/stream_io.hpp"

#include "sksv/errors.hpp"

#include <fstream>

namespace sksv {

namespace {

Json parse_object(std::string_view line) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("record is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw FormatError("record must be a JSON object");
    }
    return j;
}

std::uint64_t index_field(const Json& j, const char* key) {
    if (!j.contains(key)) {
        throw FormatError(std::string("record is missing \"") + key + "\"");
    }
    const auto& v = j.at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw FormatError(std::string("\"") + key + "\" must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

double delta_field(const Json& j) {
    if (!j.contains("delta")) {
        throw FormatError("record is missing \"delta\"");
    }
    const auto& v = j.at("delta");
    if (!v.is_number()) {
        throw FormatError("\"delta\" must be a number");
    }
    return v.get<double>();
}

template <class Record, class Parse>
std::vector<Record> read_log(const std::filesystem::path& path, Parse parse) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open update log " + path.string());
    }
    std::vector<Record> out;
    for_each_record(in, [&](std::size_t line_no, std::string_view line) {
        try {
            out.push_back(parse(line));
        } catch (const FormatError& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    });
    return out;
}

} // namespace

MatrixUpdate parse_matrix_update(std::string_view line) {
    const Json j = parse_object(line);
    return {index_field(j, "row"), index_field(j, "col"), delta_field(j)};
}

EdgeUpdate parse_edge_update(std::string_view line) {
    const Json j = parse_object(line);
    return {index_field(j, "u"), index_field(j, "v"), delta_field(j)};
}

std::string to_jsonl(const MatrixUpdate& u) {
    Json j;
    j["row"] = u.row;
    j["col"] = u.col;
    j["delta"] = u.delta;
    return j.dump();
}

std::string to_jsonl(const EdgeUpdate& e) {
    Json j;
    j["u"] = e.u;
    j["v"] = e.v;
    j["delta"] = e.delta;
    return j.dump();
}

void for_each_record(std::istream& in, const std::function<void(std::size_t, std::string_view)>& visit) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        visit(line_no, line);
    }
}

std::vector<MatrixUpdate> read_matrix_log(const std::filesystem::path& path) {
    return read_log<MatrixUpdate>(path, parse_matrix_update);
}

std::vector<EdgeUpdate> read_edge_log(const std::filesystem::path& path) {
    return read_log<EdgeUpdate>(path, parse_edge_update);
}

} // namespace sksv
