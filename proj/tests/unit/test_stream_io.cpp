#include "sksv/errors.hpp"
#include "sksv/stream_io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace {

using namespace sksv;

TEST(ParseMatrixUpdate, ValidRecords) {
    EXPECT_EQ(parse_matrix_update(R"({"row": 3, "col": 1, "delta": -2.5})"), (MatrixUpdate{3, 1, -2.5}));
    EXPECT_EQ(parse_matrix_update(R"({"delta": 4, "col": 0, "row": 0})"), (MatrixUpdate{0, 0, 4.0}));
    EXPECT_EQ(parse_matrix_update(R"({"row": 18446744073709551615, "col": 2, "delta": 1e-300})"),
              (MatrixUpdate{18446744073709551615ull, 2, 1e-300}));
    // Unknown keys are ignored.
    EXPECT_EQ(parse_matrix_update(R"({"row": 1, "col": 1, "delta": 1, "t": 9})"), (MatrixUpdate{1, 1, 1.0}));
}

TEST(ParseMatrixUpdate, Rejects) {
    for (const char* bad : {
             R"({"row": 1, "col": 1})",
             R"({"row": 1, "delta": 1})",
             R"({"row": -1, "col": 1, "delta": 1})",
             R"({"row": 1.5, "col": 1, "delta": 1})",
             R"({"row": "1", "col": 1, "delta": 1})",
             R"({"row": 1, "col": 1, "delta": "x"})",
             R"({"row": 1, "col": 1, "delta": null})",
             R"([1, 1, 1])",
             R"({"row": 1, "col": 1, "delta": 1)",
             "garbage",
         }) {
        EXPECT_THROW(parse_matrix_update(bad), FormatError) << bad;
    }
}

TEST(ParseEdgeUpdate, ValidAndInvalid) {
    EXPECT_EQ(parse_edge_update(R"({"u": 0, "v": 5, "delta": 1.0})"), (EdgeUpdate{0, 5, 1.0}));
    EXPECT_THROW(parse_edge_update(R"({"u": 0, "delta": 1.0})"), FormatError);
    EXPECT_THROW(parse_edge_update(R"({"row": 0, "col": 1, "delta": 1.0})"), FormatError);
    EXPECT_THROW(parse_edge_update(R"({"u": 0, "v": -2, "delta": 1.0})"), FormatError);
}

TEST(Jsonl, RoundTrip) {
    const MatrixUpdate u{7, 2, 0.1};
    EXPECT_EQ(to_jsonl(u), R"({"row":7,"col":2,"delta":0.1})");
    EXPECT_EQ(parse_matrix_update(to_jsonl(u)), u);
    const EdgeUpdate e{1, 9, -3.25};
    EXPECT_EQ(to_jsonl(e), R"({"u":1,"v":9,"delta":-3.25})");
    EXPECT_EQ(parse_edge_update(to_jsonl(e)), e);
}

TEST(ForEachRecord, SkipsBlankLinesAndStripsCr) {
    std::istringstream in("a\r\n\n   \nb\n\t\nc");
    std::vector<std::pair<std::size_t, std::string>> seen;
    for_each_record(in, [&](std::size_t n, std::string_view line) { seen.emplace_back(n, std::string(line)); });
    ASSERT_EQ(seen.size(), 3u);
    EXPECT_EQ(seen[0], (std::pair<std::size_t, std::string>{1, "a"}));
    EXPECT_EQ(seen[1], (std::pair<std::size_t, std::string>{4, "b"}));
    EXPECT_EQ(seen[2], (std::pair<std::size_t, std::string>{6, "c"}));
}

TEST(ReadLog, ReportsPathAndLine) {
    const auto path = std::filesystem::temp_directory_path() / "sksv_stream_io_test.jsonl";
    {
        std::ofstream out(path);
        out << R"({"row": 0, "col": 0, "delta": 1})" << "\n\n" << R"({"row": 0, "col": 0})" << "\n";
    }
    try {
        read_matrix_log(path);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("sksv_stream_io_test.jsonl:3"), std::string::npos) << e.what();
    }
    std::filesystem::remove(path);
    EXPECT_THROW(read_edge_log(path), FormatError);
}

TEST(ReadLog, Fixtures) {
    const std::filesystem::path dir = SKSV_FIXTURE_DIR;
    const auto matrix = read_matrix_log(dir / "small_matrix.jsonl");
    EXPECT_FALSE(matrix.empty());
    const auto triangle = read_edge_log(dir / "triangle.jsonl");
    ASSERT_EQ(triangle.size(), 3u);
    EXPECT_EQ(triangle[0], (EdgeUpdate{0, 1, 1.0}));
}

} // namespace
