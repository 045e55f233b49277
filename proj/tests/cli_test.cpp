#include "fkf/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fkf/errors.hpp"

namespace fkf::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

TEST(Simulate, RowsHeaderAndDeterminism) {
  const Result a = invoke({"simulate", "--model", "example1", "--steps", "100", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto rows = lines(a.out);
  ASSERT_EQ(rows.size(), 101U);
  EXPECT_EQ(rows[0], "k,x_1,x_2,x_3,x_4,z_1,u_1");
  EXPECT_EQ(a.out, invoke({"simulate", "--model", "example1", "--steps", "100", "--seed", "7"}).out);
  EXPECT_NE(a.out, invoke({"simulate", "--model", "example1", "--steps", "100", "--seed", "8"}).out);
}

TEST(Simulate, WritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "fkf_cli_test_traj.csv";
  const Result r = invoke({"simulate", "--model", "example2:1e-3", "--steps", "5", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "k,x_1,x_2,x_3,x_4,z_1,z_2,u_1");
  std::filesystem::remove(path);
}

TEST(Simulate, BadModelIsUsageError) {
  EXPECT_EQ(invoke({"simulate", "--model", "example3"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--model", "example2:2"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--model", "/no/such/file.json"}).code, 2);
  EXPECT_EQ(invoke({"simulate"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
}

TEST(Run, AllFiltersCsv) {
  const Result r = invoke({"run", "--model", "example1", "--filters", "all", "--runs", "20",
                           "--steps", "50", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 6U);
  const auto header = cells(rows[0]);
  EXPECT_EQ(header.front(), "filter");
  EXPECT_EQ(header[1], "rmse_x1");
  const auto kf = cells(rows[1]);
  EXPECT_EQ(kf[0], "kf");
  EXPECT_EQ(kf[7], "");  // suppressed MRE of the third state
  for (std::size_t row = 2; row < rows.size(); ++row) {
    const auto c = cells(rows[row]);
    for (std::size_t i = 1; i <= 4; ++i) {
      EXPECT_NEAR(std::stod(c[i]), std::stod(kf[i]), 1e-8 * std::stod(kf[i]) + 1e-6);
    }
  }
}

TEST(Run, SingleFilterAndJson) {
  const Result csv = invoke({"run", "--model", "example1", "--runs", "1", "--filters", "kf"});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(lines(csv.out).size(), 2U);

  const Result js = invoke({"run", "--model", "example1", "--runs", "3", "--steps", "10",
                            "--filters", "kf,svd-kf", "--format", "json"});
  ASSERT_EQ(js.code, 0) << js.err;
  const auto doc = nlohmann::json::parse(js.out);
  ASSERT_EQ(doc["filters"].size(), 2U);
  EXPECT_EQ(doc["filters"][1]["filter"], "svd-kf");
  EXPECT_EQ(doc["filters"][0]["rmse"].size(), 4U);
  EXPECT_TRUE(doc["filters"][0]["mre_percent"][2].is_null());
  EXPECT_EQ(doc["runs"], 3);
}

TEST(Run, BadFlags) {
  EXPECT_EQ(invoke({"run", "--model", "example1", "--filters", "ekf"}).code, 2);
  EXPECT_EQ(invoke({"run", "--model", "example1", "--runs", "0"}).code, 2);
  EXPECT_EQ(invoke({"run", "--model", "example1", "--format", "xml"}).code, 2);
  EXPECT_EQ(invoke({"run", "--model", "example1", "--bogus"}).code, 2);
}

TEST(Sweep, TableShape) {
  const Result r = invoke({"sweep", "--runs", "5", "--steps", "30", "--filters", "kf,svd-kf"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3U);
  EXPECT_EQ(cells(rows[0]).size(), 15U);
  const auto kf = cells(rows[1]);
  const auto svd = cells(rows[2]);
  EXPECT_EQ(kf[8], "NaN");
  for (std::size_t i = 1; i < svd.size(); ++i) EXPECT_TRUE(std::isfinite(std::stod(svd[i])));
}

TEST(Sweep, MalformedDeltas) {
  EXPECT_EQ(invoke({"sweep", "--deltas", "abc"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--deltas", "1e-3,1e-1"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--deltas", "3e-1..1e-3"}).code, 2);
}

TEST(ParseDeltas, ListsAndRanges) {
  EXPECT_EQ(parse_deltas("1e-1..1e-14").size(), 14U);
  EXPECT_EQ(parse_deltas("1e-2..1e-4"), (std::vector<double>{1e-2, 1e-3, 1e-4}));
  EXPECT_EQ(parse_deltas("0.5,1e-3"), (std::vector<double>{0.5, 1e-3}));
  EXPECT_THROW(parse_deltas("1e-4..1e-2"), Error);
  EXPECT_THROW(parse_deltas("0"), Error);
  EXPECT_THROW(parse_deltas(""), Error);
}

TEST(Loglik, MethodsAgreeAndAreDeterministic) {
  const Result conv = invoke({"loglik", "--model", "example1", "--filter", "svd-kf", "--steps", "100",
                              "--seed", "4", "--method", "conventional"});
  const Result svd = invoke({"loglik", "--model", "example1", "--filter", "svd-kf", "--steps", "100",
                             "--seed", "4", "--method", "svd"});
  ASSERT_EQ(conv.code, 0) << conv.err;
  ASSERT_EQ(svd.code, 0) << svd.err;
  const double a = std::stod(conv.out);
  const double b = std::stod(svd.out);
  EXPECT_LE(std::abs(a - b), 1e-9 * std::abs(a));
  EXPECT_EQ(svd.out, invoke({"loglik", "--model", "example1", "--steps", "100", "--seed", "4"}).out);
}

TEST(Loglik, MethodFilterMismatch) {
  EXPECT_EQ(invoke({"loglik", "--model", "example1", "--filter", "kf", "--method", "svd"}).code, 2);
}

TEST(Loglik, DegenerateModelIsAnErrorNotACrash) {
  const auto path = std::filesystem::temp_directory_path() / "fkf_cli_test_degenerate.json";
  {
    std::ofstream out(path);
    out << R"({"f": [[1]], "h": [[1]], "theta": [[0]], "r": [[0]], "x0_mean": [0], "pi0": [[0]]})";
  }
  for (const char* filter : {"kf", "svd-kf"}) {
    const Result r = invoke({"loglik", "--model", path.string(), "--filter", filter, "--steps", "1",
                             "--method", "conventional"});
    EXPECT_EQ(r.code, 2) << filter;
    EXPECT_FALSE(r.err.empty());
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace fkf::cli
