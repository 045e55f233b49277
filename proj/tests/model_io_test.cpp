#include "fkf/model_io.hpp"

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fkf/errors.hpp"

namespace fkf {
namespace {

constexpr const char* kScalarModel = R"({
  "f": [[1.0]], "h": [[1.0]], "theta": [[0.5]], "r": [[2.0]],
  "x0_mean": [0.0], "pi0": [[1.0]]
})";

ErrorCode code_of(const std::string& text) {
  try {
    parse_model_json(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception for " << text;
  return ErrorCode::invalid_input;
}

TEST(ModelJson, DefaultsForOptionalKeys) {
  const StateSpaceModel m = parse_model_json(kScalarModel);
  EXPECT_EQ(m.state_dim(), 1);
  EXPECT_EQ(m.control_dim(), 0);
  EXPECT_TRUE(m.g.isIdentity());
  EXPECT_EQ(m.r(0, 0), 2.0);
}

TEST(ModelJson, RoundTripWithOverrides) {
  StateSpaceModel m = example2(1e-3);
  m.set_override(4, ModelField::r, 2e-6 * Eigen::MatrixXd::Identity(2, 2));
  m.set_override(7, ModelField::f, Eigen::MatrixXd::Identity(4, 4));
  const StateSpaceModel back = parse_model_json(model_to_json(m));
  EXPECT_EQ(back.f, m.f);
  EXPECT_EQ(back.h, m.h);
  EXPECT_EQ(back.r, m.r);
  EXPECT_EQ(back.pi0, m.pi0);
  EXPECT_EQ(back.b, m.b);
  ASSERT_EQ(back.overrides.size(), 2U);
  EXPECT_EQ(*back.overrides.at(4).r, *m.overrides.at(4).r);
  EXPECT_EQ(*back.overrides.at(7).f, *m.overrides.at(7).f);
}

TEST(ModelJson, MalformedDocuments) {
  EXPECT_EQ(code_of("{"), ErrorCode::invalid_model);
  EXPECT_EQ(code_of("[]"), ErrorCode::invalid_model);
  EXPECT_EQ(code_of(R"({"f": [[1]]})"), ErrorCode::invalid_model);
  EXPECT_EQ(code_of(R"({"f": [[1, 2], [3]], "h": [[1]], "theta": [[1]], "r": [[1]],
                        "x0_mean": [0], "pi0": [[1]]})"),
            ErrorCode::invalid_model);
  EXPECT_EQ(code_of(R"({"f": [[1]], "h": [["a"]], "theta": [[1]], "r": [[1]],
                        "x0_mean": [0], "pi0": [[1]]})"),
            ErrorCode::invalid_model);
  EXPECT_EQ(code_of(R"({"f": [[1]], "h": [[1]], "theta": [[-1]], "r": [[1]],
                        "x0_mean": [0], "pi0": [[1]]})"),
            ErrorCode::invalid_model);
  EXPECT_EQ(code_of(R"({"f": [[1]], "h": [[1]], "theta": [[1]], "r": [[1]],
                        "x0_mean": [0], "pi0": [[1]],
                        "overrides": [{"k": 2, "field": "q", "matrix": [[1]]}]})"),
            ErrorCode::invalid_model);
}

TEST(ResolveModel, PresetsAndFiles) {
  EXPECT_EQ(resolve_model("example1").f, example1().f);
  EXPECT_EQ(resolve_model("example2:1e-3").r, example2(1e-3).r);
  EXPECT_THROW(resolve_model("example2:abc"), Error);
  EXPECT_THROW(resolve_model("example2:0"), Error);
  EXPECT_THROW(resolve_model("/nonexistent/model.json"), Error);

  const auto path = std::filesystem::temp_directory_path() / "fkf_model_io_test.json";
  {
    std::ofstream out(path);
    out << kScalarModel;
  }
  EXPECT_EQ(resolve_model(path.string()).r(0, 0), 2.0);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace fkf
