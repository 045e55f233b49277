#include "fkf/model_io.hpp"

#include <fstream>
#include <sstream>

#include "fkf/errors.hpp"
#include "json.hpp"

namespace fkf {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::invalid_model, "malformed model document: " + what);
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& key) {
  if (!j.is_array()) malformed(key + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  if (!j.front().is_array()) malformed(key + " must be an array of rows");
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      malformed(key + " has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) malformed(key + " has a non-numeric entry");
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& key) {
  if (!j.is_array()) malformed(key + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (e.is_number()) {
      v(static_cast<Eigen::Index>(i)) = e.get<double>();
    } else if (e.is_array() && e.size() == 1 && e.front().is_number()) {
      v(static_cast<Eigen::Index>(i)) = e.front().get<double>();
    } else {
      malformed(key + " must be a flat array of numbers");
    }
  }
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

const json& require(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) malformed(std::string("missing key \"") + key + "\"");
  return *it;
}

}  // namespace

StateSpaceModel parse_model_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  if (!doc.is_object()) malformed("top level must be an object");

  StateSpaceModel model;
  model.f = matrix_from_json(require(doc, "f"), "f");
  const Eigen::Index n = model.f.rows();
  model.h = matrix_from_json(require(doc, "h"), "h");
  model.theta = matrix_from_json(require(doc, "theta"), "theta");
  model.r = matrix_from_json(require(doc, "r"), "r");
  model.x0_mean = vector_from_json(require(doc, "x0_mean"), "x0_mean");
  model.pi0 = matrix_from_json(require(doc, "pi0"), "pi0");
  if (doc.contains("b")) {
    model.b = matrix_from_json(doc["b"], "b");
    if (model.b.rows() == 0) model.b = Eigen::MatrixXd::Zero(n, 0);
  } else {
    model.b = Eigen::MatrixXd::Zero(n, 0);
  }
  model.g = doc.contains("g") ? matrix_from_json(doc["g"], "g")
                              : Eigen::MatrixXd::Identity(n, n);

  if (doc.contains("overrides")) {
    const json& list = doc["overrides"];
    if (!list.is_array()) malformed("overrides must be an array");
    for (const json& o : list) {
      if (!o.is_object() || !o.contains("k") || !o.contains("field") || !o.contains("matrix")) {
        malformed("each override needs k, field and matrix");
      }
      if (!o["k"].is_number_integer()) malformed("override k must be an integer");
      if (!o["field"].is_string()) malformed("override field must be a string");
      const auto field = parse_model_field(o["field"].get<std::string>());
      if (!field) malformed("unknown override field \"" + o["field"].get<std::string>() + "\"");
      model.set_override(o["k"].get<int>(), *field, matrix_from_json(o["matrix"], "override matrix"));
    }
  }
  model.validate();
  return model;
}

StateSpaceModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::invalid_model, "cannot open model file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_json(buf.str());
}

std::string model_to_json(const StateSpaceModel& model) {
  json doc;
  doc["f"] = matrix_to_json(model.f);
  doc["b"] = matrix_to_json(model.b);
  doc["g"] = matrix_to_json(model.g);
  doc["h"] = matrix_to_json(model.h);
  doc["theta"] = matrix_to_json(model.theta);
  doc["r"] = matrix_to_json(model.r);
  doc["x0_mean"] = json(std::vector<double>(model.x0_mean.data(),
                                            model.x0_mean.data() + model.x0_mean.size()));
  doc["pi0"] = matrix_to_json(model.pi0);
  if (!model.overrides.empty()) {
    json list = json::array();
    for (const auto& [k, o] : model.overrides) {
      auto add = [&](ModelField field, const std::optional<Eigen::MatrixXd>& m) {
        if (m) list.push_back({{"k", k}, {"field", std::string(to_string(field))},
                               {"matrix", matrix_to_json(*m)}});
      };
      add(ModelField::f, o.f);
      add(ModelField::b, o.b);
      add(ModelField::g, o.g);
      add(ModelField::h, o.h);
      add(ModelField::theta, o.theta);
      add(ModelField::r, o.r);
    }
    doc["overrides"] = std::move(list);
  }
  return doc.dump(2);
}

StateSpaceModel resolve_model(std::string_view name_or_path) {
  if (name_or_path == "example1") return example1();
  constexpr std::string_view kExample2 = "example2:";
  if (name_or_path.substr(0, kExample2.size()) == kExample2) {
    const std::string arg(name_or_path.substr(kExample2.size()));
    std::size_t used = 0;
    double delta = 0.0;
    try {
      delta = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) {
      throw Error(ErrorCode::invalid_input, "example2: cannot parse delta \"" + arg + "\"");
    }
    return example2(delta);
  }
  if (name_or_path.substr(0, 7) == "example") {
    throw Error(ErrorCode::invalid_input, "unknown preset \"" + std::string(name_or_path) + "\"");
  }
  return load_model_file(std::filesystem::path(name_or_path));
}

}  // namespace fkf
