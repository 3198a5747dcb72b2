#include "fixnet/json_fields.hpp"

namespace fixnet {

Fields::Fields(const Json& obj, std::string context)
    : obj_(obj), context_(std::move(context)) {
  if (!obj_.is_object()) throw ConfigError(context_ + ": expected an object");
}

const Json& Fields::raw(const std::string& key) {
  if (!obj_.contains(key)) {
    throw ConfigError(context_ + ": missing required key '" + key + "'");
  }
  used_.insert(key);
  return obj_.at(key);
}

const Json* Fields::optional_raw(const std::string& key) {
  if (!obj_.contains(key)) return nullptr;
  used_.insert(key);
  return &obj_.at(key);
}

Eigen::VectorXd Fields::vector(const std::string& key) {
  return json_to_vector(raw(key), context_ + "." + key);
}

Eigen::MatrixXd Fields::matrix(const std::string& key) {
  return json_to_matrix(raw(key), context_ + "." + key);
}

void Fields::finish() const {
  for (const auto& [key, value] : obj_.items()) {
    if (!used_.count(key)) {
      throw ConfigError(context_ + ": unknown key '" + key + "'");
    }
  }
}

Eigen::VectorXd json_to_vector(const Json& j, const std::string& context) {
  if (!j.is_array()) throw ConfigError(context + ": expected an array of numbers");
  Eigen::VectorXd v(Eigen::Index(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(context + ": expected numbers");
    v[Eigen::Index(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd json_to_matrix(const Json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(context + ": expected a nonempty array of rows");
  }
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(context + ": rows must be nonempty arrays");
  Eigen::MatrixXd m(Eigen::Index(j.size()), Eigen::Index(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = json_to_vector(j[r], context);
    if (std::size_t(row.size()) != cols) {
      throw ConfigError(context + ": ragged matrix");
    }
    m.row(Eigen::Index(r)) = row.transpose();
  }
  return m;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out.push_back(vector_to_json(m.row(r).transpose()));
  }
  return out;
}

}  // namespace fixnet
