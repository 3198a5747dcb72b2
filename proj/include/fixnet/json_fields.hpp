#pragma once

// Strict reader over a JSON object: every key must be consumed, so typos in
// configuration files surface as errors instead of silently using defaults.

#include "fixnet/error.hpp"

#include "json.hpp"

#include <Eigen/Core>

#include <set>
#include <string>
#include <vector>

namespace fixnet {

using Json = nlohmann::json;

class Fields {
 public:
  Fields(const Json& obj, std::string context);

  bool has(const std::string& key) const { return obj_.contains(key); }
  const Json& raw(const std::string& key);
  const Json* optional_raw(const std::string& key);

  template <class T>
  T get(const std::string& key) {
    const Json& v = raw(key);
    try {
      return v.get<T>();
    } catch (const Json::exception& e) {
      throw ConfigError(context_ + "." + key + ": " + e.what());
    }
  }

  template <class T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  Eigen::VectorXd vector(const std::string& key);
  Eigen::MatrixXd matrix(const std::string& key);

  /// Throws ConfigError naming any key that was never read.
  void finish() const;
  const std::string& context() const { return context_; }

 private:
  const Json& obj_;
  std::string context_;
  std::set<std::string> used_;
};

Eigen::VectorXd json_to_vector(const Json& j, const std::string& context);
Eigen::MatrixXd json_to_matrix(const Json& j, const std::string& context);
Json vector_to_json(const Eigen::VectorXd& v);
Json matrix_to_json(const Eigen::MatrixXd& m);

}  // namespace fixnet
