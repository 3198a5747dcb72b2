#pragma once

#include <stdexcept>
#include <string>

namespace fixnet {

/// Malformed or unreadable configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scenario or run configuration violates a structural requirement
/// (CLI exit code 3).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterates left the finite, bounded regime (CLI exit code 4).
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point was passed to an operator outside its stated domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dimension, agent-count or block-count disagreement between arguments.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An estimator or fit had too little usable data.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fixnet
