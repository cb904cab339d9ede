#pragma once

#include <stdexcept>
#include <string>

namespace percolab {

/// Bad run configuration or violated operation precondition. CLI exit 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An internal consistency check failed (never expected). CLI exit 4.
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

/// Validity flag tripped (e.g. discard cap exceeded). CLI exit 3.
class ValidityError : public std::runtime_error {
 public:
  explicit ValidityError(const std::string& what) : std::runtime_error(what) {}
};

inline void invariant(bool cond, const std::string& msg) {
  if (!cond) throw InvariantError(msg);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

}  // namespace percolab
