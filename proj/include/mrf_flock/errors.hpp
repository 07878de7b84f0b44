#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrf_flock {

// Argument validation uses std::invalid_argument directly; the types below
// cover the domain failures callers may want to tell apart.

/// No candidate input keeps the agent inside its speed bound.
class InfeasibleState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Attraction/repulsion parameters without an interior minimum.
class NoMinimum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every candidate energy of an agent came out non-finite.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric evaluated on too few samples or agents.
class UndefinedMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario cannot be constructed (e.g. spawn placement keeps failing).
class InfeasibleScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid configuration. `line()` is 0 when the problem is
/// not tied to a specific line of the config file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mrf_flock
