#pragma once

#include <stdexcept>
#include <string>

namespace ddej {

// Error categories map onto process exit codes (see tools/ddej_cli.cpp):
// config -> 2, numerical -> 3, chart domain exit -> 4.
enum class ErrorCategory {
  config,
  numerical,
  domain,
  contract,
  range,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, std::string msg)
      : std::runtime_error(std::move(msg)), category_(cat) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

struct ConfigError : Error {
  explicit ConfigError(std::string msg) : Error(ErrorCategory::config, std::move(msg)) {}
};

struct NumericalError : Error {
  explicit NumericalError(std::string msg) : Error(ErrorCategory::numerical, std::move(msg)) {}
};

// Chart-domain exit; carries the model time at which the trajectory left the chart.
struct DomainError : Error {
  DomainError(std::string msg, double when)
      : Error(ErrorCategory::domain, std::move(msg)), time(when) {}
  double time;
};

struct ContractError : Error {
  explicit ContractError(std::string msg) : Error(ErrorCategory::contract, std::move(msg)) {}
};

struct RangeError : Error {
  explicit RangeError(std::string msg) : Error(ErrorCategory::range, std::move(msg)) {}
};

}  // namespace ddej
