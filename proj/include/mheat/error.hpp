#pragma once

#include <stdexcept>
#include <string>

namespace mheat {

// Module that raised an error; the CLI maps it onto an exit code.
enum class ErrorKind { Grid, Operator, Config, Solver, Precondition, Io, Run };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), kind_(kind), module_(module) {}

  ErrorKind kind() const { return kind_; }
  const std::string& module() const { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

inline Error grid_error(const std::string& what) { return {ErrorKind::Grid, "grid", what}; }
inline Error operator_error(const std::string& what) {
  return {ErrorKind::Operator, "discrete_ops", what};
}
inline Error config_error(const std::string& what) { return {ErrorKind::Config, "config", what}; }
inline Error solver_error(const std::string& what) { return {ErrorKind::Solver, "solver", what}; }
inline Error io_error(const std::string& what) { return {ErrorKind::Io, "io", what}; }

}  // namespace mheat
