#pragma once

#include <stdexcept>
#include <string>

namespace amro {

// Coarse failure class; the CLI maps these onto process exit codes.
enum class ErrorKind {
  Config,      // malformed or inconsistent configuration
  State,       // persisted state does not match the deployment
  Data,        // empty or unusable datasets
  Infeasible,  // routing could not find a feasible successor
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace amro
