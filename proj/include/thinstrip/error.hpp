#pragma once

#include <stdexcept>
#include <string>

namespace thinstrip {

/// Broad failure categories. The C API and the CLI exit codes are derived
/// from these.
enum class ErrorKind {
  Config,     // malformed or inconsistent configuration
  Parameter,  // an argument outside its admissible range
  Domain,     // evaluation point outside the profile domain
  Kink,       // one-sided quantity requested at the m = 1 cap without a side
  Assembly,   // non-finite potential sample, bad grid
  Numeric,    // bisection, factorization or iteration failure
  Truncation, // eigenfunction not decayed at a truncation boundary
  Index,      // mode number beyond the computed pairs
  Io,         // unreadable or unwritable path
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* kind_name(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::Config: return "config";
  case ErrorKind::Parameter: return "parameter";
  case ErrorKind::Domain: return "domain";
  case ErrorKind::Kink: return "kink";
  case ErrorKind::Assembly: return "assembly";
  case ErrorKind::Numeric: return "numeric";
  case ErrorKind::Truncation: return "truncation";
  case ErrorKind::Index: return "index";
  case ErrorKind::Io: return "io";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace thinstrip
