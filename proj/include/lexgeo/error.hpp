#pragma once

#include <stdexcept>
#include <string>

namespace lexgeo {

// Validation errors map to CLI exit code 1, I/O errors to exit code 2.
enum class ErrorKind { validation, io, format };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorKind::validation, what); }
[[noreturn]] inline void fail_io(const std::string& what) { throw Error(ErrorKind::io, what); }
[[noreturn]] inline void fail_format(const std::string& what) { throw Error(ErrorKind::format, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(what);
}

}  // namespace lexgeo
