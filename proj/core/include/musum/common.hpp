#pragma once

#include <cstdarg>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace musum {

enum class ErrorKind {
  Io,               // file system / stream failures
  Decode,           // unsupported or corrupt audio payload
  EmptyInput,       // a file or signal with no content
  Config,           // invalid parameters or configuration values
  TooShort,         // input shorter than the operation requires
  InvalidSelection, // overlapping / out-of-range time spans
  Parse,            // malformed manifest, config, or report file
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

// printf-style formatting into a std::string. Used for report/manifest
// output, where the byte layout must be stable across runs.
inline std::string strformat(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  va_list args2;
  va_copy(args2, args);
  int n = std::vsnprintf(nullptr, 0, fmt, args);
  va_end(args);
  std::string out(n > 0 ? static_cast<size_t>(n) : 0, '\0');
  if (n > 0) {
    std::vsnprintf(out.data(), out.size() + 1, fmt, args2);
  }
  va_end(args2);
  return out;
}

} // namespace musum
