#pragma once

#include <stdexcept>
#include <string>

namespace absaga {

// Error taxonomy shared by the library and the CLI. The CLI maps categories
// to process exit codes: configuration -> 2, numerical -> 3, io -> 4.
enum class errc {
  invalid_argument,
  configuration,
  generation_failure,
  numerical_failure,
  divergence,
  data_format,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace absaga
