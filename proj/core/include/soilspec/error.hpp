#pragma once

#include <stdexcept>
#include <string>

namespace soilspec {

/// Error class for user/data problems (bad files, invalid arguments,
/// dimension mismatches). Anything else escaping the library is a bug.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace soilspec
