#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace hml {

/// Error type thrown by every module for invalid input or I/O failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

inline void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw Error(what + " is not finite");
}

}  // namespace hml
