#pragma once

#include <stdexcept>
#include <string>

namespace railelec {

/// Bad input data or configuration. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The assignment cannot route some demand. The CLI maps this to exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, long origin, long destination)
      : std::runtime_error(what), origin_(origin), destination_(destination) {}

  long origin() const noexcept { return origin_; }
  long destination() const noexcept { return destination_; }

 private:
  long origin_;
  long destination_;
};

}  // namespace railelec
