#pragma once

#include <stdexcept>
#include <string>

namespace ikc {

// Library-wide error with a machine-checkable kind. Thrown on contract
// violations (bad parameters, malformed files, mismatched configurations).
class Error : public std::runtime_error {
 public:
  enum class Kind {
    invalid_parameter,
    invalid_configuration,
    degenerate_basis,
    no_data,
    io,
    nan_loss,
  };

  Error(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

  static Error invalid_parameter(const std::string& msg) { return {Kind::invalid_parameter, msg}; }
  static Error invalid_configuration(const std::string& msg) { return {Kind::invalid_configuration, msg}; }
  static Error degenerate_basis(const std::string& msg) { return {Kind::degenerate_basis, msg}; }
  static Error no_data(const std::string& msg) { return {Kind::no_data, msg}; }
  static Error io(const std::string& msg) { return {Kind::io, msg}; }
  static Error nan_loss(const std::string& msg) { return {Kind::nan_loss, msg}; }

 private:
  Kind kind_;
};

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }
inline float clamp01(float v) { return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v); }

const char* version();

}  // namespace ikc
