#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>

namespace geomorse {

using Vec3 = Eigen::Vector3d;

// Error with a machine-readable kind tag ("constraint-violation",
// "projection-ambiguity", "out-of-tube", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace geomorse
