#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sdpi {

/// Validation or internal failure, prefixed with the module that raised it
/// ("channels: row 3 does not sum to 1").
class Error : public std::runtime_error {
 public:
  Error(std::string_view module, const std::string& what)
      : std::runtime_error(std::string(module) + ": " + what) {}
};

/// Unit for information-valued results. Everything is computed in nats and
/// converted at the boundary.
enum class LogBase { Nats, Bits };

inline double from_nats(double nats, LogBase base) {
  return base == LogBase::Bits ? nats / std::numbers::ln2 : nats;
}

inline double to_nats(double value, LogBase base) {
  return base == LogBase::Bits ? value * std::numbers::ln2 : value;
}

inline const char* log_base_name(LogBase base) {
  return base == LogBase::Bits ? "bits" : "nats";
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace sdpi
