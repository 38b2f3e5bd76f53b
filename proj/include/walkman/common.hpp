#ifndef WALKMAN_COMMON_HPP_
#define WALKMAN_COMMON_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace walkman {

using Rng = std::mt19937_64;

// Error categories surfaced by the library. All derive from std::runtime_error
// so callers can catch broadly; the CLI maps them to machine-readable lines.

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// FNV-1a, used for stable config hashing in run manifests.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace walkman

#endif  // WALKMAN_COMMON_HPP_
