#pragma once

#include <cstddef>
#include <cstdint>

#include "mlgate/gate.hpp"

namespace mlgate::bench {

enum class Mode { BuiltIn, Gated };

const char* to_string(Mode m) noexcept;

struct Result {
  gate::Preset preset;
  Mode mode;
  std::size_t n;
  double forward_per_second;
  double forward_deriv_per_second;
  /// Sum of all outputs; keeps the work observable.
  double checksum;
};

/// Times n activation evaluations on inputs drawn uniformly from [-5, 5],
/// first values only, then values with derivatives.
Result run(gate::Preset preset, Mode mode, std::size_t n, std::uint64_t seed = 1);

}  // namespace mlgate::bench
