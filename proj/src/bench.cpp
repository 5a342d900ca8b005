#include "mlgate/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <vector>

#include "mlgate/builtin.hpp"

namespace mlgate::bench {

const char* to_string(Mode m) noexcept { return m == Mode::BuiltIn ? "builtin" : "gated"; }

Result run(gate::Preset preset, Mode mode, std::size_t n, std::uint64_t seed) {
  Result res{preset, mode, n, 0.0, 0.0, 0.0};
  if (n == 0) return res;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  std::vector<double> xs(std::min<std::size_t>(n, 1 << 16));
  for (double& x : xs) x = dist(rng);
  const gate::GateSpec spec = gate::preset(preset);

  using Clock = std::chrono::steady_clock;
  double sum = 0.0;
  auto t0 = Clock::now();
  if (mode == Mode::BuiltIn) {
    for (std::size_t i = 0; i < n; ++i) sum += builtin::value(preset, xs[i % xs.size()]);
  } else {
    for (std::size_t i = 0; i < n; ++i) sum += gate::gate_eval(spec, xs[i % xs.size()]);
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  res.forward_per_second = static_cast<double>(n) / std::max(dt, 1e-9);

  t0 = Clock::now();
  if (mode == Mode::BuiltIn) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = xs[i % xs.size()];
      sum += builtin::value(preset, x) + builtin::deriv(preset, x);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = gate::gate_eval_deriv(spec, xs[i % xs.size()]);
      sum += v.value + v.deriv;
    }
  }
  dt = std::chrono::duration<double>(Clock::now() - t0).count();
  res.forward_deriv_per_second = static_cast<double>(n) / std::max(dt, 1e-9);
  res.checksum = sum;
  return res;
}

}  // namespace mlgate::bench
