#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mlgate/nn.hpp"

namespace mlgate::testing {

Tensor<double> one_hot(std::size_t n, std::size_t k, std::uint64_t seed);

Tensor<double> random_normal(std::vector<std::size_t> shape, std::uint64_t seed, double scale = 1.0);

/// Worst relative error of analytic against 5-point finite-difference
/// gradients over every parameter, with the denominator floored at `floor`.
double gradient_check(nn::Network<double>& net, const Tensor<double>& x, const Tensor<double>& y, double h,
                      double floor);

/// 6 -> 4 -> 4 -> 3 dense network with the given activations.
nn::Network<double> toy_net(const nn::Activation& first, const nn::Activation& second, std::uint64_t seed);

}  // namespace mlgate::testing
