#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mlgate::testing {

Tensor<double> one_hot(std::size_t n, std::size_t k, std::uint64_t seed) {
  Tensor<double> y({n, k}, 0.0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) y[i * k + rng() % k] = 1.0;
  return y;
}

Tensor<double> random_normal(std::vector<std::size_t> shape, std::uint64_t seed, double scale) {
  Tensor<double> t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  for (double& v : t.values()) v = d(rng);
  return t;
}

double gradient_check(nn::Network<double>& net, const Tensor<double>& x, const Tensor<double>& y, double h,
                      double floor) {
  net.forward(x);
  net.backward(y);
  const auto params = net.params();
  std::vector<std::vector<double>> analytic;
  for (nn::Param<double>* p : params) analytic.emplace_back(p->grad.values().begin(), p->grad.values().end());
  auto loss = [&] { return nn::cross_entropy(net.forward(x), y); };
  double worst = 0.0;
  for (std::size_t j = 0; j < params.size(); ++j) {
    for (std::size_t i = 0; i < params[j]->value.size(); ++i) {
      double& w = params[j]->value[i];
      const double w0 = w;
      auto at = [&](double offset) {
        w = w0 + offset;
        return loss();
      };
      const double numeric = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
      w = w0;
      const double a = analytic[j][i];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor}));
    }
  }
  return worst;
}

nn::Network<double> toy_net(const nn::Activation& first, const nn::Activation& second, std::uint64_t seed) {
  nn::Network<double> net({6});
  net.emplace<nn::Dense<double>>(6, 4);
  net.emplace<nn::ActivationLayer<double>>(first);
  net.emplace<nn::Dense<double>>(4, 4);
  net.emplace<nn::ActivationLayer<double>>(second);
  net.emplace<nn::Dense<double>>(4, 3);
  net.emplace<nn::Softmax<double>>();
  net.init_he(seed);
  return net;
}

}  // namespace mlgate::testing
