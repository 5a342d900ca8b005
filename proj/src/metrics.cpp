#include "mlgate/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace mlgate::metrics {

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {
  if (classes == 0) throw std::invalid_argument("confusion matrix needs at least one class");
}

ConfusionMatrix ConfusionMatrix::from_counts(std::span<const std::uint64_t> counts) {
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(counts.size()))));
  if (k * k != counts.size()) throw std::invalid_argument("counts are not a square matrix");
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) cm.add(i, j, counts[i * k + j]);
  }
  return cm;
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t n) {
  if (truth >= classes_ || predicted >= classes_) throw std::out_of_range("class index out of range");
  counts_[truth * classes_ + predicted] += n;
  total_ += n;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw std::invalid_argument("confusion matrix size mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < classes_; ++i) t += at(i, i);
  return t;
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("accuracy of an empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

std::vector<ClassScores> per_class(const ConfusionMatrix& cm) {
  const std::size_t k = cm.classes();
  std::vector<ClassScores> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t predicted = 0;
    std::uint64_t actual = 0;
    for (std::size_t j = 0; j < k; ++j) {
      predicted += cm.at(j, c);
      actual += cm.at(c, j);
    }
    const double tp = static_cast<double>(cm.at(c, c));
    const double p = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
    const double r = actual == 0 ? 0.0 : tp / static_cast<double>(actual);
    const double f1 = (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    out[c] = {p, r, f1};
  }
  return out;
}

ClassScores macro_prf(const ConfusionMatrix& cm) {
  const auto scores = per_class(cm);
  ClassScores m{0.0, 0.0, 0.0};
  for (const auto& s : scores) {
    m.precision += s.precision;
    m.recall += s.recall;
    m.f1 += s.f1;
  }
  const auto k = static_cast<double>(scores.size());
  return {m.precision / k, m.recall / k, m.f1 / k};
}

bool f1_early_stop(std::span<const double> history, double delta, std::size_t patience) {
  if (patience == 0 || history.size() < patience + 1) return false;
  const std::size_t n = history.size();
  for (std::size_t i = n - patience; i < n; ++i) {
    if (!(std::abs(history[i] - history[i - 1]) < delta)) return false;
  }
  return true;
}

}  // namespace mlgate::metrics
