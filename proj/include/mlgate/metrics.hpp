#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mlgate::metrics {

/// K x K counts, rows = true class, columns = predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);
  /// Builds from row-major counts; counts.size() must be a perfect square.
  static ConfusionMatrix from_counts(std::span<const std::uint64_t> counts);

  void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1);
  void merge(const ConfusionMatrix& other);

  std::size_t classes() const noexcept { return classes_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * classes_ + predicted];
  }
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t trace() const noexcept;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// trace / total. Throws std::invalid_argument on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

struct ClassScores {
  double precision;
  double recall;
  double f1;
};

/// Per-class scores; a zero denominator scores 0.
std::vector<ClassScores> per_class(const ConfusionMatrix& cm);

/// Unweighted means of per-class precision, recall and F1.
ClassScores macro_prf(const ConfusionMatrix& cm);

/// True iff the last `patience` epoch-to-epoch |changes| of history are all
/// below delta (needs at least patience + 1 entries).
bool f1_early_stop(std::span<const double> history, double delta = 0.001, std::size_t patience = 10);

}  // namespace mlgate::metrics
