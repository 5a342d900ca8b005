#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mlgate::report {

inline constexpr int kSchemaVersion = 1;

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double macro_p = 0.0;
  double macro_r = 0.0;
  double macro_f1 = 0.0;
  double wall_seconds = 0.0;
  double images_per_second = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct RunReport {
  int schema_version = kSchemaVersion;
  /// Flag echo in insertion order.
  std::vector<std::pair<std::string, std::string>> config;
  std::uint64_t seed = 0;
  /// epochs[0] is the evaluation before any update.
  std::vector<EpochRecord> epochs;
  double wall_clock_seconds = 0.0;
  double images_per_second = 0.0;
  bool early_stopped = false;
  /// Number of runs averaged into this report (1 for a single run).
  std::size_t members = 1;

  const EpochRecord& last() const { return epochs.back(); }

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Pretty-printed JSON. Throws std::invalid_argument on non-finite numbers.
std::string to_json(const RunReport& r);

/// Throws std::invalid_argument on malformed input or a schema mismatch.
RunReport from_json(std::string_view text);

/// Epoch-wise means over the members; runs that stopped early contribute to
/// the epochs they reached.
RunReport aggregate(std::span<const RunReport> runs);

}  // namespace mlgate::report
