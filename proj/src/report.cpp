#include "mlgate/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace mlgate::report {

namespace {

using Json = nlohmann::ordered_json;

double finite(double v, const char* field) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string("non-finite value in report field ") + field);
  return v;
}

Json epoch_json(const EpochRecord& e) {
  Json j;
  j["epoch"] = e.epoch;
  j["train_loss"] = finite(e.train_loss, "train_loss");
  j["test_loss"] = finite(e.test_loss, "test_loss");
  j["train_acc"] = finite(e.train_acc, "train_acc");
  j["test_acc"] = finite(e.test_acc, "test_acc");
  j["macro_p"] = finite(e.macro_p, "macro_p");
  j["macro_r"] = finite(e.macro_r, "macro_r");
  j["macro_f1"] = finite(e.macro_f1, "macro_f1");
  j["wall_seconds"] = finite(e.wall_seconds, "wall_seconds");
  j["images_per_second"] = finite(e.images_per_second, "images_per_second");
  return j;
}

EpochRecord epoch_from(const Json& j) {
  EpochRecord e;
  e.epoch = j.at("epoch").get<std::size_t>();
  e.train_loss = j.at("train_loss").get<double>();
  e.test_loss = j.at("test_loss").get<double>();
  e.train_acc = j.at("train_acc").get<double>();
  e.test_acc = j.at("test_acc").get<double>();
  e.macro_p = j.at("macro_p").get<double>();
  e.macro_r = j.at("macro_r").get<double>();
  e.macro_f1 = j.at("macro_f1").get<double>();
  e.wall_seconds = j.at("wall_seconds").get<double>();
  e.images_per_second = j.at("images_per_second").get<double>();
  return e;
}

}  // namespace

std::string to_json(const RunReport& r) {
  Json j;
  j["schema_version"] = r.schema_version;
  Json config = Json::object();
  for (const auto& [k, v] : r.config) config[k] = v;
  j["config"] = std::move(config);
  j["seed"] = r.seed;
  j["members"] = r.members;
  j["early_stopped"] = r.early_stopped;
  j["wall_clock_seconds"] = finite(r.wall_clock_seconds, "wall_clock_seconds");
  j["images_per_second"] = finite(r.images_per_second, "images_per_second");
  Json epochs = Json::array();
  for (const auto& e : r.epochs) epochs.push_back(epoch_json(e));
  j["epochs"] = std::move(epochs);
  return j.dump(2) + "\n";
}

RunReport from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    RunReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion) {
      throw std::invalid_argument("unsupported report schema version " + std::to_string(r.schema_version));
    }
    for (const auto& [k, v] : j.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.members = j.at("members").get<std::size_t>();
    r.early_stopped = j.at("early_stopped").get<bool>();
    r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    r.images_per_second = j.at("images_per_second").get<double>();
    for (const auto& e : j.at("epochs")) r.epochs.push_back(epoch_from(e));
    return r;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  }
}

RunReport aggregate(std::span<const RunReport> runs) {
  if (runs.empty()) throw std::invalid_argument("nothing to aggregate");
  RunReport out;
  out.config = runs.front().config;
  out.seed = runs.front().seed;
  out.members = runs.size();
  std::size_t longest = 0;
  for (const auto& r : runs) {
    longest = std::max(longest, r.epochs.size());
    out.wall_clock_seconds += r.wall_clock_seconds / static_cast<double>(runs.size());
    out.images_per_second += r.images_per_second / static_cast<double>(runs.size());
    out.early_stopped = out.early_stopped || r.early_stopped;
  }
  for (std::size_t i = 0; i < longest; ++i) {
    EpochRecord m;
    m.epoch = i;
    std::size_t count = 0;
    for (const auto& r : runs) {
      if (i >= r.epochs.size()) continue;
      const auto& e = r.epochs[i];
      m.train_loss += e.train_loss;
      m.test_loss += e.test_loss;
      m.train_acc += e.train_acc;
      m.test_acc += e.test_acc;
      m.macro_p += e.macro_p;
      m.macro_r += e.macro_r;
      m.macro_f1 += e.macro_f1;
      m.wall_seconds += e.wall_seconds;
      m.images_per_second += e.images_per_second;
      ++count;
    }
    const double c = static_cast<double>(count);
    m.train_loss /= c;
    m.test_loss /= c;
    m.train_acc /= c;
    m.test_acc /= c;
    m.macro_p /= c;
    m.macro_r /= c;
    m.macro_f1 /= c;
    m.wall_seconds /= c;
    m.images_per_second /= c;
    out.epochs.push_back(m);
  }
  return out;
}

}  // namespace mlgate::report
