#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace mlgate::cli {

enum Exit : int { kOk = 0, kFailure = 1, kConfigError = 2, kDataError = 3 };

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double v);

/// "from:to:step" inclusive grid.
struct Grid {
  double from = 0.0;
  double to = 0.0;
  double step = 1.0;

  static std::optional<Grid> parse(std::string_view text);
  std::vector<double> points() const;
};

/// n evenly spaced values from a to b, endpoints exact.
std::vector<double> linspace(double a, double b, std::size_t n);

struct EvalOptions {
  double alpha = 1.0;
  double beta = 1.0;
  double z = 0.0;
  std::string method = "auto";
  std::optional<unsigned> deriv;
};

struct VerifyOptions {
  double tol = 1e-9;
  std::string grid = "-10:10:0.05";
};

struct InterpolateOptions {
  double beta2_from = 1.0;
  double beta2_to = 2.0;
  std::size_t steps = 11;
  double xmin = -3.0;
  double xmax = 3.0;
  std::size_t xsteps = 121;
  std::string out;
};

struct TrainOptions {
  std::string arch = "lenet5";
  std::string dataset = "mnist";
  std::string activation = "builtin:relu";
  std::size_t epochs = 10;
  std::size_t batch = 64;
  std::uint64_t seed = 1234;
  std::string precision = "single";
  std::size_t ensemble = 1;
  std::string out;
  std::string data_dir;
  double lr = 1e-3;
  double swish_c = 1.0;
  bool trainable_c = false;
  bool early_stop = false;
  bool quiet = false;
  std::string hidden = "64,32";
  std::size_t synth_n = 500;
  std::size_t synth_classes = 3;
  double synth_separation = 4.0;
};

struct BenchOptions {
  std::string preset = "tanh";
  double n = 1e7;
  std::string mode = "gated";
  std::uint64_t seed = 1;
};

struct CurveOptions {
  std::string activation = "gated:tanh";
  double swish_c = 1.0;
  double xmin = -5.0;
  double xmax = 5.0;
  std::size_t xsteps = 201;
  std::string out;
};

int cmd_eval(const EvalOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err);
int cmd_interpolate(const InterpolateOptions& o, std::ostream& out, std::ostream& err);
int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err);
int cmd_curve(const CurveOptions& o, std::ostream& out, std::ostream& err);

}  // namespace mlgate::cli
