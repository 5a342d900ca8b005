#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mlgate/bench.hpp"
#include "mlgate/builtin.hpp"
#include "mlgate/data.hpp"
#include "mlgate/error.hpp"
#include "mlgate/gate.hpp"
#include "mlgate/mlf.hpp"
#include "mlgate/nn.hpp"
#include "mlgate/report.hpp"

namespace mlgate::cli {

namespace fs = std::filesystem;

namespace {

bool parse_number(std::string_view s, double& v) {
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && p == end;
}

// Writes to the named file, or to `fallback` for "" and "-".
template <typename Fn>
int with_output(const std::string& path, std::ostream& fallback, std::ostream& err, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return kOk;
  }
  std::ofstream f(path);
  if (!f) {
    err << "cannot write " << path << "\n";
    return kDataError;
  }
  fn(f);
  return f ? kOk : kDataError;
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return std::signbit(v) ? "-0" : "0";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::optional<Grid> Grid::parse(std::string_view text) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string_view::npos ? a : a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos) return std::nullopt;
  Grid g;
  if (!parse_number(text.substr(0, a), g.from) || !parse_number(text.substr(a + 1, b - a - 1), g.to) ||
      !parse_number(text.substr(b + 1), g.step)) {
    return std::nullopt;
  }
  if (!(g.step > 0.0) || g.to < g.from || !std::isfinite(g.from) || !std::isfinite(g.to)) return std::nullopt;
  return g;
}

std::vector<double> Grid::points() const {
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = from + static_cast<double>(i) * step;
  return xs;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 1) xs.back() = b;
  return xs;
}

int cmd_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  mlf::MethodChoice choice;
  if (o.method == "auto") {
    choice = mlf::MethodChoice::Auto;
  } else if (o.method == "series") {
    choice = mlf::MethodChoice::Series;
  } else if (o.method == "closed") {
    choice = mlf::MethodChoice::ClosedForm;
  } else if (o.method == "asymptotic") {
    choice = mlf::MethodChoice::Asymptotic;
  } else {
    err << "unknown method '" << o.method << "' (auto, series, closed, asymptotic)\n";
    return kConfigError;
  }
  try {
    const mlf::MlfParams p{o.alpha, o.beta};
    const auto r = mlf::mlf_eval(p, o.z, choice);
    out << format_double(r.value) << ' ' << mlf::to_string(r.method);
    if (o.deriv) out << ' ' << format_double(mlf::mlf_deriv_m(p, o.z, *o.deriv));
    out << '\n';
    return kOk;
  } catch (const MathError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  const auto grid = Grid::parse(o.grid);
  if (!grid) {
    err << "bad grid '" << o.grid << "' (expected from:to:step)\n";
    return kConfigError;
  }
  const auto xs = grid->points();
  bool all_pass = true;
  out << std::left << std::setw(20) << "preset" << std::setw(26) << "max_abs_dev" << "status\n";
  for (gate::Preset p : gate::all_presets()) {
    const auto spec = gate::preset(p);
    double worst = 0.0;
    bool finite = true;
    try {
      for (double x : xs) {
        const double g = gate::gate_eval(spec, x);
        finite = finite && std::isfinite(g);
        worst = std::max(worst, std::abs(g - builtin::value(p, x)));
      }
    } catch (const MathError& e) {
      err << gate::to_string(p) << ": " << e.what() << '\n';
      finite = false;
    }
    const bool pass = finite && worst <= o.tol;
    all_pass = all_pass && pass;
    out << std::setw(20) << gate::to_string(p) << std::setw(26) << format_double(worst) << (pass ? "pass" : "FAIL")
        << '\n';
  }
  return all_pass ? kOk : kFailure;
}

int cmd_interpolate(const InterpolateOptions& o, std::ostream& out, std::ostream& err) {
  const bool range_ok = o.beta2_from >= 1.0 && o.beta2_from <= 2.0 && o.beta2_to >= 1.0 && o.beta2_to <= 2.0 &&
                        o.steps >= 1 && o.xsteps >= 1 && std::abs(o.xmin) <= 25.0 && std::abs(o.xmax) <= 25.0;
  if (!range_ok) {
    err << "beta2 range must lie in [1, 2] and |x| <= 25\n";
    return kConfigError;
  }
  const auto betas = linspace(o.beta2_from, o.beta2_to, o.steps);
  const auto xs = linspace(o.xmin, o.xmax, o.xsteps);
  gate::SweepTable table;
  try {
    table = gate::interpolation_sweep(betas, xs);
  } catch (const MathError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
  return with_output(o.out, out, err, [&](std::ostream& os) {
    os << "x,beta2,value\n";
    for (std::size_t b = 0; b < betas.size(); ++b) {
      for (std::size_t j = 0; j < xs.size(); ++j) {
        os << format_double(xs[j]) << ',' << format_double(betas[b]) << ',' << format_double(table.at(b, j)) << '\n';
      }
    }
  });
}

namespace {

struct Datasets {
  data::Dataset train, test;
};

Datasets load_datasets(const TrainOptions& o) {
  if (o.dataset == "synth") {
    return {data::synth_blobs(o.synth_n, o.synth_classes, o.synth_separation, data::derive_seed(o.seed, 101)),
            data::synth_blobs(std::max<std::size_t>(o.synth_n / 4, 1), o.synth_classes, o.synth_separation,
                              data::derive_seed(o.seed, 102))};
  }
  std::string dir = o.data_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("MLGATE_DATA_DIR")) dir = env;
  }
  if (dir.empty()) throw DataError(DataErrc::Io, "no MNIST directory (use --data-dir or MLGATE_DATA_DIR)");
  const auto files = data::find_mnist(dir);
  if (!files) throw DataError(DataErrc::Io, "MNIST IDX files not found in " + dir);
  return {data::load_mnist_idx(files->train_images, files->train_labels, data::Split::Train),
          data::load_mnist_idx(files->test_images, files->test_labels, data::Split::Test)};
}

std::vector<std::size_t> parse_hidden(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0;
    if (!parse_number(item, v) || v < 1 || v != std::floor(v)) throw std::invalid_argument("bad --hidden list " + s);
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

template <typename T>
report::RunReport run_member(const TrainOptions& o, const nn::Activation& act, const Datasets& ds,
                             std::size_t member, std::ostream& err) {
  nn::Network<T> net = o.arch == "lenet5"
                           ? nn::lenet5<T>(act, o.seed)
                           : nn::mlp<T>(ds.train.images.row_size(), parse_hidden(o.hidden), ds.train.classes(), act,
                                        o.seed);
  nn::TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch;
  cfg.seed = o.seed;
  cfg.shuffle_stream = member;
  cfg.adam.lr = o.lr;
  cfg.early_stop = o.early_stop;
  cfg.evaluate_train = false;
  if (!o.quiet) {
    cfg.on_epoch = [&err, member](const report::EpochRecord& r) {
      err << "member " << member << " epoch " << r.epoch << " train_loss " << format_double(r.train_loss)
          << " test_loss " << format_double(r.test_loss) << " test_acc " << format_double(r.test_acc)
          << " macro_f1 " << format_double(r.macro_f1) << '\n';
    };
  }
  return nn::train(net, ds.train, ds.test, cfg);
}

std::vector<std::pair<std::string, std::string>> config_echo(const TrainOptions& o) {
  return {{"arch", o.arch},
          {"dataset", o.dataset},
          {"activation", o.activation},
          {"epochs", std::to_string(o.epochs)},
          {"batch", std::to_string(o.batch)},
          {"seed", std::to_string(o.seed)},
          {"precision", o.precision},
          {"ensemble", std::to_string(o.ensemble)},
          {"lr", format_double(o.lr)},
          {"adam", "beta1=0.9 beta2=0.999 epsilon=1e-05"},
          {"swish_c", format_double(o.swish_c)},
          {"trainable_c", o.trainable_c ? "true" : "false"},
          {"early_stop", o.early_stop ? "true" : "false"},
          {"hidden", o.arch == "mlp" ? o.hidden : ""},
          {"synth", o.dataset == "synth" ? std::to_string(o.synth_n) + "x" + std::to_string(o.synth_classes) +
                                               " sep=" + format_double(o.synth_separation)
                                         : ""}};
}

int write_report(const std::string& path, const report::RunReport& r, std::ostream& err) {
  std::ofstream f(path);
  if (!f) {
    err << "cannot write " << path << '\n';
    return kDataError;
  }
  f << report::to_json(r);
  return f ? kOk : kDataError;
}

}  // namespace

int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  if (o.arch != "lenet5" && o.arch != "mlp") {
    err << "unknown --arch " << o.arch << '\n';
    return kConfigError;
  }
  if (o.dataset != "mnist" && o.dataset != "synth") {
    err << "unknown --dataset " << o.dataset << '\n';
    return kConfigError;
  }
  if (o.arch == "lenet5" && o.dataset != "mnist") {
    err << "lenet5 needs 28x28 inputs; use --arch mlp with --dataset synth\n";
    return kConfigError;
  }
  if (o.precision != "single" && o.precision != "double") {
    err << "--precision must be single or double\n";
    return kConfigError;
  }
  if (o.batch == 0 || o.ensemble == 0) {
    err << "--batch and --ensemble must be positive\n";
    return kConfigError;
  }
  auto act = nn::parse_activation(o.activation, o.swish_c);
  if (!act) {
    err << "bad --activation '" << o.activation << "' (builtin:NAME or gated:NAME)\n";
    return kConfigError;
  }
  try {
    if (o.trainable_c) *act = act->trainable();
    if (o.arch == "mlp") parse_hidden(o.hidden);
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return kConfigError;
  }

  Datasets ds;
  try {
    ds = load_datasets(o);
  } catch (const DataError& e) {
    err << e.what() << '\n';
    return kDataError;
  }

  std::vector<report::RunReport> members;
  try {
    for (std::size_t m = 0; m < o.ensemble; ++m) {
      members.push_back(o.precision == "single" ? run_member<float>(o, *act, ds, m, err)
                                                : run_member<double>(o, *act, ds, m, err));
      members.back().config = config_echo(o);
    }
  } catch (const MathError& e) {
    err << e.what() << '\n';
    return kFailure;
  }

  const report::RunReport agg = members.size() == 1 ? members.front() : report::aggregate(members);
  if (!o.out.empty()) {
    if (members.size() > 1) {
      const fs::path base(o.out);
      for (std::size_t m = 0; m < members.size(); ++m) {
        fs::path p = base;
        p.replace_filename(base.stem().string() + ".member" + std::to_string(m) + base.extension().string());
        if (int rc = write_report(p.string(), members[m], err)) return rc;
      }
    }
    if (int rc = write_report(o.out, agg, err)) return rc;
  }
  const auto& last = agg.last();
  out << "epochs " << last.epoch << " test_loss " << format_double(last.test_loss) << " test_acc "
      << format_double(last.test_acc) << " macro_f1 " << format_double(last.macro_f1) << " images_per_second "
      << format_double(std::round(agg.images_per_second)) << " members " << agg.members << '\n';
  return kOk;
}

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  const auto p = gate::parse_preset(o.preset);
  if (!p) {
    err << "unknown preset '" << o.preset << "'\n";
    return kConfigError;
  }
  if (o.mode != "builtin" && o.mode != "gated") {
    err << "--mode must be builtin or gated\n";
    return kConfigError;
  }
  if (!(o.n >= 0.0) || o.n != std::floor(o.n) || o.n > 1e15) {
    err << "--n must be a nonnegative integer\n";
    return kConfigError;
  }
  const auto r = bench::run(*p, o.mode == "builtin" ? bench::Mode::BuiltIn : bench::Mode::Gated,
                            static_cast<std::size_t>(o.n), o.seed);
  out << "preset,mode,n,forward_per_second,forward_deriv_per_second\n"
      << gate::to_string(r.preset) << ',' << bench::to_string(r.mode) << ',' << r.n << ','
      << format_double(std::round(r.forward_per_second)) << ','
      << format_double(std::round(r.forward_deriv_per_second)) << '\n';
  return kOk;
}

int cmd_curve(const CurveOptions& o, std::ostream& out, std::ostream& err) {
  const auto act = nn::parse_activation(o.activation, o.swish_c);
  if (!act || o.xsteps == 0 || !(o.xmax >= o.xmin)) {
    err << "bad --activation or x range\n";
    return kConfigError;
  }
  const auto xs = linspace(o.xmin, o.xmax, o.xsteps);
  std::vector<std::pair<double, double>> rows;
  try {
    for (double x : xs) {
      if (act->mode == nn::Activation::Mode::BuiltIn) {
        rows.emplace_back(builtin::value(act->preset, x, o.swish_c), builtin::deriv(act->preset, x, o.swish_c));
      } else {
        const auto v = gate::gate_eval_deriv(act->spec, x);
        rows.emplace_back(v.value, v.deriv);
      }
    }
  } catch (const MathError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
  return with_output(o.out, out, err, [&](std::ostream& os) {
    os << "x,value,derivative\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      os << format_double(xs[i]) << ',' << format_double(rows[i].first) << ',' << format_double(rows[i].second)
         << '\n';
    }
  });
}

}  // namespace mlgate::cli
