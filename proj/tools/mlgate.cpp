#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

namespace cli = mlgate::cli;

int main(int argc, char** argv) {
  CLI::App app{"Mittag-Leffler gated activations: evaluation, verification and training"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mlgate 1.0");

  cli::EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate E_{alpha,beta}(z)");
  eval_cmd->add_option("--alpha", eval.alpha, "alpha >= 0")->required();
  eval_cmd->add_option("--beta", eval.beta, "beta > 0")->required();
  eval_cmd->add_option("--z", eval.z, "argument")->required();
  eval_cmd->add_option("--method", eval.method, "auto, series, closed or asymptotic")->capture_default_str();
  eval_cmd->add_option("--deriv", eval.deriv, "also print the m-th derivative");

  cli::VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Compare every preset against its closed form");
  verify_cmd->add_option("--tol", verify.tol, "max absolute deviation")->capture_default_str();
  verify_cmd->add_option("--grid", verify.grid, "from:to:step")->capture_default_str();

  cli::InterpolateOptions interp;
  auto* interp_cmd = app.add_subcommand("interpolate", "Sweep the tanh-to-linear family over beta2");
  interp_cmd->add_option("--beta2-from", interp.beta2_from)->capture_default_str();
  interp_cmd->add_option("--beta2-to", interp.beta2_to)->capture_default_str();
  interp_cmd->add_option("--steps", interp.steps)->capture_default_str();
  interp_cmd->add_option("--xmin", interp.xmin)->capture_default_str();
  interp_cmd->add_option("--xmax", interp.xmax)->capture_default_str();
  interp_cmd->add_option("--xsteps", interp.xsteps)->capture_default_str();
  interp_cmd->add_option("--out", interp.out, "CSV path, stdout if omitted");

  cli::TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a network and write a JSON run report");
  train_cmd->add_option("--arch", train.arch, "lenet5 or mlp")->capture_default_str();
  train_cmd->add_option("--dataset", train.dataset, "mnist or synth")->capture_default_str();
  train_cmd->add_option("--activation", train.activation, "builtin:NAME or gated:NAME")->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs)->capture_default_str();
  train_cmd->add_option("--batch", train.batch)->capture_default_str();
  train_cmd->add_option("--seed", train.seed)->capture_default_str();
  train_cmd->add_option("--precision", train.precision, "single or double")->capture_default_str();
  train_cmd->add_option("--ensemble", train.ensemble, "independent members")->capture_default_str();
  train_cmd->add_option("--out", train.out, "report path");
  train_cmd->add_option("--data-dir", train.data_dir, "MNIST directory, default $MLGATE_DATA_DIR");
  train_cmd->add_option("--lr", train.lr)->capture_default_str();
  train_cmd->add_option("--swish-c", train.swish_c)->capture_default_str();
  train_cmd->add_flag("--trainable-c", train.trainable_c, "learn the Swish scale");
  train_cmd->add_flag("--early-stop", train.early_stop, "stop on a macro-F1 plateau");
  train_cmd->add_flag("--quiet", train.quiet, "no per-epoch log");
  train_cmd->add_option("--hidden", train.hidden, "mlp hidden widths")->capture_default_str();
  train_cmd->add_option("--synth-n", train.synth_n, "samples per class")->capture_default_str();
  train_cmd->add_option("--synth-classes", train.synth_classes)->capture_default_str();
  train_cmd->add_option("--synth-separation", train.synth_separation)->capture_default_str();

  cli::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Activation throughput");
  bench_cmd->add_option("--preset", bench.preset)->capture_default_str();
  bench_cmd->add_option("--n", bench.n, "evaluations, e.g. 1e7")->capture_default_str();
  bench_cmd->add_option("--mode", bench.mode, "builtin or gated")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();

  cli::CurveOptions curve;
  auto* curve_cmd = app.add_subcommand("curve", "Tabulate an activation and its derivative");
  curve_cmd->add_option("--activation", curve.activation)->capture_default_str();
  curve_cmd->add_option("--swish-c", curve.swish_c)->capture_default_str();
  curve_cmd->add_option("--xmin", curve.xmin)->capture_default_str();
  curve_cmd->add_option("--xmax", curve.xmax)->capture_default_str();
  curve_cmd->add_option("--xsteps", curve.xsteps)->capture_default_str();
  curve_cmd->add_option("--out", curve.out, "CSV path, stdout if omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kConfigError;
  }

  auto& out = std::cout;
  auto& err = std::cerr;
  if (*eval_cmd) return cli::cmd_eval(eval, out, err);
  if (*verify_cmd) return cli::cmd_verify(verify, out, err);
  if (*interp_cmd) return cli::cmd_interpolate(interp, out, err);
  if (*train_cmd) return cli::cmd_train(train, out, err);
  if (*bench_cmd) return cli::cmd_bench(bench, out, err);
  return cli::cmd_curve(curve, out, err);
}
