#include "minimax/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"NC-SC minimax solver benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "execute one configured solver");
  run->add_option("config", config_path, "JSON experiment config")->required();

  std::string bench_config;
  auto* bench =
      app.add_subcommand("bench", "execute every configured solver on one problem");
  bench->add_option("config", bench_config, "JSON experiment config")->required();

  minimax::VerifyOptions vopts;
  std::string verify_out;
  auto* verify =
      app.add_subcommand("verify", "derivative and inequality verification suite");
  verify->add_option("--seed", vopts.seed, "sample seed");
  verify->add_option("--fd-points", vopts.fd_points, "points per derivative check");
  verify->add_option("--lemma-points", vopts.lemma_points,
                     "points per inequality family");
  verify->add_option("--instances", vopts.quadratic_instances,
                     "random quadratic instances");
  verify->add_option("--out", verify_out, "also write the JSON report here");

  std::uint64_t seed = 1;
  long d = 0, n = 0;
  std::string out_path;
  auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset CSV");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--d", d, "feature dimension")->required();
  gen->add_option("--N", n, "number of samples")->required();
  gen->add_option("--out", out_path, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return minimax::cmd_run(config_path, std::cerr);
  if (bench->parsed()) return minimax::cmd_bench(bench_config, std::cerr);
  if (verify->parsed()) {
    if (!verify_out.empty()) vopts.report_out = verify_out;
    return minimax::cmd_verify(vopts, std::cout, std::cerr);
  }
  if (gen->parsed())
    return minimax::cmd_gen_data(seed, d, n, out_path, std::cerr);
  return minimax::kExitConfig;
}
