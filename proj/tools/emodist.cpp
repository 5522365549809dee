// Apache License, Version 2.0, refer to LICENSE.txt
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "emodist/config.hpp"
#include "emodist/errors.hpp"
#include "emodist/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kDataError = 3;
constexpr int kRuntimeError = 4;
constexpr int kPartialFailure = 5;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emoji distant-supervision transfer toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path, "experiment config (JSON)")
      ->required();
  int jobs = 0;
  app.add_option("-j,--jobs", jobs, "override worker threads for runs");
  std::int64_t seed = -1;
  app.add_option("--seed", seed, "override the master seed");
  std::string out_dir;
  app.add_option("--out", out_dir, "override the output directory");

  auto* preprocess =
      app.add_subcommand("preprocess", "raw corpora to comment stores");
  auto* embed = app.add_subcommand("embed", "train token embeddings");
  auto* cluster = app.add_subcommand("cluster", "build emoji cluster specs");
  auto* build_st = app.add_subcommand("build-st", "emit source-task datasets");
  auto* run = app.add_subcommand("run", "run the transfer experiment");
  auto* report = app.add_subcommand("report", "print an existing report");

  CLI11_PARSE(app, argc, argv);

  try {
    emodist::ExperimentConfig config = emodist::load_config(config_path);
    if (jobs > 0) config.jobs = jobs;
    if (seed >= 0) config.master_seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) config.out_dir = out_dir;
    config.validate();

    if (preprocess->parsed()) {
      const int errors = emodist::cmd_preprocess(config);
      if (errors > 0) {
        std::cerr << "preprocess: " << errors << " rows skipped (see "
                  << config.out_dir << "/preprocess_errors.json)\n";
        return kPartialFailure;
      }
    } else if (embed->parsed()) {
      emodist::cmd_embed(config);
    } else if (cluster->parsed()) {
      emodist::cmd_cluster(config);
    } else if (build_st->parsed()) {
      emodist::cmd_build_st(config);
    } else if (run->parsed()) {
      emodist::cmd_run(config);
    } else if (report->parsed()) {
      emodist::cmd_report(config, std::cout);
    }
  } catch (const emodist::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const emodist::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
