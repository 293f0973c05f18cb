#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quatnav/cli/commands.hpp"
#include "quatnav/errors.hpp"

namespace {

const std::map<std::string, quatnav::DatasetFormat> kFormats{
    {"native-csv", quatnav::DatasetFormat::NativeCsv},
    {"asl-csv", quatnav::DatasetFormat::AslCsv}};

const std::map<std::string, quatnav::FilterKind> kFilters{
    {"qupf", quatnav::FilterKind::Qupf},
    {"ekf", quatnav::FilterKind::Ekf},
    {"deadreckon", quatnav::FilterKind::DeadReckon}};

}  // namespace

int main(int argc, char** argv) {
  namespace cli = quatnav::cli;
  CLI::App app{"quatnav: quaternion unscented particle filter for visual-inertial navigation"};
  app.require_subcommand(1);
  app.footer("Environment: QUATNAV_THREADS caps particle-layer worker threads.");

  std::string spec;
  std::string sim_out;
  std::uint64_t seed = 1;
  CLI::App* simulate = app.add_subcommand("simulate", "Synthesize a dataset from a trajectory spec");
  simulate->add_option("--spec", spec, "Trajectory/sensor spec file (TOML subset)")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--out", sim_out, "Output dataset directory")->required();
  simulate->add_option("--seed", seed, "Random seed for sensor noise and landmarks")
      ->capture_default_str();

  cli::RunRequest run_req;
  std::string run_data;
  std::string run_config;
  std::string run_out;
  quatnav::FilterKind filter = quatnav::FilterKind::Qupf;
  quatnav::DatasetFormat run_format = quatnav::DatasetFormat::NativeCsv;
  CLI::App* run = app.add_subcommand("run", "Run one filter on a dataset");
  run->add_option("--data", run_data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  CLI::Option* filter_opt =
      run->add_option("--filter", filter, "qupf, ekf or deadreckon (overrides filter.kind)")
          ->transform(CLI::CheckedTransformer(kFilters, CLI::ignore_case));
  run->add_option("--config", run_config, "Filter config file (TOML subset)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Output directory for estimates.csv, errors.csv, summary.json")
      ->required();
  run->add_option("--format", run_format, "Dataset layout: native-csv or asl-csv")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case))
      ->default_str("native-csv");
  run->add_option("--threads", run_req.threads,
                  "Particle-layer worker threads (default: QUATNAV_THREADS or hardware)");

  cli::CompareRequest cmp_req;
  std::string cmp_data;
  std::vector<std::string> cmp_configs;
  std::string cmp_out;
  quatnav::DatasetFormat cmp_format = quatnav::DatasetFormat::NativeCsv;
  CLI::App* compare = app.add_subcommand("compare", "Run several configs on one dataset");
  compare->add_option("--data", cmp_data, "Dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  compare->add_option("--configs", cmp_configs, "Two or more filter config files")
      ->required()
      ->expected(2, -1)
      ->check(CLI::ExistingFile);
  compare->add_option("--out", cmp_out, "Output directory")->required();
  compare->add_option("--format", cmp_format, "Dataset layout: native-csv or asl-csv")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case))
      ->default_str("native-csv");
  compare->add_option("--threads", cmp_req.threads,
                      "Particle-layer worker threads (default: QUATNAV_THREADS or hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      std::cout << cli::cmd_simulate(spec, sim_out, seed).text();
    } else if (run->parsed()) {
      run_req.data = run_data;
      run_req.config = run_config;
      run_req.out = run_out;
      run_req.format = run_format;
      if (filter_opt->count() > 0) {
        run_req.filter = filter;
      }
      std::cout << cli::cmd_run(run_req).text();
    } else if (compare->parsed()) {
      cmp_req.data = cmp_data;
      cmp_req.out = cmp_out;
      cmp_req.format = cmp_format;
      for (const auto& c : cmp_configs) {
        cmp_req.configs.emplace_back(c);
      }
      std::cout << cli::cmd_compare(cmp_req).text();
    }
  } catch (const quatnav::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what();
    if (e.particle() >= 0) {
      std::cerr << " (particle " << e.particle() << ")";
    }
    std::cerr << "\n";
    return 3;
  } catch (const quatnav::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
