#include <CLI11.hpp>

#include "fracsurf/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal perimeter, curvature and extension-energy experiments"};
  fracsurf::RunOptions opt;
  for (int i = 0; i < argc; ++i) opt.argv.emplace_back(argv[i]);
  std::uint64_t seed = 0;
  std::string format = "both";
  app.add_option("--config", opt.config_path, "experiment file (JSON)")->required();
  app.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "overrides spec.seed");
  app.add_option("--threads", opt.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--format", format, "json, csv or both")
      ->check(CLI::IsMember({"json", "csv", "both"}))
      ->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : fracsurf::exit_config;
  }
  if (*seed_opt) opt.seed = seed;
  opt.format = format == "json" ? fracsurf::OutputFormat::json
               : format == "csv" ? fracsurf::OutputFormat::csv
                                 : fracsurf::OutputFormat::both;
  return fracsurf::run(opt);
}
