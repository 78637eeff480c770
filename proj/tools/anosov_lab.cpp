// anosov-lab <classify|gaps|limitmap|positivity|cusp|certify> --config <path> --out <dir>

#include <iostream>

#include <CLI11.hpp>

#include "anosov/errors.hpp"
#include "anosov/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical Anosov and Hitchin diagnostics for representations of Fuchsian groups"};
  app.set_version_flag("--version", std::string(ANOSOV_VERSION));
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int jobs = 1;
  std::uint64_t seed = 0;
  bool dump_flags = false;
  bool quiet = false;

  for (const char* name : {"classify", "gaps", "limitmap", "positivity", "cusp", "certify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "output directory for report.json, tables/ and cache/")->required();
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
    sub->add_option("--seed", seed, "override diagnostics.seed");
    sub->add_flag("--dump-flags", dump_flags, "write tables/flags.csv (limitmap)");
    sub->add_flag("-q,--quiet", quiet, "print nothing on success");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : anosov::kExitInput;
  }

  const auto cmd = anosov::parse_command(app.get_subcommands().front()->get_name());
  anosov::RunOptions opt;
  opt.out = out_dir;
  opt.jobs = jobs;
  opt.dump_flags = dump_flags;
  if (app.get_subcommands().front()->count("--seed") > 0) opt.seed = seed;

  try {
    anosov::Config cfg = anosov::load_config(config_path);
    anosov::RunResult r = anosov::run_command(*cmd, cfg, opt);
    if (!quiet || r.exit_code != anosov::kExitPass) {
      for (const auto& c : r.categories) {
        std::cout << anosov::to_string(c.verdict) << "  " << c.name << "  " << c.detail << "\n";
      }
      std::cout << "verdict: " << r.report.at("verdict").get<std::string>() << " (exit " << r.exit_code << ")\n";
    }
    return r.exit_code;
  } catch (const anosov::Error& e) {
    std::cerr << "anosov-lab: " << e.what() << "\n";
    return anosov::kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "anosov-lab: " << e.what() << "\n";
    return anosov::kExitInput;
  }
}
