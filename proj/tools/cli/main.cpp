// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"
#include "experiment.hpp"

#include "cochlea/version.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

using namespace cochlea::cli;

std::string read_file(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonFlags
{
  std::string config;
  std::string out = "out";
  unsigned threads = 0;
  bool no_cache = false;
  std::string cache_dir;
};

void add_common(CLI::App *sub, CommonFlags &flags)
{
  sub->add_option("--config", flags.config, "Experiment configuration (JSON)")->required();
  sub->add_option("--out", flags.out, "Output directory")->capture_default_str();
  sub->add_option("--threads", flags.threads, "Worker threads (0 = auto)")->capture_default_str();
  sub->add_flag("--no-cache", flags.no_cache, "Do not read or write the modal-system cache");
  sub->add_option("--cache-dir", flags.cache_dir, "Cache directory (default: <out>/cache)");
}

int run(ExperimentType type, const CommonFlags &flags)
{
  ExperimentConfig config;
  try
  {
    config = parse_config(read_file(flags.config));
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_fatal;
  }
  RunOptions options;
  options.out_dir = flags.out;
  options.threads = flags.threads;
  options.use_cache = !flags.no_cache;
  options.cache_dir = flags.cache_dir;
  options.command = type;
  return run_experiment(config, options, std::cerr);
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Subwavelength resonator array and coupled Hopf response solver"};
  app.set_version_flag("--version", std::string(cochlea::version));
  app.require_subcommand(1);

  CommonFlags flags;
  const std::pair<const char *, ExperimentType> experiments[] = {
    {"resonances", ExperimentType::resonances},
    {"sweep", ExperimentType::sweep},
    {"phase", ExperimentType::phase},
    {"twotone", ExperimentType::twotone},
  };
  const char *descriptions[] = {
    "Compute the subwavelength resonances of the configured array",
    "Pure-tone frequency sweeps for each forcing amplitude",
    "Phase and group delay at observation points",
    "Two-tone sweep with the first tone fixed",
  };
  std::vector<std::pair<CLI::App *, ExperimentType>> subs;
  for (std::size_t i = 0; i < 4; ++i)
  {
    auto *sub = app.add_subcommand(experiments[i].first, descriptions[i]);
    add_common(sub, flags);
    subs.emplace_back(sub, experiments[i].second);
  }

  std::string validate_path;
  auto *validate = app.add_subcommand("validate", "Check a configuration without running it");
  validate->add_option("--config", validate_path, "Experiment configuration (JSON)")->required();

  OracleRequest oracle;
  std::string oracle_out = "out";
  auto *oracle_cmd =
    app.add_subcommand("oracle", "Steady amplitude of the single forced Hopf oscillator");
  oracle_cmd->add_option("--mu", oracle.mu, "Bifurcation parameter")->capture_default_str();
  oracle_cmd->add_option("--omega0", oracle.omega0, "Natural frequency")->capture_default_str();
  oracle_cmd->add_option("--Omega", oracle.Omega, "Forcing frequency")->capture_default_str();
  oracle_cmd->add_option("--F", oracle.F, "Forcing amplitudes")->required()->delimiter(',');
  oracle_cmd->add_option("--out", oracle_out, "Output directory")->capture_default_str();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? exit_success : exit_fatal;
  }

  for (const auto &[sub, type] : subs)
    if (sub->parsed())
      return run(type, flags);

  if (validate->parsed())
  {
    try
    {
      const auto config = parse_config(read_file(validate_path));
      std::cout << to_json(config).dump(2) << '\n';
      return exit_success;
    }
    catch (const std::exception &e)
    {
      std::cerr << "error: " << e.what() << '\n';
      return exit_fatal;
    }
  }
  if (oracle_cmd->parsed())
    return run_oracle(oracle, oracle_out, std::cerr);
  return exit_fatal;
}
