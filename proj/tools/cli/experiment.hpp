// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "config.hpp"

#include "cochlea/modal.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cochlea::cli
{

/// Exit status contract: success, fatal error, completed with flagged points.
enum ExitCode : int
{
  exit_success = 0,
  exit_fatal = 1,
  exit_flagged = 2
};

struct RunOptions
{
  std::filesystem::path out_dir = ".";
  unsigned threads = 0;
  bool use_cache = true;
  /// Empty selects <out_dir>/cache.
  std::filesystem::path cache_dir;
  /// Experiment to run; `resonances` is valid for any configuration.
  ExperimentType command = ExperimentType::resonances;
};

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

/// Content hash identifying the modal system a configuration produces.
std::string modal_cache_key(const ExperimentConfig &config);

/// Resonances, eigenmodes, Gram matrix and cubic tensor for a configuration,
/// loaded from or stored to the cache when enabled.
modal::ModalSystem load_or_build_system(const ExperimentConfig &config, const RunOptions &options,
                                        bool *cache_hit = nullptr);

/// Runs the experiment, writes resonances.csv, the experiment CSV and
/// run.json into options.out_dir, and returns an ExitCode. Fatal errors are
/// reported on `log` and never thrown.
int run_experiment(const ExperimentConfig &config, const RunOptions &options, std::ostream &log);

struct OracleRequest
{
  double mu = 0.0;
  double omega0 = 1.0;
  double Omega = 1.0;
  std::vector<double> F;
};

/// Single-oscillator steady states; writes oracle.csv and run.json.
int run_oracle(const OracleRequest &request, const std::filesystem::path &out_dir,
               std::ostream &log);

}  // namespace cochlea::cli
