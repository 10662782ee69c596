// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "experiment.hpp"

#include "cochlea/modal.hpp"

/// Shared fixtures: the default six-resonator system, built once per test
/// binary and cached on disk across runs.
namespace cochlea::fixtures
{

inline cli::ExperimentConfig desk_config()
{
  return cli::ExperimentConfig{};
}

inline const modal::ModalSystem &desk_system()
{
  static const modal::ModalSystem system = [] {
    cli::RunOptions options;
    options.cache_dir = COCHLEA_TEST_CACHE_DIR;
    return cli::load_or_build_system(desk_config(), options);
  }();
  return system;
}

}  // namespace cochlea::fixtures
